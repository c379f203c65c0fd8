#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sveda/baselines.hpp"
#include "sveda/landscapes.hpp"
#include "sveda/objective.hpp"
#include "sveda/svgd.hpp"

namespace sveda {

enum class OptimizerKind { svgd_eda, svgd_eda_independent, pbil, random };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& name);
std::string to_string(UtilityMode mode);
UtilityMode parse_utility(const std::string& name);
std::string to_string(KernelMode mode);
KernelMode parse_kernel(const std::string& name);

/// Where the instances of an experiment come from: generated from (n, k, d) or loaded from files.
struct InstanceSource {
    std::size_t n = 64;
    std::size_t k = 2;
    std::size_t d = 2;
    std::size_t count = 10;
    std::vector<std::filesystem::path> files;

    bool from_files() const noexcept { return !files.empty(); }
};

struct ExperimentConfig {
    OptimizerKind optimizer = OptimizerKind::svgd_eda;
    /// When set, every instance must have this many categories per variable.
    std::optional<std::size_t> categories;
    InstanceSource instances;
    std::size_t runs_per_instance = 10;
    std::size_t budget = 50000;
    SvgdConfig svgd;
    PbilConfig pbil;
    std::size_t random_batch = 100;
    std::uint64_t master_seed = 1;
    /// Empty: keep results in memory only.
    std::filesystem::path out_dir;
    std::size_t jobs = 1;
    /// Write measured wall-clock times into traces (output is then not byte-reproducible).
    bool record_time = false;
    bool exclude_diverged = false;
    std::size_t checkpoint_step = 500;

    /// Throws ConfigError.
    void validate() const;
};

/// Seed splitting. Instance i of a generated set and run r on instance i get independent keys.
std::uint64_t instance_seed(std::uint64_t master_seed, std::size_t instance_id);
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t instance_id, std::size_t run_index);

std::vector<NkdInstance> materialize_instances(const ExperimentConfig& config);

struct RunOutcome {
    std::size_t instance_id = 0;
    std::size_t run_id = 0;
    bool diverged = false;
    std::string message;
    double final_best = 0.0;
    std::size_t evaluations = 0;
    std::vector<IterationRecord> trace;
};

struct Checkpoint {
    std::size_t evaluations = 0;
    double mean_best = 0.0;
    std::size_t runs = 0;
};

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::vector<Checkpoint> curve;
};

/// Statistics of `finals` plus the mean best-so-far curve of `traces` on a grid of `step` evaluations.
/// Between recorded rows the best-so-far is held at its previous value.
Summary summarize(const std::vector<double>& finals, const std::vector<std::vector<IterationRecord>>& traces,
                  std::size_t step);

/// Best-so-far of `trace` at `evaluations`, or nullopt before the first row.
std::optional<double> best_at(const std::vector<IterationRecord>& trace, std::size_t evaluations);

struct ExperimentResult {
    std::string label;
    std::vector<RunOutcome> runs;
    Summary summary;

    bool any_diverged() const;
};

/// Runs every (instance, run) pair; writes traces/ and summary.json under out_dir when set.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct SweepEntry {
    std::size_t agents = 0;
    std::size_t iterations = 0;
    ExperimentResult result;
};

/// One experiment per agent count with budget held fixed; writes sweep_summary.csv and sweep_finals.csv.
std::vector<SweepEntry> sweep_m(const ExperimentConfig& config, const std::vector<std::size_t>& agent_counts);

struct InstancePair {
    std::size_t instance_id = 0;
    double mean_interacting = 0.0;
    double mean_independent = 0.0;
    double difference = 0.0;
};

struct AblationResult {
    ExperimentResult interacting;
    ExperimentResult independent;
    std::vector<InstancePair> pairs;
    double mean_difference = 0.0;
    /// (mean interacting - mean independent) / mean independent
    double relative_improvement = 0.0;
};

/// Same instances and run seeds under the RBF and the identity kernel; writes ablation.json and ablation_pairs.csv.
AblationResult ablation_interaction(const ExperimentConfig& config);

/// Reads trace CSV files written by run_experiment.
std::vector<IterationRecord> read_trace(const std::filesystem::path& path);
void write_trace(const std::filesystem::path& path, std::size_t run_id, std::size_t instance_id,
                 const std::vector<IterationRecord>& trace, bool record_time);

Summary aggregate(const std::vector<std::filesystem::path>& trace_files, std::size_t step = 500);

/// Summary as JSON text (keys: count, mean, stddev, min, q1, median, q3, max, curve).
std::string summary_json(const std::string& label, const Summary& summary);

inline constexpr const char* kTraceHeader =
    "run_id,instance_id,iteration,evaluations,best_so_far,mean_fitness,bandwidth,wall_ms";

} // namespace sveda
