#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sveda/errors.hpp"
#include "sveda/kernel.hpp"
#include "sveda/objective.hpp"
#include "sveda/policy.hpp"
#include "sveda/utility.hpp"

namespace sveda {

/// Step size chosen by tools/calibrate_step_size (see config/defaults.toml).
inline constexpr double kDefaultStepSize = 0.0625;

enum class UtilityMode { rank, raw, unbiased };

struct SvgdConfig {
    std::size_t agents = 7;
    std::size_t samples_per_agent = 13;
    double temperature = 0.015;
    double step_size = kDefaultStepSize;
    UtilityMode utility = UtilityMode::rank;
    KernelConfig kernel;
    std::size_t budget = 50000;
    /// Initial logits are uniform on [-init_scale, init_scale].
    double init_scale = 0.5;
    /// Abort when any logit leaves [-limit, limit].
    double divergence_limit = 1e6;

    /// Throws ConfigError.
    void validate() const;

    std::size_t iterations() const noexcept { return budget / (agents * samples_per_agent); }
};

/// Stream keys of one run. Agent j draws its initial logits and its samples from streams
/// derived from agent_keys[j]; ties in the global ranking use tie_key.
struct RunStreams {
    std::vector<std::uint64_t> agent_keys;
    std::uint64_t tie_key = 0;

    static RunStreams from_seed(std::uint64_t seed, std::size_t agents);

    /// Agent j's streams in isolation (for single-agent comparisons).
    RunStreams single_agent(std::size_t j) const;
};

/// Samples, fitness values and score gradients of one iteration.
struct SampleBatch {
    std::size_t agents = 0;
    std::size_t samples_per_agent = 0;
    /// solutions[j * lambda + l]
    std::vector<Solution> solutions;
    FitnessMatrix fitness;
    /// grads[j * lambda + l] = score_grad(particles[j], solutions[j * lambda + l])
    std::vector<std::vector<double>> grads;

    const Solution& solution(std::size_t j, std::size_t l) const { return solutions[j * samples_per_agent + l]; }
    const std::vector<double>& grad(std::size_t j, std::size_t l) const { return grads[j * samples_per_agent + l]; }
};

Population init_population(const SvgdConfig& config, const ModelSpec& model, std::vector<CounterRng>& agent_rngs);

/// g_j = 1 / (lambda * gamma) * sum_l u(j, l) * grads(j, l)
std::vector<std::vector<double>> estimate_boltzmann_grad(const SampleBatch& batch, const UtilityMatrix& utilities,
                                                         double temperature);

/// theta_i += eps / m * sum_j [ gram(i, j) g_j + grad_k(i, j) ]. Returns a new population.
/// Throws Diverged (tagged with `iteration`) when a logit becomes non-finite or exceeds `limit`.
Population svgd_step(const Population& population, const std::vector<std::vector<double>>& boltzmann_grads,
                     const KernelEval& kernel, double step_size, std::size_t iteration = 0, double limit = 1e6);

/// Everything the engine saw in one iteration, passed to RunObserver.
struct IterationView {
    std::size_t iteration;
    const Population& before;
    const SampleBatch& batch;
    const UtilityMatrix& utilities;
    const KernelEval& kernel;
    const Population& after;
};

struct RunObserver {
    std::function<void(const IterationView&)> on_iteration;
};

struct RunResult {
    std::vector<IterationRecord> trace;
    Solution best_solution;
    double best_fitness = 0.0;
    std::size_t evaluations = 0;
    Population final_population;
};

/// Raised by run() when the update diverges; carries the trace up to the failure.
class RunDiverged : public Diverged {
public:
    RunDiverged(const Diverged& cause, RunResult partial) : Diverged(cause), partial_(std::move(partial)) {}
    const RunResult& partial() const noexcept { return partial_; }

private:
    RunResult partial_;
};

RunResult run(const Objective& objective, const ModelSpec& model, const SvgdConfig& config, const RunStreams& streams,
              const RunObserver& observer = {});

RunResult run(const Objective& objective, const ModelSpec& model, const SvgdConfig& config, std::uint64_t seed,
              const RunObserver& observer = {});

} // namespace sveda
