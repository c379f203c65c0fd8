// Command-line front end: generate | run | sweep-m | ablate-interaction | aggregate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sveda/errors.hpp"
#include "sveda/harness.hpp"
#include "sveda/landscapes.hpp"

namespace fs = std::filesystem;
using namespace sveda;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Options {
    std::string optimizer = "svgd-eda";
    std::string problem;
    std::size_t n = 64;
    std::size_t k = 2;
    std::size_t d = 2;
    std::size_t instance_count = 10;
    std::vector<std::string> instance_files;
    std::size_t runs = 10;
    std::size_t budget = 50000;
    std::uint64_t seed = 1;
    std::size_t m = 7;
    std::size_t lambda = 13;
    double gamma = 0.015;
    double epsilon = kDefaultStepSize;
    std::string kernel = "rbf";
    std::string utility = "rank";
    double bandwidth = 0.0;
    double init_scale = 0.5;
    bool center = false;
    std::size_t pbil_population = 64;
    std::size_t pbil_selection = 1;
    double pbil_rate = 0.1;
    double pbil_mutation = 0.02;
    double pbil_shift = 0.05;
    bool pbil_no_clamp = false;
    std::string out;
    std::size_t jobs = 1;
    bool record_time = false;
    bool exclude_diverged = false;
    std::size_t checkpoint_step = 500;
    std::string config;
};

void add_instance_flags(CLI::App* cmd, Options& o)
{
    cmd->add_option("--problem", o.problem, "NK (d=2) or NK3 (d=3); overrides --d")->check(CLI::IsMember({"NK", "NK3"}));
    cmd->add_option("--n", o.n, "Variables per instance");
    cmd->add_option("--k", o.k, "Epistatic neighbors per variable");
    cmd->add_option("--d", o.d, "Values per variable");
}

void add_experiment_flags(CLI::App* cmd, Options& o)
{
    add_instance_flags(cmd, o);
    cmd->add_option("--optimizer", o.optimizer, "svgd-eda | svgd-eda-independent | pbil | random")
        ->check(CLI::IsMember({"svgd-eda", "svgd-eda-independent", "pbil", "random"}));
    cmd->add_option("--instances", o.instance_count, "Generated instances");
    cmd->add_option("--instance-files", o.instance_files, "Load instances from files instead of generating");
    cmd->add_option("--runs", o.runs, "Runs per instance");
    cmd->add_option("--budget", o.budget, "Objective evaluations per run");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--m", o.m, "Agents");
    cmd->add_option("--lambda", o.lambda, "Samples per agent per iteration");
    cmd->add_option("--gamma", o.gamma, "Temperature");
    cmd->add_option("--epsilon", o.epsilon, "Step size");
    cmd->add_option("--kernel", o.kernel, "rbf | identity")->check(CLI::IsMember({"rbf", "identity"}));
    cmd->add_option("--utility", o.utility, "rank | raw | unbiased")->check(CLI::IsMember({"rank", "raw", "unbiased"}));
    cmd->add_option("--bandwidth", o.bandwidth, "Fixed RBF bandwidth (default: median trick)");
    cmd->add_option("--init-scale", o.init_scale, "Initial logits uniform on [-s, s]");
    cmd->add_flag("--center-categorical", o.center, "Mean-center categorical logits before kernel distances");
    cmd->add_option("--pbil-population", o.pbil_population);
    cmd->add_option("--pbil-selection", o.pbil_selection);
    cmd->add_option("--pbil-rate", o.pbil_rate);
    cmd->add_option("--pbil-mutation", o.pbil_mutation);
    cmd->add_option("--pbil-shift", o.pbil_shift);
    cmd->add_flag("--pbil-no-clamp", o.pbil_no_clamp);
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--jobs", o.jobs, "Worker threads");
    cmd->add_flag("--record-time", o.record_time, "Write wall-clock times to traces");
    cmd->add_flag("--exclude-diverged", o.exclude_diverged, "Drop diverged runs from summaries");
    cmd->add_option("--checkpoint-step", o.checkpoint_step, "Evaluation spacing of curve checkpoints");
    cmd->add_option("--config", o.config, "TOML file of flag values (keys without dashes); command-line flags win")
        ->check(CLI::ExistingFile);
}

std::size_t categories_of(const Options& o)
{
    if (o.problem == "NK")
        return 2;
    if (o.problem == "NK3")
        return 3;
    return o.d;
}

ExperimentConfig to_config(const Options& o)
{
    ExperimentConfig c;
    c.optimizer = parse_optimizer(o.optimizer);
    c.instances.n = o.n;
    c.instances.k = o.k;
    c.instances.d = categories_of(o);
    c.instances.count = o.instance_count;
    for (const auto& f : o.instance_files)
        c.instances.files.emplace_back(f);
    c.runs_per_instance = o.runs;
    c.budget = o.budget;
    c.master_seed = o.seed;
    c.svgd.agents = o.m;
    c.svgd.samples_per_agent = o.lambda;
    c.svgd.temperature = o.gamma;
    c.svgd.step_size = o.epsilon;
    c.svgd.kernel.mode = parse_kernel(o.kernel);
    c.svgd.utility = parse_utility(o.utility);
    if (o.bandwidth > 0.0)
        c.svgd.kernel.fixed_bandwidth = o.bandwidth;
    else if (o.bandwidth < 0.0)
        throw ConfigError("--bandwidth must be positive");
    c.svgd.kernel.center_categorical = o.center;
    c.svgd.init_scale = o.init_scale;
    c.pbil.population = o.pbil_population;
    c.pbil.selection = o.pbil_selection;
    c.pbil.learning_rate = o.pbil_rate;
    c.pbil.mutation_prob = o.pbil_mutation;
    c.pbil.mutation_shift = o.pbil_shift;
    c.pbil.clamp = !o.pbil_no_clamp;
    c.out_dir = o.out;
    c.jobs = o.jobs;
    c.record_time = o.record_time;
    c.exclude_diverged = o.exclude_diverged;
    c.checkpoint_step = o.checkpoint_step;
    return c;
}

void print_summary(const std::string& label, const Summary& s)
{
    std::printf("%s: runs=%zu mean=%.4f sd=%.4f min=%.4f median=%.4f max=%.4f\n", label.c_str(), s.count, s.mean,
                s.stddev, s.min, s.median, s.max);
}

int status_of(bool diverged)
{
    return diverged ? kExitRuntime : kExitOk;
}

// Fills options the command line left unset from a TOML file. Keys are flag names without the
// leading dashes, either at top level or under a [<subcommand>] section.
void apply_config_file(CLI::App* cmd, const std::string& path)
{
    const auto items = CLI::ConfigTOML().from_file(path);
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--")
            continue;
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == cmd->get_name()))
            continue;
        CLI::Option* opt = cmd->get_option_no_throw("--" + item.name);
        if (opt == nullptr || item.name == "config")
            throw ConfigError("unknown key '" + item.name + "' in " + path);
        if (opt->count() > 0)
            continue;
        opt->add_result(item.inputs);
        opt->run_callback();
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-agent SVGD estimation-of-distribution optimizer on NK/NKD landscapes"};
    app.require_subcommand(1);
    Options o;

    auto* generate = app.add_subcommand("generate", "Write NKD instance files");
    add_instance_flags(generate, o);
    generate->add_option("--count", o.instance_count, "Instances to write");
    generate->add_option("--seed", o.seed, "Master seed");
    generate->add_option("--out", o.out, "Output directory")->required();

    auto* run_cmd = app.add_subcommand("run", "Run one experiment configuration");
    add_experiment_flags(run_cmd, o);

    std::vector<std::size_t> m_values;
    auto* sweep = app.add_subcommand("sweep-m", "Sweep the number of agents at fixed budget");
    add_experiment_flags(sweep, o);
    sweep->add_option("--m-values", m_values, "Agent counts")->delimiter(',');

    auto* ablate = app.add_subcommand("ablate-interaction", "RBF vs identity kernel on matched seeds");
    add_experiment_flags(ablate, o);

    std::vector<std::string> traces;
    std::string summary_out;
    auto* agg = app.add_subcommand("aggregate", "Summarize trace CSV files");
    agg->add_option("traces", traces, "Trace files")->required();
    agg->add_option("--checkpoint-step", o.checkpoint_step, "Evaluation spacing of curve checkpoints");
    agg->add_option("--out", summary_out, "Write summary JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*generate) {
            const std::size_t d = categories_of(o);
            fs::create_directories(o.out);
            for (std::size_t i = 0; i < o.instance_count; ++i) {
                const auto inst = generate_nkd(o.n, o.k, d, instance_seed(o.seed, i));
                const fs::path path = fs::path(o.out) / ("instance_" + std::to_string(i) + ".json");
                save(inst, path);
                std::printf("%s\n", path.string().c_str());
            }
            return kExitOk;
        }
        if (*agg) {
            std::vector<fs::path> files(traces.begin(), traces.end());
            const auto s = aggregate(files, o.checkpoint_step);
            const auto text = summary_json("aggregate", s);
            if (summary_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream(summary_out) << text;
                print_summary("aggregate", s);
            }
            return kExitOk;
        }

        for (auto* cmd : {run_cmd, sweep, ablate})
            if (*cmd && !o.config.empty())
                apply_config_file(cmd, o.config);
        const ExperimentConfig config = to_config(o);
        config.validate();
        if (*run_cmd) {
            const auto result = run_experiment(config);
            print_summary(result.label, result.summary);
            return status_of(result.any_diverged());
        }
        if (*sweep) {
            bool diverged = false;
            for (const auto& e : sweep_m(config, m_values)) {
                print_summary("m=" + std::to_string(e.agents) + " iterations=" + std::to_string(e.iterations),
                              e.result.summary);
                diverged = diverged || e.result.any_diverged();
            }
            return status_of(diverged);
        }
        if (*ablate) {
            const auto r = ablation_interaction(config);
            print_summary("rbf", r.interacting.summary);
            print_summary("identity", r.independent.summary);
            std::printf("mean paired difference %.5f, relative improvement %+.2f%%\n", r.mean_difference,
                        100.0 * r.relative_improvement);
            return status_of(r.interacting.any_diverged() || r.independent.any_diverged());
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ContractViolation& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
