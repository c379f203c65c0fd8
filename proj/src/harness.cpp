#include "sveda/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "sveda/errors.hpp"
#include "sveda/rng.hpp"

namespace sveda {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kInstanceTag = 0x494E5354ULL;  // "INST"
constexpr std::uint64_t kRunTag = 0x52554EULL;         // "RUN"

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string padded(std::size_t v, int width = 3)
{
    std::string s = std::to_string(v);
    if (static_cast<int>(s.size()) < width)
        s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    return s;
}

double quantile(const std::vector<double>& sorted, double p)
{
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

std::string experiment_label(const ExperimentConfig& config)
{
    std::ostringstream label;
    label << to_string(config.optimizer);
    if (config.instances.from_files())
        label << " files=" << config.instances.files.size();
    else
        label << " n=" << config.instances.n << " k=" << config.instances.k << " d=" << config.instances.d;
    if (config.optimizer == OptimizerKind::svgd_eda || config.optimizer == OptimizerKind::svgd_eda_independent)
        label << " m=" << config.svgd.agents << " lambda=" << config.svgd.samples_per_agent;
    label << " budget=" << config.budget;
    return label.str();
}

nlohmann::ordered_json summary_to_json(const Summary& s)
{
    nlohmann::ordered_json j;
    j["count"] = s.count;
    j["mean"] = s.mean;
    j["stddev"] = s.stddev;
    j["min"] = s.min;
    j["q1"] = s.q1;
    j["median"] = s.median;
    j["q3"] = s.q3;
    j["max"] = s.max;
    auto curve = nlohmann::ordered_json::array();
    for (const auto& c : s.curve)
        curve.push_back({{"evaluations", c.evaluations}, {"mean_best", c.mean_best}, {"runs", c.runs}});
    j["curve"] = std::move(curve);
    return j;
}

RunOutcome run_one(const ExperimentConfig& config, const NkdInstance& instance, std::size_t instance_id,
                   std::size_t run_id)
{
    const Objective objective = [&instance](const Solution& x) { return evaluate(instance, x); };
    const ModelSpec model = instance.model();
    const std::uint64_t seed = run_seed(config.master_seed, instance_id, run_id);

    RunOutcome out;
    out.instance_id = instance_id;
    out.run_id = run_id;
    switch (config.optimizer) {
    case OptimizerKind::svgd_eda:
    case OptimizerKind::svgd_eda_independent: {
        SvgdConfig svgd = config.svgd;
        svgd.budget = config.budget;
        if (config.optimizer == OptimizerKind::svgd_eda_independent)
            svgd.kernel.mode = KernelMode::identity;
        try {
            auto result = run(objective, model, svgd, seed);
            out.final_best = result.best_fitness;
            out.evaluations = result.evaluations;
            out.trace = std::move(result.trace);
        } catch (const RunDiverged& e) {
            out.diverged = true;
            out.message = e.what();
            out.final_best = e.partial().best_fitness;
            out.evaluations = e.partial().evaluations;
            out.trace = e.partial().trace;
        }
        break;
    }
    case OptimizerKind::pbil: {
        PbilConfig pbil = config.pbil;
        pbil.budget = config.budget;
        auto result = pbil_run(objective, model, pbil, seed);
        out.final_best = result.best_fitness;
        out.evaluations = result.evaluations;
        out.trace = std::move(result.trace);
        break;
    }
    case OptimizerKind::random: {
        auto result = random_search_run(objective, model, config.budget, seed, config.random_batch);
        out.final_best = result.best_fitness;
        out.evaluations = result.evaluations;
        out.trace = std::move(result.trace);
        break;
    }
    }
    return out;
}

std::vector<double> finals_of(const ExperimentResult& result, bool exclude_diverged)
{
    std::vector<double> finals;
    for (const auto& r : result.runs)
        if (!(exclude_diverged && r.diverged))
            finals.push_back(r.final_best);
    return finals;
}

} // namespace

std::string to_string(OptimizerKind kind)
{
    switch (kind) {
    case OptimizerKind::svgd_eda:
        return "svgd-eda";
    case OptimizerKind::svgd_eda_independent:
        return "svgd-eda-independent";
    case OptimizerKind::pbil:
        return "pbil";
    case OptimizerKind::random:
        return "random";
    }
    return "unknown";
}

OptimizerKind parse_optimizer(const std::string& name)
{
    for (auto kind : {OptimizerKind::svgd_eda, OptimizerKind::svgd_eda_independent, OptimizerKind::pbil,
                      OptimizerKind::random})
        if (to_string(kind) == name)
            return kind;
    throw ConfigError("unknown optimizer '" + name + "'");
}

std::string to_string(UtilityMode mode)
{
    switch (mode) {
    case UtilityMode::rank:
        return "rank";
    case UtilityMode::raw:
        return "raw";
    case UtilityMode::unbiased:
        return "unbiased";
    }
    return "unknown";
}

UtilityMode parse_utility(const std::string& name)
{
    for (auto mode : {UtilityMode::rank, UtilityMode::raw, UtilityMode::unbiased})
        if (to_string(mode) == name)
            return mode;
    throw ConfigError("unknown utility mode '" + name + "'");
}

std::string to_string(KernelMode mode)
{
    return mode == KernelMode::rbf ? "rbf" : "identity";
}

KernelMode parse_kernel(const std::string& name)
{
    if (name == "rbf")
        return KernelMode::rbf;
    if (name == "identity")
        return KernelMode::identity;
    throw ConfigError("unknown kernel '" + name + "'");
}

void ExperimentConfig::validate() const
{
    if (runs_per_instance < 1)
        throw ConfigError("runs per instance must be at least 1");
    if (budget < 1)
        throw ConfigError("budget must be positive");
    if (jobs < 1)
        throw ConfigError("jobs must be at least 1");
    if (checkpoint_step < 1)
        throw ConfigError("checkpoint step must be at least 1");
    if (instances.from_files()) {
        for (const auto& f : instances.files)
            if (!fs::exists(f))
                throw ConfigError("instance file " + f.string() + " does not exist");
    } else {
        if (instances.count < 1)
            throw ConfigError("instance count must be at least 1");
        if (instances.n < 1 || instances.d < 2 || instances.k >= instances.n)
            throw ConfigError("instance parameters need n >= 1, d >= 2, k < n");
        if (categories && *categories != instances.d)
            throw ConfigError("model categories do not match instance d");
    }
    switch (optimizer) {
    case OptimizerKind::svgd_eda:
    case OptimizerKind::svgd_eda_independent: {
        SvgdConfig svgd_check = svgd;
        svgd_check.budget = budget;
        svgd_check.validate();
        break;
    }
    case OptimizerKind::pbil: {
        PbilConfig pbil_check = pbil;
        pbil_check.budget = budget;
        pbil_check.validate();
        if (!instances.from_files() && instances.d != 2)
            throw ConfigError("pbil only supports binary (d=2) instances");
        break;
    }
    case OptimizerKind::random:
        if (random_batch < 1)
            throw ConfigError("random batch must be at least 1");
        break;
    }
}

std::uint64_t instance_seed(std::uint64_t master_seed, std::size_t instance_id)
{
    return derive_key(master_seed, {kInstanceTag, instance_id});
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t instance_id, std::size_t run_index)
{
    return derive_key(master_seed, {kRunTag, instance_id, run_index});
}

std::vector<NkdInstance> materialize_instances(const ExperimentConfig& config)
{
    std::vector<NkdInstance> out;
    if (config.instances.from_files()) {
        for (const auto& f : config.instances.files)
            out.push_back(load(f));
    } else {
        for (std::size_t i = 0; i < config.instances.count; ++i)
            out.push_back(generate_nkd(config.instances.n, config.instances.k, config.instances.d,
                                       instance_seed(config.master_seed, i)));
    }
    for (const auto& inst : out) {
        if (config.categories && inst.d != *config.categories)
            throw ConfigError("instance d=" + std::to_string(inst.d) + " does not match the configured model");
        if (config.optimizer == OptimizerKind::pbil && inst.d != 2)
            throw ConfigError("pbil only supports binary (d=2) instances");
    }
    return out;
}

std::optional<double> best_at(const std::vector<IterationRecord>& trace, std::size_t evaluations)
{
    const auto it = std::upper_bound(trace.begin(), trace.end(), evaluations,
                                     [](std::size_t e, const IterationRecord& r) { return e < r.evaluations; });
    if (it == trace.begin())
        return std::nullopt;
    return std::prev(it)->best_so_far;
}

Summary summarize(const std::vector<double>& finals, const std::vector<std::vector<IterationRecord>>& traces,
                  std::size_t step)
{
    Summary s;
    s.count = finals.size();
    if (!finals.empty()) {
        std::vector<double> sorted = finals;
        std::sort(sorted.begin(), sorted.end());
        double total = 0.0;
        for (double v : sorted)
            total += v;
        s.mean = total / static_cast<double>(sorted.size());
        double sq = 0.0;
        for (double v : sorted)
            sq += (v - s.mean) * (v - s.mean);
        s.stddev = sorted.size() > 1 ? std::sqrt(sq / static_cast<double>(sorted.size() - 1)) : 0.0;
        s.min = sorted.front();
        s.max = sorted.back();
        s.q1 = quantile(sorted, 0.25);
        s.median = quantile(sorted, 0.5);
        s.q3 = quantile(sorted, 0.75);
        // Rounding in the sum can put the mean a hair outside [min, max] when all values are equal.
        s.mean = std::clamp(s.mean, s.min, s.max);
    }

    std::size_t horizon = 0;
    for (const auto& t : traces)
        if (!t.empty())
            horizon = std::max(horizon, t.back().evaluations);
    if (step == 0)
        return s;
    for (std::size_t c = step; c <= horizon; c += step) {
        Checkpoint cp;
        cp.evaluations = c;
        double total = 0.0;
        for (const auto& t : traces) {
            if (auto v = best_at(t, c)) {
                total += *v;
                ++cp.runs;
            }
        }
        if (cp.runs == 0)
            continue;
        cp.mean_best = total / static_cast<double>(cp.runs);
        s.curve.push_back(cp);
    }
    return s;
}

bool ExperimentResult::any_diverged() const
{
    return std::any_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.diverged; });
}

void write_trace(const fs::path& path, std::size_t run_id, std::size_t instance_id,
                 const std::vector<IterationRecord>& trace, bool record_time)
{
    std::string text = std::string(kTraceHeader) + "\n";
    for (const auto& r : trace) {
        text += std::to_string(run_id) + "," + std::to_string(instance_id) + "," + std::to_string(r.iteration) + "," +
                std::to_string(r.evaluations) + "," + format_number(r.best_so_far) + "," +
                format_number(r.mean_fitness) + "," + format_number(r.bandwidth) + "," +
                format_number(record_time ? r.wall_ms : 0.0) + "\n";
    }
    write_text(path, text);
}

std::vector<IterationRecord> read_trace(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw AggregationError(path.string() + ": cannot open trace file");
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
        throw AggregationError(path.string() + ": unexpected header (schema mismatch)");

    std::vector<IterationRecord> trace;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            fields.push_back(field);
        if (fields.size() != 8)
            throw AggregationError(path.string() + ":" + std::to_string(lineno) + ": expected 8 columns");
        IterationRecord r;
        try {
            r.iteration = std::stoull(fields[2]);
            r.evaluations = std::stoull(fields[3]);
            r.best_so_far = std::stod(fields[4]);
            r.mean_fitness = std::stod(fields[5]);
            r.bandwidth = fields[6] == "nan" ? std::nan("") : std::stod(fields[6]);
            r.wall_ms = std::stod(fields[7]);
        } catch (const std::exception&) {
            throw AggregationError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
        }
        if (!trace.empty() && r.evaluations <= trace.back().evaluations)
            throw AggregationError(path.string() + ":" + std::to_string(lineno) +
                                   ": evaluations must be strictly increasing");
        trace.push_back(r);
    }
    return trace;
}

Summary aggregate(const std::vector<fs::path>& trace_files, std::size_t step)
{
    if (trace_files.empty())
        throw AggregationError("no trace files given");
    std::vector<std::vector<IterationRecord>> traces;
    std::vector<double> finals;
    for (const auto& f : trace_files) {
        auto t = read_trace(f);
        if (t.empty())
            throw AggregationError(f.string() + ": trace has no rows");
        finals.push_back(t.back().best_so_far);
        traces.push_back(std::move(t));
    }
    return summarize(finals, traces, step);
}

std::string summary_json(const std::string& label, const Summary& summary)
{
    nlohmann::ordered_json doc;
    doc[label] = summary_to_json(summary);
    return doc.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const auto instances = materialize_instances(config);

    ExperimentResult result;
    result.label = experiment_label(config);
    const std::size_t runs = config.runs_per_instance;
    const std::size_t total = instances.size() * runs;
    result.runs.resize(total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= total)
                return;
            try {
                result.runs[job] = run_one(config, instances[job / runs], job / runs, job % runs);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = total;
            }
        }
    };
    const std::size_t width = std::min(config.jobs, total);
    if (width <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < width; ++w)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<std::vector<IterationRecord>> traces;
    for (const auto& r : result.runs)
        if (!(config.exclude_diverged && r.diverged))
            traces.push_back(r.trace);
    result.summary = summarize(finals_of(result, config.exclude_diverged), traces, config.checkpoint_step);

    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir / "traces");
        std::string finals = "instance_id,run_id,status,final_best,evaluations\n";
        auto runs_json = nlohmann::ordered_json::array();
        for (const auto& r : result.runs) {
            write_trace(config.out_dir / "traces" /
                            ("instance_" + padded(r.instance_id) + "_run_" + padded(r.run_id) + ".csv"),
                        r.run_id, r.instance_id, r.trace, config.record_time);
            const char* status = r.diverged ? "diverged" : "ok";
            finals += std::to_string(r.instance_id) + "," + std::to_string(r.run_id) + "," + status + "," +
                      format_number(r.final_best) + "," + std::to_string(r.evaluations) + "\n";
            nlohmann::ordered_json entry{{"instance_id", r.instance_id},
                                         {"run_id", r.run_id},
                                         {"status", status},
                                         {"final_best", r.final_best},
                                         {"evaluations", r.evaluations}};
            if (r.diverged)
                entry["message"] = r.message;
            runs_json.push_back(std::move(entry));
        }
        write_text(config.out_dir / "finals.csv", finals);
        nlohmann::ordered_json doc;
        doc[result.label] = summary_to_json(result.summary);
        doc[result.label]["runs"] = std::move(runs_json);
        write_text(config.out_dir / "summary.json", doc.dump(2) + "\n");
    }
    return result;
}

std::vector<SweepEntry> sweep_m(const ExperimentConfig& config, const std::vector<std::size_t>& agent_counts)
{
    if (config.optimizer != OptimizerKind::svgd_eda)
        throw ConfigError("sweep-m requires the svgd-eda optimizer");
    if (agent_counts.empty())
        throw ConfigError("sweep-m needs at least one agent count");

    std::vector<SweepEntry> entries;
    for (std::size_t m : agent_counts) {
        ExperimentConfig cfg = config;
        cfg.svgd.agents = m;
        if (!config.out_dir.empty())
            cfg.out_dir = config.out_dir / ("m_" + padded(m, 2));
        SweepEntry entry;
        entry.agents = m;
        entry.iterations = config.budget / (m * config.svgd.samples_per_agent);
        entry.result = run_experiment(cfg);
        entries.push_back(std::move(entry));
    }

    if (!config.out_dir.empty()) {
        std::string summary = "m,iterations,count,mean,stddev,min,q1,median,q3,max\n";
        std::string finals = "m,instance_id,run_id,status,final_best\n";
        for (const auto& e : entries) {
            const auto& s = e.result.summary;
            summary += std::to_string(e.agents) + "," + std::to_string(e.iterations) + "," +
                       std::to_string(s.count) + "," + format_number(s.mean) + "," + format_number(s.stddev) + "," +
                       format_number(s.min) + "," + format_number(s.q1) + "," + format_number(s.median) + "," +
                       format_number(s.q3) + "," + format_number(s.max) + "\n";
            for (const auto& r : e.result.runs)
                finals += std::to_string(e.agents) + "," + std::to_string(r.instance_id) + "," +
                          std::to_string(r.run_id) + "," + (r.diverged ? "diverged" : "ok") + "," +
                          format_number(r.final_best) + "\n";
        }
        write_text(config.out_dir / "sweep_summary.csv", summary);
        write_text(config.out_dir / "sweep_finals.csv", finals);
    }
    return entries;
}

AblationResult ablation_interaction(const ExperimentConfig& config)
{
    if (config.optimizer != OptimizerKind::svgd_eda)
        throw ConfigError("ablate-interaction requires the svgd-eda optimizer");

    ExperimentConfig interacting = config;
    interacting.svgd.kernel.mode = KernelMode::rbf;
    ExperimentConfig independent = config;
    independent.optimizer = OptimizerKind::svgd_eda_independent;
    if (!config.out_dir.empty()) {
        interacting.out_dir = config.out_dir / "rbf";
        independent.out_dir = config.out_dir / "identity";
    }

    AblationResult out;
    out.interacting = run_experiment(interacting);
    out.independent = run_experiment(independent);

    const std::size_t instances = out.interacting.runs.empty()
                                      ? 0
                                      : out.interacting.runs.back().instance_id + 1;
    double diff_total = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
        InstancePair pair;
        pair.instance_id = i;
        std::size_t na = 0, nb = 0;
        for (const auto& r : out.interacting.runs)
            if (r.instance_id == i && !(config.exclude_diverged && r.diverged)) {
                pair.mean_interacting += r.final_best;
                ++na;
            }
        for (const auto& r : out.independent.runs)
            if (r.instance_id == i && !(config.exclude_diverged && r.diverged)) {
                pair.mean_independent += r.final_best;
                ++nb;
            }
        if (na == 0 || nb == 0)
            continue;
        pair.mean_interacting /= static_cast<double>(na);
        pair.mean_independent /= static_cast<double>(nb);
        pair.difference = pair.mean_interacting - pair.mean_independent;
        diff_total += pair.difference;
        out.pairs.push_back(pair);
    }
    if (!out.pairs.empty())
        out.mean_difference = diff_total / static_cast<double>(out.pairs.size());
    const double base = out.independent.summary.mean;
    out.relative_improvement = base != 0.0 ? (out.interacting.summary.mean - base) / base : 0.0;

    if (!config.out_dir.empty()) {
        std::string pairs = "instance_id,mean_rbf,mean_identity,difference\n";
        auto pairs_json = nlohmann::ordered_json::array();
        for (const auto& p : out.pairs) {
            pairs += std::to_string(p.instance_id) + "," + format_number(p.mean_interacting) + "," +
                     format_number(p.mean_independent) + "," + format_number(p.difference) + "\n";
            pairs_json.push_back({{"instance_id", p.instance_id},
                                  {"mean_rbf", p.mean_interacting},
                                  {"mean_identity", p.mean_independent},
                                  {"difference", p.difference}});
        }
        write_text(config.out_dir / "ablation_pairs.csv", pairs);
        nlohmann::ordered_json doc;
        doc["rbf"] = summary_to_json(out.interacting.summary);
        doc["identity"] = summary_to_json(out.independent.summary);
        doc["pairs"] = std::move(pairs_json);
        doc["mean_difference"] = out.mean_difference;
        doc["relative_improvement"] = out.relative_improvement;
        write_text(config.out_dir / "ablation.json", doc.dump(2) + "\n");
    }
    return out;
}

} // namespace sveda
