#include "sveda/svgd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace sveda {

namespace {

constexpr std::uint64_t kAgentTag = 0x4147454E54ULL;  // "AGENT"
constexpr std::uint64_t kTieTag = 0x544945ULL;        // "TIE"
constexpr std::uint64_t kInitTag = 0x494E4954ULL;     // "INIT"
constexpr std::uint64_t kSampleTag = 0x53414D50ULL;   // "SAMP"

UtilityMatrix utilities_for(UtilityMode mode, const FitnessMatrix& fitness, CounterRng& tie_rng)
{
    switch (mode) {
    case UtilityMode::rank:
        return s_hat(global_ranks(fitness, tie_rng));
    case UtilityMode::raw:
        return fitness;
    case UtilityMode::unbiased:
        return unbiased_utilities(fitness, w_linear);
    }
    throw ContractViolation("unknown utility mode");
}

} // namespace

void SvgdConfig::validate() const
{
    if (agents < 1)
        throw ConfigError("need at least one agent");
    if (samples_per_agent < 1)
        throw ConfigError("need at least one sample per agent");
    if (utility == UtilityMode::unbiased && samples_per_agent < 2)
        throw ConfigError("unbiased utility needs at least two samples per agent");
    if (utility == UtilityMode::rank && agents * samples_per_agent < 2)
        throw ConfigError("rank utility needs at least two samples per iteration");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw ConfigError("temperature must be positive");
    if (!(step_size >= 0.0) || !std::isfinite(step_size))
        throw ConfigError("step size must be non-negative");
    if (!(init_scale >= 0.0) || !std::isfinite(init_scale))
        throw ConfigError("init scale must be non-negative");
    if (!(divergence_limit > 0.0))
        throw ConfigError("divergence limit must be positive");
    if (budget < agents * samples_per_agent)
        throw ConfigError("budget " + std::to_string(budget) + " is smaller than one iteration (" +
                          std::to_string(agents * samples_per_agent) + " evaluations)");
    try {
        kernel.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(e.what());
    }
}

RunStreams RunStreams::from_seed(std::uint64_t seed, std::size_t agents)
{
    RunStreams streams;
    streams.agent_keys.reserve(agents);
    for (std::size_t j = 0; j < agents; ++j)
        streams.agent_keys.push_back(derive_key(seed, {kAgentTag, j}));
    streams.tie_key = derive_key(seed, {kTieTag});
    return streams;
}

RunStreams RunStreams::single_agent(std::size_t j) const
{
    return RunStreams{{agent_keys.at(j)}, tie_key};
}

Population init_population(const SvgdConfig& config, const ModelSpec& model, std::vector<CounterRng>& agent_rngs)
{
    model.validate();
    if (agent_rngs.size() != config.agents)
        throw ContractViolation("need one init stream per agent");
    Population population;
    population.reserve(config.agents);
    for (auto& rng : agent_rngs) {
        std::vector<double> logits(model.param_size());
        for (double& v : logits)
            v = config.init_scale == 0.0 ? 0.0 : rng.uniform(-config.init_scale, config.init_scale);
        population.emplace_back(model, std::move(logits));
    }
    return population;
}

std::vector<std::vector<double>> estimate_boltzmann_grad(const SampleBatch& batch, const UtilityMatrix& utilities,
                                                         double temperature)
{
    if (!(temperature > 0.0))
        throw ContractViolation("temperature must be positive");
    if (utilities.rows() != batch.agents || utilities.cols() != batch.samples_per_agent ||
        batch.grads.size() != batch.agents * batch.samples_per_agent)
        throw ContractViolation("utilities and batch shapes differ");

    const double scale = 1.0 / (static_cast<double>(batch.samples_per_agent) * temperature);
    std::vector<std::vector<double>> out(batch.agents);
    for (std::size_t j = 0; j < batch.agents; ++j) {
        const std::size_t dim = batch.grad(j, 0).size();
        std::vector<double> acc(dim, 0.0);
        for (std::size_t l = 0; l < batch.samples_per_agent; ++l) {
            const auto& g = batch.grad(j, l);
            if (g.size() != dim)
                throw ContractViolation("score gradients of one agent differ in size");
            const double u = utilities(j, l);
            for (std::size_t c = 0; c < dim; ++c)
                acc[c] += u * g[c];
        }
        for (double& v : acc)
            v *= scale;
        out[j] = std::move(acc);
    }
    return out;
}

Population svgd_step(const Population& population, const std::vector<std::vector<double>>& boltzmann_grads,
                     const KernelEval& kernel, double step_size, std::size_t iteration, double limit)
{
    const std::size_t m = population.size();
    if (m == 0 || boltzmann_grads.size() != m || kernel.agents != m)
        throw ContractViolation("population, gradients and kernel disagree on agent count");
    const std::size_t dim = population.front().size();
    if (kernel.dim != dim)
        throw ContractViolation("kernel dimension does not match particles");
    for (const auto& g : boltzmann_grads)
        if (g.size() != dim)
            throw ContractViolation("gradient dimension does not match particles");

    const double coef = step_size / static_cast<double>(m);
    Population next = population;
    std::vector<double> direction(dim);
    for (std::size_t i = 0; i < m; ++i) {
        std::fill(direction.begin(), direction.end(), 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            const double k = kernel.gram(i, j);
            const auto& g = boltzmann_grads[j];
            const auto repulse = kernel.grad(i, j);
            for (std::size_t c = 0; c < dim; ++c)
                direction[c] += k * g[c] + repulse[c];
        }
        auto theta = next[i].logits();
        for (std::size_t c = 0; c < dim; ++c) {
            theta[c] += coef * direction[c];
            if (!std::isfinite(theta[c]) || std::fabs(theta[c]) > limit)
                throw Diverged(iteration, "logit " + std::to_string(c) + " of agent " + std::to_string(i) +
                                              " diverged");
        }
    }
    return next;
}

RunResult run(const Objective& objective, const ModelSpec& model, const SvgdConfig& config, const RunStreams& streams,
              const RunObserver& observer)
{
    config.validate();
    model.validate();
    const std::size_t m = config.agents;
    const std::size_t lambda = config.samples_per_agent;
    if (streams.agent_keys.size() != m)
        throw ConfigError("stream count does not match agent count");

    std::vector<CounterRng> init_rngs;
    std::vector<CounterRng> sample_rngs;
    for (std::uint64_t key : streams.agent_keys) {
        init_rngs.emplace_back(derive_key(key, {kInitTag}));
        sample_rngs.emplace_back(derive_key(key, {kSampleTag}));
    }
    CounterRng tie_rng(streams.tie_key);

    Population population = init_population(config, model, init_rngs);
    EvaluationCounter counter(objective);
    RunResult result;
    const std::size_t iterations = config.iterations();
    result.trace.reserve(iterations);

    SampleBatch batch;
    batch.agents = m;
    batch.samples_per_agent = lambda;
    batch.solutions.resize(m * lambda);
    batch.grads.resize(m * lambda);
    batch.fitness = FitnessMatrix(m, lambda);

    for (std::size_t t = 0; t < iterations; ++t) {
        const auto started = std::chrono::steady_clock::now();
        double fitness_sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t l = 0; l < lambda; ++l) {
                auto& x = batch.solutions[j * lambda + l];
                x = sample(population[j], sample_rngs[j]);
                const double f = counter(x);
                batch.fitness(j, l) = f;
                fitness_sum += f;
                batch.grads[j * lambda + l] = score_grad(population[j], x);
            }
        }

        const UtilityMatrix utilities = utilities_for(config.utility, batch.fitness, tie_rng);
        const auto grads = estimate_boltzmann_grad(batch, utilities, config.temperature);
        const KernelEval kernel = evaluate(config.kernel, population);

        IterationRecord record;
        record.iteration = t + 1;
        record.evaluations = counter.evaluations();
        record.best_so_far = counter.best_fitness();
        record.mean_fitness = fitness_sum / static_cast<double>(m * lambda);
        record.bandwidth = kernel.bandwidth;

        Population next;
        try {
            next = svgd_step(population, grads, kernel, config.step_size, t + 1, config.divergence_limit);
        } catch (const Diverged& e) {
            result.trace.push_back(record);
            result.best_solution = counter.best_solution();
            result.best_fitness = counter.best_fitness();
            result.evaluations = counter.evaluations();
            result.final_population = population;
            throw RunDiverged(e, std::move(result));
        }
        record.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        result.trace.push_back(record);

        if (observer.on_iteration)
            observer.on_iteration(IterationView{t + 1, population, batch, utilities, kernel, next});
        population = std::move(next);
    }

    result.best_solution = counter.best_solution();
    result.best_fitness = counter.best_fitness();
    result.evaluations = counter.evaluations();
    result.final_population = std::move(population);
    return result;
}

RunResult run(const Objective& objective, const ModelSpec& model, const SvgdConfig& config, std::uint64_t seed,
              const RunObserver& observer)
{
    return run(objective, model, config, RunStreams::from_seed(seed, config.agents), observer);
}

} // namespace sveda
