#include "sveda/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "sveda/errors.hpp"
#include "sveda/rng.hpp"

namespace sveda {

namespace {

constexpr std::uint64_t kPbilSampleTag = 0x5042494CULL;  // "PBIL"
constexpr std::uint64_t kPbilMutateTag = 0x4D555441ULL;  // "MUTA"
constexpr std::uint64_t kRandomTag = 0x52414E44ULL;      // "RAND"

double elapsed_ms(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

} // namespace

void PbilConfig::validate() const
{
    if (population < 1)
        throw ConfigError("PBIL population must be at least 1");
    if (selection < 1 || selection > population)
        throw ConfigError("PBIL selection size must be in [1, population]");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
        throw ConfigError("PBIL learning rate must be in (0, 1]");
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
        throw ConfigError("PBIL mutation probability must be in [0, 1]");
    if (!(mutation_shift >= 0.0 && mutation_shift <= 1.0))
        throw ConfigError("PBIL mutation shift must be in [0, 1]");
    if (budget < population)
        throw ConfigError("PBIL budget is smaller than one generation");
}

BaselineResult pbil_run(const Objective& objective, const ModelSpec& model, const PbilConfig& config,
                        std::uint64_t seed, const PbilObserver& observer)
{
    if (model.kind != ModelKind::binary)
        throw UnsupportedModel("PBIL only supports binary search spaces");
    model.validate();
    config.validate();

    CounterRng sample_rng(derive_key(seed, {kPbilSampleTag}));
    CounterRng mutate_rng(derive_key(seed, {kPbilMutateTag}));
    const std::size_t n = model.n;
    std::vector<double> probs(n, 0.5);
    EvaluationCounter counter(objective);
    BaselineResult result;

    std::vector<Solution> pop(config.population, Solution(n));
    std::vector<double> fitness(config.population);
    std::vector<std::size_t> order(config.population);
    std::vector<double> target(n);

    for (std::size_t g = 0; g < config.generations(); ++g) {
        const auto started = std::chrono::steady_clock::now();
        double fitness_sum = 0.0;
        for (std::size_t s = 0; s < config.population; ++s) {
            for (std::size_t l = 0; l < n; ++l)
                pop[s][l] = sample_rng.uniform01() < probs[l] ? 1 : 0;
            fitness[s] = counter(pop[s]);
            fitness_sum += fitness[s];
        }

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
        std::fill(target.begin(), target.end(), 0.0);
        for (std::size_t s = 0; s < config.selection; ++s)
            for (std::size_t l = 0; l < n; ++l)
                target[l] += pop[order[s]][l];
        for (std::size_t l = 0; l < n; ++l) {
            target[l] /= static_cast<double>(config.selection);
            probs[l] = (1.0 - config.learning_rate) * probs[l] + config.learning_rate * target[l];
            if (config.mutation_prob > 0.0 && mutate_rng.uniform01() < config.mutation_prob) {
                const double direction = mutate_rng.uniform01() < 0.5 ? 0.0 : 1.0;
                probs[l] = (1.0 - config.mutation_shift) * probs[l] + config.mutation_shift * direction;
            }
            if (config.clamp)
                probs[l] = std::clamp(probs[l], kPbilFloor, kPbilCeiling);
        }

        IterationRecord record;
        record.iteration = g + 1;
        record.evaluations = counter.evaluations();
        record.best_so_far = counter.best_fitness();
        record.mean_fitness = fitness_sum / static_cast<double>(config.population);
        record.wall_ms = elapsed_ms(started);
        result.trace.push_back(record);
        if (observer)
            observer(g + 1, probs);
    }

    result.best_solution = counter.best_solution();
    result.best_fitness = counter.best_fitness();
    result.evaluations = counter.evaluations();
    return result;
}

BaselineResult random_search_run(const Objective& objective, const ModelSpec& model, std::size_t budget,
                                 std::uint64_t seed, std::size_t batch)
{
    model.validate();
    if (budget < 1)
        throw ConfigError("random search budget must be at least 1");
    if (batch < 1)
        throw ConfigError("random search batch must be at least 1");

    CounterRng rng(derive_key(seed, {kRandomTag}));
    EvaluationCounter counter(objective);
    BaselineResult result;
    Solution x(model.n);
    std::size_t iteration = 0;
    while (counter.evaluations() < budget) {
        const auto started = std::chrono::steady_clock::now();
        const std::size_t size = std::min(batch, budget - counter.evaluations());
        double fitness_sum = 0.0;
        for (std::size_t s = 0; s < size; ++s) {
            for (auto& v : x)
                v = static_cast<int>(rng.below(model.categories));
            fitness_sum += counter(x);
        }
        IterationRecord record;
        record.iteration = ++iteration;
        record.evaluations = counter.evaluations();
        record.best_so_far = counter.best_fitness();
        record.mean_fitness = fitness_sum / static_cast<double>(size);
        record.wall_ms = elapsed_ms(started);
        result.trace.push_back(record);
    }
    result.best_solution = counter.best_solution();
    result.best_fitness = counter.best_fitness();
    result.evaluations = counter.evaluations();
    return result;
}

} // namespace sveda
