#include "doctest.h"

#include <cmath>

#include "sveda/baselines.hpp"
#include "sveda/errors.hpp"
#include "sveda/landscapes.hpp"

using namespace sveda;

TEST_CASE("PBIL with full learning rate copies the selected sample")
{
    PbilConfig config;
    config.population = 1;
    config.learning_rate = 1.0;
    config.mutation_prob = 0.0;
    config.budget = 20;
    std::vector<Solution> seen;
    const Objective f = [&](const Solution& x) {
        seen.push_back(x);
        return one_max(x);
    };
    std::size_t generations = 0;
    pbil_run(f, ModelSpec::binary(12), config, 4, [&](std::size_t g, std::span<const double> p) {
        ++generations;
        const auto& x = seen.at(g - 1);
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK(p[i] == (x[i] == 1 ? kPbilCeiling : kPbilFloor));
    });
    CHECK(generations == 20);
}

TEST_CASE("PBIL solves OneMax n=16 on every seed")
{
    PbilConfig config;
    config.budget = 5000;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        CHECK(pbil_run(one_max, ModelSpec::binary(16), config, seed).best_fitness == 1.0);
}

TEST_CASE("PBIL probabilities stay inside the clamp and average 0.5 on a flat objective")
{
    PbilConfig config;
    config.budget = 64 * 50;
    // Drift moves individual runs; the expectation over seeds stays at 0.5.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed)
        pbil_run([](const Solution&) { return 0.0; }, ModelSpec::binary(32), config, seed,
                 [&](std::size_t g, std::span<const double> p) {
                     for (double v : p) {
                         CHECK(v >= kPbilFloor);
                         CHECK(v <= kPbilCeiling);
                         if (g == 50) {
                             sum += v;
                             ++count;
                         }
                     }
                 });
    CHECK(count == 40 * 32);
    CHECK(std::fabs(sum / static_cast<double>(count) - 0.5) < 0.03);

    const auto inst = generate_nkd(24, 4, 2, 3);
    pbil_run([&](const Solution& x) { return evaluate(inst, x); }, inst.model(), config, 8,
             [&](std::size_t, std::span<const double> p) {
                 for (double v : p) {
                     CHECK(v >= kPbilFloor);
                     CHECK(v <= kPbilCeiling);
                 }
             });
}

TEST_CASE("PBIL evaluation accounting and model support")
{
    PbilConfig config;
    config.budget = 1000;
    const auto r = pbil_run(one_max, ModelSpec::binary(8), config, 1);
    CHECK(r.evaluations == 15 * 64);
    CHECK(r.trace.size() == 15);
    CHECK_THROWS_AS(pbil_run(one_max, ModelSpec::categorical(8, 3), config, 1), UnsupportedModel);
    config.selection = 65;
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("random search")
{
    const auto inst = generate_nkd(10, 3, 2, 2);
    const Objective f = [&](const Solution& x) { return evaluate(inst, x); };
    const double opt = enumerate_optimum(inst).second;

    SUBCASE("a budget of one is a single uniform sample")
    {
        Solution seen;
        const auto r = random_search_run([&](const Solution& x) {
            seen = x;
            return f(x);
        }, inst.model(), 1, 5);
        CHECK(r.evaluations == 1);
        CHECK(r.best_solution == seen);
        CHECK(r.best_fitness == f(seen));
    }
    SUBCASE("exact budget with a partial last batch")
    {
        std::size_t calls = 0;
        const auto r = random_search_run([&](const Solution& x) {
            ++calls;
            return f(x);
        }, inst.model(), 250, 6);
        CHECK(calls == 250);
        CHECK(r.trace.size() == 3);
        CHECK(r.trace.back().evaluations == 250);
        CHECK(r.best_fitness <= opt);
        for (std::size_t t = 1; t < r.trace.size(); ++t)
            CHECK(r.trace[t].best_so_far >= r.trace[t - 1].best_so_far);
    }
    SUBCASE("categorical models are supported")
    {
        const auto r = random_search_run([](const Solution& x) { return static_cast<double>(x[0]); },
                                         ModelSpec::categorical(3, 4), 400, 7);
        CHECK(r.best_fitness == 3.0);
    }
}
