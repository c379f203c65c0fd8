#include "doctest.h"

#include <cmath>

#include "sveda/errors.hpp"
#include "sveda/kernel.hpp"

using namespace sveda;

namespace {

Population random_population(const ModelSpec& spec, std::size_t m, CounterRng& rng, double scale = 2.0)
{
    Population pop;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> logits(spec.param_size());
        for (double& v : logits)
            v = rng.uniform(-scale, scale);
        pop.emplace_back(spec, logits);
    }
    return pop;
}

double rbf(std::span<const double> a, std::span<const double> b, double h)
{
    double sq = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c)
        sq += (a[c] - b[c]) * (a[c] - b[c]);
    return std::exp(-sq / (2.0 * h * h));
}

} // namespace

TEST_CASE("pairwise squared distances")
{
    SUBCASE("identical particles")
    {
        Population pop(3, PolicyParams(ModelSpec::binary(4), {1.0, -2.0, 0.5, 0.0}));
        const auto sq = pairwise_sq_dists(pop);
        for (double v : sq.data())
            CHECK(v == 0.0);
    }
    SUBCASE("3-4-5 triangle")
    {
        Population pop{PolicyParams(ModelSpec::binary(2), {0.0, 0.0}), PolicyParams(ModelSpec::binary(2), {3.0, 4.0})};
        const auto d = pairwise_sq_dists(pop);
        CHECK(d(0, 1) == 25.0);
        CHECK(d(1, 0) == 25.0);
        CHECK(d(0, 0) == 0.0);
    }
    SUBCASE("matches a naive double loop")
    {
        CounterRng rng(1);
        const auto pop = random_population(ModelSpec::categorical(5, 3), 3, rng);
        const auto d = pairwise_sq_dists(pop);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                double naive = 0.0;
                for (std::size_t c = 0; c < pop[i].size(); ++c) {
                    const double diff = pop[i].logits()[c] - pop[j].logits()[c];
                    naive += diff * diff;
                }
                // the implementation sums in the same coordinate order
                CHECK(d(i, j) == naive);
            }
    }
    SUBCASE("mixed shapes are rejected")
    {
        Population pop{PolicyParams(ModelSpec::binary(2)), PolicyParams(ModelSpec::binary(3))};
        CHECK_THROWS_AS(pairwise_sq_dists(pop), ContractViolation);
    }
}

TEST_CASE("median bandwidth")
{
    Matrix<double> two(2, 2, 0.0);
    two(0, 1) = two(1, 0) = 2.0 * std::log(3.0);
    CHECK(median_bandwidth(two, 2) == doctest::Approx(1.0));

    CHECK(median_bandwidth(Matrix<double>(4, 4, 0.0), 4) == 1.0);

    Matrix<double> three(3, 3, 0.0);
    three(0, 1) = three(1, 0) = 1.0;
    three(0, 2) = three(2, 0) = 4.0;
    three(1, 2) = three(2, 1) = 9.0;
    CHECK(median_bandwidth(three, 3) == doctest::Approx(std::sqrt(4.0 / (2.0 * std::log(4.0)))));

    CHECK_THROWS_AS(median_bandwidth(Matrix<double>(1, 1, 0.0), 1), BandwidthUndefined);
}

TEST_CASE("rbf value at squared distance 2h^2 is 1/e")
{
    const double h = 1.7;
    const double offset = std::sqrt(2.0) * h;
    Population pop{PolicyParams(ModelSpec::binary(1), {0.0}), PolicyParams(ModelSpec::binary(1), {offset})};
    KernelConfig config;
    config.fixed_bandwidth = h;
    const auto eval = evaluate(config, pop);
    CHECK(eval.gram(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(eval.bandwidth == h);
}

TEST_CASE("kernel laws on random populations")
{
    CounterRng rng(2);
    for (int trial = 0; trial < 40; ++trial) {
        const auto spec = trial % 2 == 0 ? ModelSpec::binary(6) : ModelSpec::categorical(3, 3);
        const std::size_t m = 2 + rng.below(6);
        const auto pop = random_population(spec, m, rng);
        const auto eval = evaluate(KernelConfig{}, pop);
        CHECK(eval.bandwidth > 0.0);
        CHECK(std::isfinite(eval.bandwidth));
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(eval.gram(i, i) == 1.0);
            for (double g : eval.grad(i, i))
                CHECK(g == 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                CHECK(eval.gram(i, j) == eval.gram(j, i));
                CHECK(eval.gram(i, j) > 0.0);
                CHECK(eval.gram(i, j) <= 1.0);
                const auto gij = eval.grad(i, j);
                const auto gji = eval.grad(j, i);
                for (std::size_t c = 0; c < eval.dim; ++c)
                    CHECK(gij[c] == -gji[c]);
            }
        }
    }
}

TEST_CASE("kernel gradient matches finite differences in the second argument")
{
    CounterRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pop = random_population(ModelSpec::categorical(3, 3), 4, rng);
        const auto eval = evaluate(KernelConfig{}, pop);
        const double h = eval.bandwidth;
        const double step = 1e-5;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                std::vector<double> tj(pop[j].logits().begin(), pop[j].logits().end());
                for (std::size_t c = 0; c < tj.size(); ++c) {
                    auto up = tj, down = tj;
                    up[c] += step;
                    down[c] -= step;
                    const double fd = (rbf(pop[i].logits(), up, h) - rbf(pop[i].logits(), down, h)) / (2.0 * step);
                    CHECK(std::fabs(fd - eval.grad(i, j)[c]) < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("identity mode")
{
    CounterRng rng(4);
    const auto pop = random_population(ModelSpec::binary(5), 4, rng);
    KernelConfig config;
    config.mode = KernelMode::identity;
    const auto eval = evaluate(config, pop);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(eval.gram(i, j) == (i == j ? 1.0 : 0.0));
    for (double g : eval.grads)
        CHECK(g == 0.0);
    CHECK(std::isnan(eval.bandwidth));
}

TEST_CASE("a single particle needs no bandwidth")
{
    Population pop{PolicyParams(ModelSpec::binary(3), {1.0, 2.0, 3.0})};
    const auto eval = evaluate(KernelConfig{}, pop);
    CHECK(eval.gram(0, 0) == 1.0);
    for (double g : eval.grads)
        CHECK(g == 0.0);
}

TEST_CASE("fixed bandwidth must be positive")
{
    KernelConfig config;
    config.fixed_bandwidth = 0.0;
    Population pop(2, PolicyParams(ModelSpec::binary(1)));
    CHECK_THROWS_AS(evaluate(config, pop), ContractViolation);
}

TEST_CASE("categorical centering removes per-variable shifts")
{
    CounterRng rng(5);
    auto pop = random_population(ModelSpec::categorical(4, 3), 3, rng);
    KernelConfig centered;
    centered.center_categorical = true;
    const auto before = evaluate(centered, pop);

    // Shift every logit of variable 1 in particle 2 by the same amount: softmax is unchanged.
    auto shifted = pop;
    for (std::size_t d = 0; d < 3; ++d)
        shifted[2].logits()[3 + d] += 2.5;
    const auto after = evaluate(centered, shifted);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(after.gram(i, j) == doctest::Approx(before.gram(i, j)).epsilon(1e-12));

    const auto raw = evaluate(KernelConfig{}, shifted);
    CHECK(raw.gram(0, 2) != doctest::Approx(after.gram(0, 2)).epsilon(1e-6));

    PolicyParams binary(ModelSpec::binary(3), {1.0, 2.0, 3.0});
    CHECK(centered_logits(binary) == std::vector<double>{1.0, 2.0, 3.0});
}
