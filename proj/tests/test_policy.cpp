#include "doctest.h"

#include <cmath>
#include <numeric>

#include "sveda/errors.hpp"
#include "sveda/policy.hpp"

using namespace sveda;

namespace {

PolicyParams random_params(const ModelSpec& spec, CounterRng& rng, double scale)
{
    std::vector<double> logits(spec.param_size());
    for (double& v : logits)
        v = rng.uniform(-scale, scale);
    return PolicyParams(spec, logits);
}

Solution random_solution(const ModelSpec& spec, CounterRng& rng)
{
    Solution x(spec.n);
    for (auto& v : x)
        v = static_cast<int>(rng.below(spec.categories));
    return x;
}

// Per-coordinate probabilities written out directly from the model definition.
double direct_probability(const PolicyParams& p, const Solution& x)
{
    const auto& spec = p.spec();
    const auto t = p.logits();
    double prob = 1.0;
    for (std::size_t l = 0; l < spec.n; ++l) {
        if (spec.kind == ModelKind::binary) {
            const double s = 1.0 / (1.0 + std::exp(-t[l]));
            prob *= x[l] == 1 ? s : 1.0 - s;
        } else {
            double denom = 0.0;
            for (std::size_t d = 0; d < spec.categories; ++d)
                denom += std::exp(t[l * spec.categories + d]);
            prob *= std::exp(t[l * spec.categories + static_cast<std::size_t>(x[l])]) / denom;
        }
    }
    return prob;
}

double max_fd_error(const PolicyParams& params, const Solution& x, double step)
{
    const auto analytic = score_grad(params, x);
    double worst = 0.0;
    std::vector<double> logits(params.logits().begin(), params.logits().end());
    for (std::size_t c = 0; c < logits.size(); ++c) {
        auto up = logits, down = logits;
        up[c] += step;
        down[c] -= step;
        const double fd = (log_prob(PolicyParams(params.spec(), up), x) -
                           log_prob(PolicyParams(params.spec(), down), x)) / (2.0 * step);
        worst = std::max(worst, std::fabs(fd - analytic[c]));
    }
    return worst;
}

} // namespace

TEST_CASE("binary sampling at zero logits is a fair coin")
{
    PolicyParams p(ModelSpec::binary(10));
    CounterRng rng(1);
    double ones = 0.0;
    const int draws = 5000;
    for (int i = 0; i < draws; ++i) {
        const auto x = sample(p, rng);
        ones += std::accumulate(x.begin(), x.end(), 0);
    }
    CHECK(ones / (10.0 * draws) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("saturated logit always samples one")
{
    PolicyParams p(ModelSpec::binary(3), {40.0, 40.0, 40.0});
    CounterRng rng(2);
    for (int i = 0; i < 1000; ++i)
        CHECK(sample(p, rng) == Solution{1, 1, 1});
}

TEST_CASE("categorical sampling matches softmax frequencies")
{
    SUBCASE("uniform logits, 30000 draws within 0.01 of 1/3")
    {
        PolicyParams p(ModelSpec::categorical(1, 3));
        CounterRng rng(3);
        std::vector<double> counts(3, 0.0);
        for (int i = 0; i < 30000; ++i)
            counts[static_cast<std::size_t>(sample(p, rng)[0])] += 1.0;
        for (double c : counts)
            CHECK(std::fabs(c / 30000.0 - 1.0 / 3.0) < 0.01);
    }
    SUBCASE("skewed logits")
    {
        PolicyParams p(ModelSpec::categorical(1, 4), {1.0, -1.0, 0.5, 2.0});
        std::vector<double> probs(4);
        softmax(p.logits(), probs);
        CounterRng rng(4);
        std::vector<double> counts(4, 0.0);
        for (int i = 0; i < 40000; ++i)
            counts[static_cast<std::size_t>(sample(p, rng)[0])] += 1.0;
        for (std::size_t d = 0; d < 4; ++d)
            CHECK(std::fabs(counts[d] / 40000.0 - probs[d]) < 0.01);
    }
}

TEST_CASE("log_prob examples")
{
    CHECK(log_prob(PolicyParams(ModelSpec::binary(2)), {0, 1}) == doctest::Approx(std::log(0.25)));
    CHECK(log_prob(PolicyParams(ModelSpec::categorical(1, 3)), {2}) == doctest::Approx(std::log(1.0 / 3.0)));
    CHECK(log_prob(PolicyParams(ModelSpec::binary(1), {std::log(3.0)}), {1}) == doctest::Approx(std::log(0.75)));
}

TEST_CASE("shape mismatches are contract violations")
{
    PolicyParams p(ModelSpec::binary(3));
    CHECK_THROWS_AS(log_prob(p, {0, 1}), ContractViolation);
    CHECK_THROWS_AS(score_grad(p, {0, 1, 2}), ContractViolation);
    CHECK_THROWS_AS(PolicyParams(ModelSpec::binary(3), {0.0, 1.0}), ContractViolation);
    CHECK_THROWS_AS(PolicyParams(ModelSpec::binary(1), {NAN}), ContractViolation);
}

TEST_CASE("exp(log_prob) equals the product of coordinate probabilities")
{
    CounterRng rng(5);
    for (auto spec : {ModelSpec::binary(12), ModelSpec::categorical(8, 3), ModelSpec::categorical(5, 5)}) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto p = random_params(spec, rng, 5.0);
            const auto x = random_solution(spec, rng);
            const double expected = direct_probability(p, x);
            CHECK(std::fabs(std::exp(log_prob(p, x)) - expected) <= 1e-12 * expected);
        }
    }
}

TEST_CASE("score_grad closed form")
{
    PolicyParams p(ModelSpec::binary(2));
    const auto g = score_grad(p, {1, 0});
    CHECK(g[0] == 0.5);
    CHECK(g[1] == -0.5);

    CounterRng rng(6);
    const auto spec = ModelSpec::categorical(6, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const auto q = random_params(spec, rng, 5.0);
        const auto grad = score_grad(q, random_solution(spec, rng));
        for (std::size_t l = 0; l < spec.n; ++l) {
            double row = 0.0;
            for (std::size_t d = 0; d < 4; ++d)
                row += grad[l * 4 + d];
            CHECK(std::fabs(row) <= 1e-12);
        }
    }
}

TEST_CASE("score_grad agrees with central finite differences of log_prob")
{
    CounterRng rng(7);
    for (auto spec : {ModelSpec::binary(10), ModelSpec::categorical(6, 3)}) {
        for (double scale : {2.0, 5.0}) {
            for (int trial = 0; trial < 30; ++trial) {
                const auto p = random_params(spec, rng, scale);
                CHECK(max_fd_error(p, random_solution(spec, rng), 1e-5) < 1e-6);
            }
        }
    }
}

TEST_CASE("score function has zero mean under its own policy")
{
    CounterRng rng(8);
    for (auto spec : {ModelSpec::binary(6), ModelSpec::categorical(4, 3)}) {
        const auto p = random_params(spec, rng, 2.0);
        const int draws = 10000;
        std::vector<double> mean(spec.param_size(), 0.0);
        for (int i = 0; i < draws; ++i)
            accumulate_score_grad(p, sample(p, rng), 1.0 / draws, mean);
        for (double v : mean)
            CHECK(std::fabs(v) <= 4.0 / std::sqrt(static_cast<double>(draws)));
    }
}
