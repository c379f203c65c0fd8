#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "sveda/errors.hpp"
#include "sveda/utility.hpp"

using namespace sveda;

namespace {

FitnessMatrix make(std::size_t rows, std::size_t cols, std::vector<double> values)
{
    FitnessMatrix f(rows, cols);
    f.data() = std::move(values);
    return f;
}

FitnessMatrix random_fitness(std::size_t m, std::size_t lambda, CounterRng& rng, int levels = 0)
{
    FitnessMatrix f(m, lambda);
    for (double& v : f.data())
        v = levels > 0 ? static_cast<double>(rng.below(static_cast<std::uint64_t>(levels))) / levels : rng.uniform01();
    return f;
}

bool is_permutation(const RankMatrix& ranks)
{
    std::set<std::size_t> seen(ranks.data().begin(), ranks.data().end());
    return seen.size() == ranks.size() && *seen.rbegin() == ranks.size() - 1;
}

} // namespace

TEST_CASE("global ranks order by descending fitness")
{
    CounterRng tie(1);
    const auto ranks = global_ranks(make(1, 3, {3.0, 1.0, 2.0}), tie);
    CHECK(ranks.data() == std::vector<std::size_t>{0, 2, 1});
}

TEST_CASE("a full tie block is a uniform random permutation")
{
    const std::size_t total = 4;
    std::vector<std::vector<int>> slot_counts(total, std::vector<int>(total, 0));
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        CounterRng tie(static_cast<std::uint64_t>(t));
        const auto ranks = global_ranks(make(2, 2, {0.5, 0.5, 0.5, 0.5}), tie);
        REQUIRE(is_permutation(ranks));
        for (std::size_t e = 0; e < total; ++e)
            ++slot_counts[e][ranks.data()[e]];
    }
    for (const auto& row : slot_counts)
        for (int c : row)
            CHECK(std::fabs(c / static_cast<double>(trials) - 0.25) < 0.03);
}

TEST_CASE("partial ties: both resolutions of the 5-5 block occur")
{
    // ((5,5),(7,1)): 7 ranks 0, 1 ranks 3, the fives share {1,2}.
    std::set<std::vector<std::size_t>> seen;
    for (std::uint64_t s = 0; s < 64; ++s) {
        CounterRng tie(s);
        const auto r = global_ranks(make(2, 2, {5.0, 5.0, 7.0, 1.0}), tie);
        CHECK(r(1, 0) == 0);
        CHECK(r(1, 1) == 3);
        CHECK(std::set<std::size_t>{r(0, 0), r(0, 1)} == std::set<std::size_t>{1, 2});
        seen.insert(r.data());
    }
    CHECK(seen.size() == 2);
}

TEST_CASE("ranks are always a permutation, with or without ties")
{
    CounterRng rng(2), tie(3);
    for (int trial = 0; trial < 200; ++trial)
        CHECK(is_permutation(global_ranks(random_fitness(7, 13, rng, trial % 2 == 0 ? 5 : 0), tie)));
}

TEST_CASE("s_hat endpoints and sum")
{
    RankMatrix r(7, 13);
    std::iota(r.data().begin(), r.data().end(), std::size_t{0});
    const auto s = s_hat(r);
    CHECK(s(0, 0) == 1.0);
    CHECK(s(6, 12) == -1.0);

    RankMatrix three(1, 3);
    three.data() = {0, 1, 2};
    CHECK(s_hat(three).data() == std::vector<double>{1.0, 0.0, -1.0});

    CounterRng rng(4), tie(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto u = s_hat(global_ranks(random_fitness(7, 13, rng), tie));
        CHECK(std::fabs(std::accumulate(u.data().begin(), u.data().end(), 0.0)) <= 1e-12);
        for (double v : u.data()) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }

    CHECK_THROWS_AS(s_hat(RankMatrix(1, 1, 0)), ContractViolation);
}

TEST_CASE("w_linear")
{
    CHECK(w_linear(0.0) == 1.0);
    CHECK(w_linear(0.5) == 0.0);
    CHECK(w_linear(1.0) == -1.0);
    CHECK_THROWS_AS(w_linear(-0.1), ContractViolation);
    CHECK_THROWS_AS(w_linear(1.5), ContractViolation);
}

TEST_CASE("unbiased estimator")
{
    const auto f = make(2, 3, {0.1, 0.9, 0.3, 0.2, 0.5, 0.4});
    CHECK(unbiased_w_estimate(f, 0, 1, w_linear) == 1.0);
    CHECK(unbiased_w_estimate(f, 0, 0, w_linear) == -1.0);

    // ((1,4),(2,3)), counted by hand:
    //   (0,0) f=1: other agent 2/2, own 1/1 -> u=1    -> -1
    //   (0,1) f=4: other 0/2,  own 0/1      -> u=0    -> +1
    //   (1,0) f=2: other 1/2,  own 1/1      -> u=0.75 -> -0.5
    //   (1,1) f=3: other 1/2,  own 0/1      -> u=0.25 -> +0.5
    const auto g = make(2, 2, {1.0, 4.0, 2.0, 3.0});
    CHECK(unbiased_utilities(g, w_linear).data() == std::vector<double>{-1.0, 1.0, -0.5, 0.5});

    CHECK_THROWS_AS(unbiased_w_estimate(make(2, 1, {1.0, 2.0}), 0, 0, w_linear), ContractViolation);
}

TEST_CASE("unbiased estimator stays within 2/(lambda-1) of s_hat on distinct fitness")
{
    CounterRng rng(6), tie(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.below(8);
        const std::size_t lambda = 2 + rng.below(14);
        const auto f = random_fitness(m, lambda, rng);
        const auto s = s_hat(global_ranks(f, tie));
        const auto u = unbiased_utilities(f, w_linear);
        for (std::size_t k = 0; k < f.size(); ++k)
            CHECK(std::fabs(s.data()[k] - u.data()[k]) <= 2.0 / static_cast<double>(lambda - 1));
    }
}

TEST_CASE("ranks are invariant under strictly increasing transforms")
{
    CounterRng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = random_fitness(7, 13, rng, trial % 2 == 0 ? 6 : 0);
        auto g = f;
        for (double& v : g.data())
            v = std::exp(5.0 * v) + 3.0;
        CounterRng tie_a(static_cast<std::uint64_t>(trial)), tie_b(static_cast<std::uint64_t>(trial));
        const auto ra = global_ranks(f, tie_a);
        const auto rb = global_ranks(g, tie_b);
        CHECK(ra == rb);
        CHECK(s_hat(ra) == s_hat(rb));
    }
}
