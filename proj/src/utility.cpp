#include "sveda/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sveda/errors.hpp"

namespace sveda {

namespace {

void check_finite(const FitnessMatrix& fitness)
{
    for (double v : fitness.data())
        if (!std::isfinite(v))
            throw ContractViolation("fitness values must be finite");
}

} // namespace

double w_linear(double u)
{
    if (!(u >= 0.0 && u <= 1.0))
        throw ContractViolation("w_linear expects u in [0, 1]");
    return 1.0 - 2.0 * u;
}

RankMatrix global_ranks(const FitnessMatrix& fitness, CounterRng& tie_rng)
{
    check_finite(fitness);
    const auto& values = fitness.data();
    const std::size_t total = values.size();

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

    // Shuffle each block of equal fitness over its own rank slots (Fisher-Yates, back to front).
    for (std::size_t begin = 0; begin < total;) {
        std::size_t end = begin + 1;
        while (end < total && values[order[end]] == values[order[begin]])
            ++end;
        for (std::size_t i = end - begin; i > 1; --i) {
            const std::size_t pick = static_cast<std::size_t>(tie_rng.below(i));
            std::swap(order[begin + i - 1], order[begin + pick]);
        }
        begin = end;
    }

    RankMatrix ranks(fitness.rows(), fitness.cols());
    for (std::size_t slot = 0; slot < total; ++slot)
        ranks.data()[order[slot]] = slot;
    return ranks;
}

UtilityMatrix s_hat(const RankMatrix& ranks)
{
    const std::size_t total = ranks.size();
    if (total < 2)
        throw ContractViolation("rank score undefined for a single sample");
    const double denom = static_cast<double>(total - 1);
    UtilityMatrix out(ranks.rows(), ranks.cols());
    for (std::size_t k = 0; k < total; ++k) {
        if (ranks.data()[k] >= total)
            throw ContractViolation("rank out of range");
        out.data()[k] = 1.0 - 2.0 * static_cast<double>(ranks.data()[k]) / denom;
    }
    return out;
}

double unbiased_w_estimate(const FitnessMatrix& fitness, std::size_t j, std::size_t l, const Weighting& w)
{
    const std::size_t m = fitness.rows();
    const std::size_t lambda = fitness.cols();
    if (lambda < 2)
        throw ContractViolation("leave-one-out estimate needs lambda >= 2");
    if (j >= m || l >= lambda)
        throw ContractViolation("sample index out of range");

    const double target = fitness(j, l);
    double other_agents = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == j)
            continue;
        std::size_t better = 0;
        for (double v : fitness.row(i))
            better += v > target ? 1 : 0;
        other_agents += static_cast<double>(better) / static_cast<double>(lambda);
    }
    std::size_t own_better = 0;
    for (std::size_t k = 0; k < lambda; ++k)
        own_better += (k != l && fitness(j, k) > target) ? 1 : 0;
    const double own = static_cast<double>(own_better) / static_cast<double>(lambda - 1);

    // Each term is a fraction in [0, 1]; clamp guards the last-bit rounding of their average.
    const double u = std::clamp((other_agents + own) / static_cast<double>(m), 0.0, 1.0);
    return w(u);
}

UtilityMatrix unbiased_utilities(const FitnessMatrix& fitness, const Weighting& w)
{
    check_finite(fitness);
    UtilityMatrix out(fitness.rows(), fitness.cols());
    for (std::size_t j = 0; j < fitness.rows(); ++j)
        for (std::size_t l = 0; l < fitness.cols(); ++l)
            out(j, l) = unbiased_w_estimate(fitness, j, l, w);
    return out;
}

} // namespace sveda
