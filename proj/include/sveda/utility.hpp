#pragma once

#include <cstddef>
#include <functional>

#include "sveda/matrix.hpp"
#include "sveda/rng.hpp"

namespace sveda {

/// Entry (j, l) is the fitness of the l-th sample of agent j.
using FitnessMatrix = Matrix<double>;
using UtilityMatrix = Matrix<double>;
using RankMatrix = Matrix<std::size_t>;

/// Non-increasing map from an exceedance probability in [0, 1] to a utility.
using Weighting = std::function<double(double)>;

/// w(u) = 1 - 2u.
double w_linear(double u);

/// Number of pooled samples with strictly higher fitness, ties shuffled with `tie_rng`.
/// The result is always a permutation of 0 .. m*lambda - 1.
RankMatrix global_ranks(const FitnessMatrix& fitness, CounterRng& tie_rng);

/// 1 - 2 * rank / (m*lambda - 1).
UtilityMatrix s_hat(const RankMatrix& ranks);

/// Leave-one-out estimate of the quantile utility of sample (j, l).
double unbiased_w_estimate(const FitnessMatrix& fitness, std::size_t j, std::size_t l, const Weighting& w);

/// unbiased_w_estimate for every entry.
UtilityMatrix unbiased_utilities(const FitnessMatrix& fitness, const Weighting& w);

} // namespace sveda
