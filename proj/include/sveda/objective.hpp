#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "sveda/policy.hpp"

namespace sveda {

/// Black-box fitness to maximize.
using Objective = std::function<double(const Solution&)>;

/// One row of an optimizer trace.
struct IterationRecord {
    std::size_t iteration = 0;
    std::size_t evaluations = 0;
    double best_so_far = -std::numeric_limits<double>::infinity();
    double mean_fitness = 0.0;
    /// NaN when the optimizer has no kernel or uses the identity kernel.
    double bandwidth = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = 0.0;
};

/// Best-so-far bookkeeping shared by every optimizer: one call, one evaluation.
class EvaluationCounter {
public:
    explicit EvaluationCounter(const Objective& objective) : objective_(objective) {}

    double operator()(const Solution& x)
    {
        const double f = objective_(x);
        ++evaluations_;
        if (f > best_fitness_) {
            best_fitness_ = f;
            best_solution_ = x;
        }
        return f;
    }

    std::size_t evaluations() const noexcept { return evaluations_; }
    double best_fitness() const noexcept { return best_fitness_; }
    const Solution& best_solution() const noexcept { return best_solution_; }

private:
    const Objective& objective_;
    std::size_t evaluations_ = 0;
    double best_fitness_ = -std::numeric_limits<double>::infinity();
    Solution best_solution_;
};

/// f(x) = (number of ones) / n.
inline double one_max(const Solution& x)
{
    double ones = 0.0;
    for (int v : x)
        ones += v != 0 ? 1.0 : 0.0;
    return ones / static_cast<double>(x.size());
}

} // namespace sveda
