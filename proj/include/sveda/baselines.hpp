#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sveda/objective.hpp"
#include "sveda/policy.hpp"

namespace sveda {

/// Population-Based Incremental Learning over {0,1}^n.
struct PbilConfig {
    std::size_t population = 64;
    std::size_t selection = 1;
    double learning_rate = 0.1;
    double mutation_prob = 0.02;
    double mutation_shift = 0.05;
    /// Keep probabilities inside [0.001, 0.999] after each update.
    bool clamp = true;
    std::size_t budget = 50000;

    void validate() const;
    std::size_t generations() const noexcept { return budget / population; }
};

inline constexpr double kPbilFloor = 0.001;
inline constexpr double kPbilCeiling = 0.999;

struct BaselineResult {
    std::vector<IterationRecord> trace;
    Solution best_solution;
    double best_fitness = 0.0;
    std::size_t evaluations = 0;
};

/// Called after each generation with the updated probability vector.
using PbilObserver = std::function<void(std::size_t generation, std::span<const double> probs)>;

BaselineResult pbil_run(const Objective& objective, const ModelSpec& model, const PbilConfig& config,
                        std::uint64_t seed, const PbilObserver& observer = {});

/// Uniform sampling; spends exactly `budget` evaluations, one trace row per `batch` of them.
BaselineResult random_search_run(const Objective& objective, const ModelSpec& model, std::size_t budget,
                                 std::uint64_t seed, std::size_t batch = 100);

} // namespace sveda
