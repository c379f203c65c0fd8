#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "sveda/objective.hpp"
#include "sveda/svgd.hpp"

namespace sveda {

struct StepSizeCalibration {
    std::vector<std::pair<double, double>> scores;
    double chosen = 0.0;
};

/// Smallest power of two in [2^-4, 2^4] with the best mean final OneMax-32 fitness
/// over 20 seeds at budget 10000; other hyperparameters stay at their defaults.
inline StepSizeCalibration calibrate_step_size()
{
    StepSizeCalibration out;
    double best = -1.0;
    for (int p = -4; p <= 4; ++p) {
        SvgdConfig config;
        config.step_size = std::ldexp(1.0, p);
        config.budget = 10000;
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed)
            total += run(one_max, ModelSpec::binary(32), config, seed).best_fitness;
        const double mean = total / 20.0;
        out.scores.emplace_back(config.step_size, mean);
        if (mean > best) {
            best = mean;
            out.chosen = config.step_size;
        }
    }
    return out;
}

} // namespace sveda
