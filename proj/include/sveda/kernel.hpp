#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sveda/matrix.hpp"
#include "sveda/policy.hpp"

namespace sveda {

using Population = std::vector<PolicyParams>;

enum class KernelMode { rbf, identity };

struct KernelConfig {
    KernelMode mode = KernelMode::rbf;
    /// Fixed bandwidth h; unset selects the median trick, recomputed every call.
    std::optional<double> fixed_bandwidth;
    /// Subtract each categorical variable's mean logit before measuring distances.
    bool center_categorical = false;

    void validate() const;
};

/// Kernel matrix and kernel gradients for one population snapshot.
struct KernelEval {
    std::size_t agents = 0;
    std::size_t dim = 0;
    /// gram(i, j) = k(theta_i, theta_j)
    Matrix<double> gram;
    /// grad(i, j) = d/d theta_j of k(theta_i, theta_j), stored as agents*agents*dim values.
    std::vector<double> grads;
    /// Bandwidth actually used; NaN in identity mode.
    double bandwidth = 0.0;

    std::span<const double> grad(std::size_t i, std::size_t j) const
    {
        return {grads.data() + (i * agents + j) * dim, dim};
    }
};

Matrix<double> pairwise_sq_dists(std::span<const PolicyParams> particles);

/// h = sqrt(med / (2 ln(m + 1))) over the upper-triangle squared distances; 1 when med is 0.
double median_bandwidth(const Matrix<double>& sq_dists, std::size_t m);

KernelEval evaluate(const KernelConfig& config, std::span<const PolicyParams> particles);

/// Per-variable mean-centered copy of categorical logits; binary particles are returned unchanged.
std::vector<double> centered_logits(const PolicyParams& particle);

} // namespace sveda
