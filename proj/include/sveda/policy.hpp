#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sveda/rng.hpp"

namespace sveda {

enum class ModelKind { binary, categorical };

/// Shape of a factorized generator: n variables, each taking `categories` values.
struct ModelSpec {
    ModelKind kind = ModelKind::binary;
    std::size_t n = 0;
    std::size_t categories = 2;

    static ModelSpec binary(std::size_t n) { return {ModelKind::binary, n, 2}; }
    static ModelSpec categorical(std::size_t n, std::size_t d) { return {ModelKind::categorical, n, d}; }

    /// Number of logits per particle: n for binary, n*D for categorical.
    std::size_t param_size() const noexcept { return kind == ModelKind::binary ? n : n * categories; }

    void validate() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// One candidate solution; each entry lies in [0, categories).
using Solution = std::vector<int>;

/// Logit parameters of one agent's factorized Bernoulli or categorical policy.
///
/// Binary: logits[l] is the log-odds of x_l = 1.
/// Categorical: logits[l * D + d] is the unnormalized log-probability of x_l = d.
class PolicyParams {
public:
    PolicyParams() = default;
    explicit PolicyParams(const ModelSpec& spec);
    PolicyParams(const ModelSpec& spec, std::vector<double> logits);

    const ModelSpec& spec() const noexcept { return spec_; }
    std::span<double> logits() noexcept { return logits_; }
    std::span<const double> logits() const noexcept { return logits_; }
    std::size_t size() const noexcept { return logits_.size(); }

    bool all_finite() const noexcept;

    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

private:
    ModelSpec spec_;
    std::vector<double> logits_;
};

double sigmoid(double z) noexcept;

/// Max-subtracted softmax of `logits` written to `out` (same length).
void softmax(std::span<const double> logits, std::span<double> out) noexcept;

/// Probability that each coordinate takes each value; shape n x D, row-major.
std::vector<double> marginals(const PolicyParams& params);

Solution sample(const PolicyParams& params, CounterRng& rng);

double log_prob(const PolicyParams& params, const Solution& x);

/// Gradient of log_prob with respect to the logits.
std::vector<double> score_grad(const PolicyParams& params, const Solution& x);

/// out += scale * score_grad(params, x), without allocating.
void accumulate_score_grad(const PolicyParams& params, const Solution& x, double scale, std::span<double> out);

/// Throws ContractViolation if x does not fit the model.
void check_solution(const ModelSpec& spec, const Solution& x);

} // namespace sveda
