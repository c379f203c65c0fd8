#include "sveda/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sveda/errors.hpp"

namespace sveda {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) noexcept
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double log_sum_exp(std::span<const double> v) noexcept
{
    const double hi = *std::max_element(v.begin(), v.end());
    double acc = 0.0;
    for (double a : v)
        acc += std::exp(a - hi);
    return hi + std::log(acc);
}

} // namespace

void ModelSpec::validate() const
{
    if (n == 0)
        throw ContractViolation("model needs at least one variable");
    if (categories < 2)
        throw ContractViolation("model needs at least two categories per variable");
    if (kind == ModelKind::binary && categories != 2)
        throw ContractViolation("binary model must have exactly two categories");
}

PolicyParams::PolicyParams(const ModelSpec& spec) : spec_(spec), logits_(spec.param_size(), 0.0)
{
    spec_.validate();
}

PolicyParams::PolicyParams(const ModelSpec& spec, std::vector<double> logits) : spec_(spec), logits_(std::move(logits))
{
    spec_.validate();
    if (logits_.size() != spec_.param_size())
        throw ContractViolation("logit count " + std::to_string(logits_.size()) + " does not match model size " +
                                std::to_string(spec_.param_size()));
    if (!all_finite())
        throw ContractViolation("logits must be finite");
}

bool PolicyParams::all_finite() const noexcept
{
    return std::all_of(logits_.begin(), logits_.end(), [](double v) { return std::isfinite(v); });
}

double sigmoid(double z) noexcept
{
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void softmax(std::span<const double> logits, std::span<double> out) noexcept
{
    const double hi = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t d = 0; d < logits.size(); ++d) {
        out[d] = std::exp(logits[d] - hi);
        total += out[d];
    }
    for (double& p : out)
        p /= total;
}

std::vector<double> marginals(const PolicyParams& params)
{
    const auto& spec = params.spec();
    const auto theta = params.logits();
    std::vector<double> probs(spec.n * spec.categories);
    if (spec.kind == ModelKind::binary) {
        for (std::size_t l = 0; l < spec.n; ++l) {
            const double p = sigmoid(theta[l]);
            probs[2 * l] = 1.0 - p;
            probs[2 * l + 1] = p;
        }
    } else {
        const std::size_t d = spec.categories;
        for (std::size_t l = 0; l < spec.n; ++l)
            softmax(theta.subspan(l * d, d), std::span<double>(probs).subspan(l * d, d));
    }
    return probs;
}

void check_solution(const ModelSpec& spec, const Solution& x)
{
    if (x.size() != spec.n)
        throw ContractViolation("solution length " + std::to_string(x.size()) + " does not match n=" +
                                std::to_string(spec.n));
    for (std::size_t l = 0; l < x.size(); ++l) {
        if (x[l] < 0 || static_cast<std::size_t>(x[l]) >= spec.categories)
            throw ContractViolation("solution entry " + std::to_string(l) + " = " + std::to_string(x[l]) +
                                    " out of range");
    }
}

Solution sample(const PolicyParams& params, CounterRng& rng)
{
    const auto& spec = params.spec();
    const auto theta = params.logits();
    Solution x(spec.n);
    if (spec.kind == ModelKind::binary) {
        for (std::size_t l = 0; l < spec.n; ++l)
            x[l] = rng.uniform01() < sigmoid(theta[l]) ? 1 : 0;
        return x;
    }

    const std::size_t d = spec.categories;
    std::vector<double> probs(d);
    for (std::size_t l = 0; l < spec.n; ++l) {
        softmax(theta.subspan(l * d, d), probs);
        const double u = rng.uniform01();
        double cumulative = 0.0;
        int chosen = static_cast<int>(d) - 1;
        for (std::size_t c = 0; c + 1 < d; ++c) {
            cumulative += probs[c];
            if (u < cumulative) {
                chosen = static_cast<int>(c);
                break;
            }
        }
        x[l] = chosen;
    }
    return x;
}

double log_prob(const PolicyParams& params, const Solution& x)
{
    const auto& spec = params.spec();
    check_solution(spec, x);
    const auto theta = params.logits();
    double total = 0.0;
    if (spec.kind == ModelKind::binary) {
        // log sigma(t) = -softplus(-t), log(1 - sigma(t)) = -softplus(t)
        for (std::size_t l = 0; l < spec.n; ++l)
            total -= x[l] == 1 ? softplus(-theta[l]) : softplus(theta[l]);
        return total;
    }
    const std::size_t d = spec.categories;
    for (std::size_t l = 0; l < spec.n; ++l) {
        const auto row = theta.subspan(l * d, d);
        total += row[static_cast<std::size_t>(x[l])] - log_sum_exp(row);
    }
    return total;
}

void accumulate_score_grad(const PolicyParams& params, const Solution& x, double scale, std::span<double> out)
{
    const auto& spec = params.spec();
    check_solution(spec, x);
    if (out.size() != params.size())
        throw ContractViolation("gradient buffer does not match parameter size");
    const auto theta = params.logits();
    if (spec.kind == ModelKind::binary) {
        for (std::size_t l = 0; l < spec.n; ++l)
            out[l] += scale * (static_cast<double>(x[l]) - sigmoid(theta[l]));
        return;
    }
    const std::size_t d = spec.categories;
    std::vector<double> probs(d);
    for (std::size_t l = 0; l < spec.n; ++l) {
        softmax(theta.subspan(l * d, d), probs);
        for (std::size_t c = 0; c < d; ++c) {
            const double onehot = static_cast<std::size_t>(x[l]) == c ? 1.0 : 0.0;
            out[l * d + c] += scale * (onehot - probs[c]);
        }
    }
}

std::vector<double> score_grad(const PolicyParams& params, const Solution& x)
{
    std::vector<double> grad(params.size(), 0.0);
    accumulate_score_grad(params, x, 1.0, grad);
    return grad;
}

} // namespace sveda
