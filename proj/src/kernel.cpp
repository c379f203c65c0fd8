#include "sveda/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sveda/errors.hpp"

namespace sveda {

namespace {

void check_uniform(std::span<const PolicyParams> particles)
{
    if (particles.empty())
        throw ContractViolation("population is empty");
    for (const auto& p : particles) {
        if (!(p.spec() == particles.front().spec()))
            throw ContractViolation("particles have different shapes");
    }
}

std::vector<std::vector<double>> coordinates(const KernelConfig& config, std::span<const PolicyParams> particles)
{
    std::vector<std::vector<double>> coords;
    coords.reserve(particles.size());
    for (const auto& p : particles) {
        if (config.center_categorical)
            coords.push_back(centered_logits(p));
        else
            coords.emplace_back(p.logits().begin(), p.logits().end());
    }
    return coords;
}

Matrix<double> sq_dists_of(const std::vector<std::vector<double>>& coords)
{
    const std::size_t m = coords.size();
    Matrix<double> out(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < coords[i].size(); ++k) {
                const double diff = coords[i][k] - coords[j][k];
                acc += diff * diff;
            }
            out(i, j) = acc;
            out(j, i) = acc;
        }
    }
    return out;
}

} // namespace

void KernelConfig::validate() const
{
    if (fixed_bandwidth && !(*fixed_bandwidth > 0.0 && std::isfinite(*fixed_bandwidth)))
        throw ContractViolation("fixed bandwidth must be positive and finite");
}

std::vector<double> centered_logits(const PolicyParams& particle)
{
    std::vector<double> out(particle.logits().begin(), particle.logits().end());
    const auto& spec = particle.spec();
    if (spec.kind != ModelKind::categorical)
        return out;
    const std::size_t d = spec.categories;
    for (std::size_t l = 0; l < spec.n; ++l) {
        double mean = 0.0;
        for (std::size_t c = 0; c < d; ++c)
            mean += out[l * d + c];
        mean /= static_cast<double>(d);
        for (std::size_t c = 0; c < d; ++c)
            out[l * d + c] -= mean;
    }
    return out;
}

Matrix<double> pairwise_sq_dists(std::span<const PolicyParams> particles)
{
    check_uniform(particles);
    return sq_dists_of(coordinates(KernelConfig{}, particles));
}

double median_bandwidth(const Matrix<double>& sq_dists, std::size_t m)
{
    if (m < 2)
        throw BandwidthUndefined("median bandwidth needs at least two particles; use a fixed bandwidth for m=1");
    if (sq_dists.rows() != m || sq_dists.cols() != m)
        throw ContractViolation("distance matrix does not match particle count");

    std::vector<double> upper;
    upper.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            upper.push_back(sq_dists(i, j));

    std::sort(upper.begin(), upper.end());
    const std::size_t mid = upper.size() / 2;
    const double med = upper.size() % 2 == 1 ? upper[mid] : 0.5 * (upper[mid - 1] + upper[mid]);
    if (med <= 0.0)
        return 1.0;
    return std::sqrt(med / (2.0 * std::log(static_cast<double>(m) + 1.0)));
}

KernelEval evaluate(const KernelConfig& config, std::span<const PolicyParams> particles)
{
    config.validate();
    check_uniform(particles);

    KernelEval out;
    out.agents = particles.size();
    out.dim = particles.front().size();
    const std::size_t m = out.agents;
    const std::size_t dim = out.dim;
    out.gram = Matrix<double>(m, m, 0.0);
    out.grads.assign(m * m * dim, 0.0);

    if (config.mode == KernelMode::identity) {
        for (std::size_t i = 0; i < m; ++i)
            out.gram(i, i) = 1.0;
        out.bandwidth = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    const auto coords = coordinates(config, particles);
    const auto sq = sq_dists_of(coords);
    // A single particle has no pairwise distances; its own kernel value is 1 for any h.
    if (config.fixed_bandwidth)
        out.bandwidth = *config.fixed_bandwidth;
    else
        out.bandwidth = m < 2 ? 1.0 : median_bandwidth(sq, m);

    const double h2 = out.bandwidth * out.bandwidth;
    for (std::size_t i = 0; i < m; ++i) {
        out.gram(i, i) = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double k = std::exp(-sq(i, j) / (2.0 * h2));
            out.gram(i, j) = k;
            out.gram(j, i) = k;
            double* gij = out.grads.data() + (i * m + j) * dim;
            double* gji = out.grads.data() + (j * m + i) * dim;
            for (std::size_t c = 0; c < dim; ++c) {
                const double v = k * (coords[i][c] - coords[j][c]) / h2;
                gij[c] = v;
                gji[c] = -v;
            }
        }
    }
    return out;
}

} // namespace sveda
