#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sveda/policy.hpp"

namespace sveda {

/// NK landscape generalized to D values per variable:
/// f(x) = 1/n * sum_i table_i[x_i, x_{links[i][0]}, ..., x_{links[i][K-1]}].
struct NkdInstance {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t d = 2;
    std::uint64_t seed = 0;
    /// links[i]: K distinct neighbor indices of variable i, none equal to i.
    std::vector<std::vector<std::size_t>> links;
    /// tables[i]: D^(K+1) values in [0, 1), row-major over (x_i, x_links[i][0], ...).
    std::vector<std::vector<double>> tables;

    /// "NK" for D=2, "NK3" for D=3, "NKD" otherwise.
    std::string problem() const;
    ModelSpec model() const;
    std::size_t table_size() const;

    /// Throws ContractViolation naming the first broken invariant.
    void validate() const;

    friend bool operator==(const NkdInstance&, const NkdInstance&) = default;
};

/// Deterministic in (n, k, d, seed) on every platform.
NkdInstance generate_nkd(std::size_t n, std::size_t k, std::size_t d, std::uint64_t seed);

double evaluate(const NkdInstance& instance, const Solution& x);

/// Contribution of variable i's subfunction (not divided by n).
double subfunction(const NkdInstance& instance, std::size_t i, const Solution& x);

/// Largest D^n this will scan.
inline constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 24;

/// Exhaustive maximizer; ties go to the lexicographically smallest solution.
std::pair<Solution, double> enumerate_optimum(const NkdInstance& instance);

std::string to_text(const NkdInstance& instance);
NkdInstance from_text(const std::string& text);

void save(const NkdInstance& instance, const std::filesystem::path& path);
NkdInstance load(const std::filesystem::path& path);

} // namespace sveda
