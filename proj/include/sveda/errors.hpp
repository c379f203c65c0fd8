#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sveda {

/// Raised when a caller breaks a documented precondition (shape, range, sign).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Median bandwidth needs at least two particles.
class BandwidthUndefined : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SearchSpaceTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

class UnsupportedModel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class AggregationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter update produced a non-finite or runaway logit.
class Diverged : public std::runtime_error {
public:
    Diverged(std::size_t iteration, const std::string& what)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

} // namespace sveda
