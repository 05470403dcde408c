#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace udw {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Argument would overflow the representable range.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

// Pointlike kernel evaluated on the light cone.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A finite-difference stencil straddles the light cone of the other point.
class StencilError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Capacity limits (e.g. too many qubits for a dense density matrix).
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// A computed object violates an invariant it must satisfy by construction.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
        : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

// Sampled |yy/zz| >= 1: statistical noise has pushed the ratio outside the arctanh domain.
class NoiseDominatedError : public std::domain_error {
public:
    NoiseDominatedError(const std::string& what, double ratio) : std::domain_error(what), ratio_(ratio) {}
    double ratio() const noexcept { return ratio_; }

private:
    double ratio_;
};

// <ZZ> vanishes to working precision: the detectors have fully dephased.
class DephasingError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A causal-correction argument reached |x| >= 1 (some 2G near pi/2).
class NearSingularTangentError : public std::domain_error {
public:
    NearSingularTangentError(const std::string& what, std::size_t k) : std::domain_error(what), k_(k) {}
    std::size_t k() const noexcept { return k_; }

private:
    std::size_t k_;
};

// Malformed configuration or input file. Carries the offending field name.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace udw
