#pragma once

#include <stdexcept>
#include <string>

namespace ebt {

// Argument outside the mathematical domain of an operation (x <= 0 for E1, nonpositive rates, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Order-statistic index or pmf support index out of range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// The closed-form rate was asked for a W beyond the range where it is numerically trusted.
class OverflowGuardError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// The Chernoff minimizer has no nonnegative stationary point (lambda0*W + lambda1*Wbar > N).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ebt
