#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spiked {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input or configuration. The CLI maps this to exit status 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Input outside the domain where a formula is defined. Exit status 2.
class DomainError : public Error {
public:
    using Error::Error;
};

// A log-determinant argument went nonpositive: some eigenvalue sits at or
// beyond the pole of the test statistic.
class SupercriticalError : public DomainError {
public:
    SupercriticalError(double eigenvalue, double pole, std::size_t index);

    double eigenvalue() const noexcept { return eigenvalue_; }
    double pole() const noexcept { return pole_; }
    std::size_t index() const noexcept { return index_; }

private:
    double eigenvalue_;
    double pole_;
    std::size_t index_;
};

class QuadratureError : public DomainError {
public:
    QuadratureError(const std::string& what, double achieved_rel_error);
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Two independent evaluation routes disagree.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace spiked
