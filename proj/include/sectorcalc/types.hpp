#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sectorcalc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Point = std::vector<Complex>;

constexpr double kPi = 3.14159265358979323846;
constexpr Complex kI{0.0, 1.0};

/// Raised when an input violates the documented precondition of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative or adaptive numerical procedure cannot meet its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a linear system is singular or too badly conditioned to trust.
class SingularError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Complex cis(double theta) { return std::polar(1.0, theta); }

}  // namespace sectorcalc
