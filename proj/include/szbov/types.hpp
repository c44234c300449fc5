#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace szbov {

/// A point of the (physical or blown-up) complex plane.
using ComplexPoint = std::complex<double>;
using ComplexSeq = std::vector<ComplexPoint>;
using RealSeq = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr ComplexPoint kI{0.0, 1.0};

/// Raised when an operation is evaluated outside its domain (origin, branch point, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The loop lies in the excluded locus where the conformal-weight integral vanishes.
class DegenerateLoopError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed configuration, loop file, or option value.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool is_finite(ComplexPoint z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Euclidean pairing <a, b> = Re(conj(a) b) of two plane vectors.
inline double dot(ComplexPoint a, ComplexPoint b) {
  return a.real() * b.real() + a.imag() * b.imag();
}

}  // namespace szbov
