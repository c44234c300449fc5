#pragma once

// Trigonometric (Fourier) machinery on uniform periodic grids: FFTs, spectral
// derivatives, spectral antiderivatives and band-limited interpolation.
//
// Grids are x_j = j * period / n for j = 0..n-1. Coefficient index m maps to
// wavenumber k = m for m < n/2, k = m - n for m > n/2; m = n/2 is the Nyquist
// mode, which derivatives drop and interpolation splits symmetrically.

#include <span>

#include "szbov/types.hpp"

namespace szbov::spectral {

/// Unnormalized DFT: out_k = sum_j in_j exp(-2 pi i j k / n).
ComplexSeq fft(std::span<const ComplexPoint> in);
/// Unnormalized inverse DFT: out_j = sum_k in_k exp(+2 pi i j k / n).
ComplexSeq ifft(std::span<const ComplexPoint> in);

/// Signed wavenumber of coefficient index m on an n-point grid (Nyquist reported as +n/2).
inline long wavenumber(std::size_t m, std::size_t n) {
  return m <= n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

/// Spectral derivative of periodic samples with the given period.
/// The operator is skew-adjoint, so its adjoint is the negated derivative.
ComplexSeq derivative(std::span<const ComplexPoint> samples, double period = 1.0);

/// Spectral antiderivative of 1-periodic real samples evaluated at the n+1
/// nodes j/n, j = 0..n, starting at zero. The last entry equals the mean.
RealSeq cumulative_integral(std::span<const double> samples);

/// Adjoint (transpose) of cumulative_integral: maps n+1 cotangents to n.
RealSeq cumulative_integral_adjoint(std::span<const double> cotangent);

/// Band-limited interpolant of complex periodic samples.
class TrigInterpolant {
 public:
  TrigInterpolant() = default;
  TrigInterpolant(std::span<const ComplexPoint> samples, double period);

  ComplexPoint operator()(double x) const;
  ComplexPoint derivative(double x) const;
  std::size_t size() const { return coeffs_.size(); }
  double period() const { return period_; }

 private:
  ComplexSeq coeffs_;
  double period_ = 1.0;
};

/// Continuous spectral antiderivative x -> int_0^x f of 1-periodic real samples.
/// At the nodes it agrees with cumulative_integral exactly.
class Antiderivative {
 public:
  Antiderivative() = default;
  explicit Antiderivative(std::span<const double> samples);

  double operator()(double x) const;
  /// The band-limited interpolant of the integrand.
  double rate(double x) const;
  double mean() const { return mean_; }
  std::size_t size() const { return coeffs_.size(); }

 private:
  ComplexSeq coeffs_;     // f_hat / n
  ComplexSeq integral_;   // f_hat / (n * 2 pi i k), zero for k = 0 and Nyquist
  double mean_ = 0.0;
  double offset_ = 0.0;   // oscillatory part at x = 0
};

}  // namespace szbov::spectral
