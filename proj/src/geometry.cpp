#include "szbov/geometry.hpp"

#include <cmath>

namespace szbov {

namespace {

void require_nonzero(ComplexPoint z, const char* what) {
  if (!is_finite(z)) throw DomainError(std::string(what) + ": non-finite argument");
  if (z == ComplexPoint{}) throw DomainError(std::string(what) + " undefined at origin");
}

}  // namespace

ComplexPoint birkhoff_map(ComplexPoint z) {
  require_nonzero(z, "Birkhoff map");
  return 0.5 * (z + 1.0 / z);
}

ComplexPoint birkhoff_derivative(ComplexPoint z) {
  require_nonzero(z, "Birkhoff derivative");
  return 0.5 * (1.0 - 1.0 / (z * z));
}

double conformal_weight(ComplexPoint z) {
  require_nonzero(z, "conformal weight");
  return std::norm(z - 1.0) * std::norm(z + 1.0) / (4.0 * std::norm(z));
}

ComplexPoint conformal_weight_gradient(ComplexPoint z) {
  require_nonzero(z, "conformal weight gradient");
  const double r2 = std::norm(z);
  const ComplexPoint zb = std::conj(z);
  return z * (z * z - 1.0) * (zb * zb + 1.0) / (2.0 * r2 * r2);
}

ComplexPoint involution(ComplexPoint z) {
  require_nonzero(z, "involution");
  return 1.0 / z;
}

int winding(std::span<const ComplexPoint> loop, ComplexPoint center, const WindingOptions& options) {
  if (loop.empty()) throw DomainError("winding undefined: empty loop");
  const std::size_t n = loop.size();
  for (const auto& p : loop) {
    if (!is_finite(p)) throw DomainError("winding undefined: non-finite sample");
    if (std::abs(p - center) <= options.clearance) {
      throw DomainError("winding undefined: loop touches center");
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexPoint a = loop[j] - center;
    const ComplexPoint b = loop[(j + 1) % n] - center;
    const double increment = std::arg(b / a);
    if (std::abs(increment) >= kPi * (1.0 - 1e-12)) throw DomainError("undersampled loop");
    total += increment;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

WindingReport winding_report(std::span<const ComplexPoint> loop, const WindingOptions& options) {
  WindingReport r;
  r.around_minus_one = winding(loop, kMinusPrimary, options);
  r.around_plus_one = winding(loop, kPlusPrimary, options);
  r.total = r.around_minus_one + r.around_plus_one;
  return r;
}

}  // namespace szbov
