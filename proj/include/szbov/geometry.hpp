#pragma once

// Complex-plane primitives of the two-center problem. The primaries sit at
// -1 (mass 1 - mu) and +1 (mass mu).

#include <span>

#include "szbov/types.hpp"

namespace szbov {

inline constexpr ComplexPoint kMinusPrimary{-1.0, 0.0};
inline constexpr ComplexPoint kPlusPrimary{1.0, 0.0};

/// B(z) = (z + 1/z) / 2, the 2-to-1 cover of the plane branched at +-1.
ComplexPoint birkhoff_map(ComplexPoint z);

/// B'(z) = (1 - 1/z^2) / 2.
ComplexPoint birkhoff_derivative(ComplexPoint z);

/// w(z) = |z - 1|^2 |z + 1|^2 / (4 |z|^2); vanishes exactly at the collision points +-1.
double conformal_weight(ComplexPoint z);

/// Real gradient of w, i.e. dw = <grad, dz>. Equals z (z^2 - 1)(conj(z)^2 + 1) / (2 |z|^4).
ComplexPoint conformal_weight_gradient(ComplexPoint z);

/// I(z) = 1/z, the deck transformation of the Birkhoff cover.
ComplexPoint involution(ComplexPoint z);

struct WindingReport {
  int around_minus_one = 0;
  int around_plus_one = 0;
  int total = 0;

  bool operator==(const WindingReport&) const = default;
};

struct WindingOptions {
  double clearance = 1e-8;
};

/// Winding number of the closed polyline through `loop` (last sample joins
/// the first) about `center`, by summing principal-branch angle increments.
int winding(std::span<const ComplexPoint> loop, ComplexPoint center,
            const WindingOptions& options = {});

/// Winding numbers about both primaries.
WindingReport winding_report(std::span<const ComplexPoint> loop, const WindingOptions& options = {});

}  // namespace szbov
