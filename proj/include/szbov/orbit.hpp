#pragma once

// A converged (or best-effort) critical point together with its physical
// reconstruction and diagnostics.

#include "szbov/action.hpp"
#include "szbov/fields.hpp"
#include "szbov/geometry.hpp"
#include "szbov/loopspace.hpp"

namespace szbov {

struct OrbitRecord {
  DiscreteLoop z;
  PhysicalLoop q;
  ActionBreakdown breakdown;
  double C = 0.0;
  double grad_norm = 0.0;
  /// Delay-equation defect relative to max |z''|.
  double delay_sup = 0.0;
  /// sup |Phi| relative to the pointwise energy scale |C| + kinetic + |U|.
  double phi_sup = 0.0;
  /// False when the physical loop passes through a primary (winding undefined).
  bool winding_defined = false;
  WindingReport winding;
  bool twisted = false;
  FieldConfig cfg;
  int iterations = 0;
  bool converged = false;
};

}  // namespace szbov
