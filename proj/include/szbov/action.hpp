#pragma once

// The regularized functional on discrete loops, its components and exact
// discrete gradient, the unregularized physical action, and the pointwise
// defect of the delay Euler-Lagrange equation.

#include <string_view>

#include "szbov/fields.hpp"
#include "szbov/loopspace.hpp"

namespace szbov {

struct ActionBreakdown {
  double F = 0.0;      // zhat
  double G = 0.0;      // (1/2) int |z'|^2 / |z|^2
  double H1 = 0.0;     // (1/2) int |z - 1|^2 / |z|   (weighted by 1 - mu)
  double H2 = 0.0;     // (1/2) int |z + 1|^2 / |z|   (weighted by mu)
  double M = 0.0;      // circulation of the gauge primitive along B(z)
  double E_val = 0.0;  // int E(t, q) dt
  double E1 = 0.0;     // int t dE/dt(t, q) dt
  double total = 0.0;
};

/// Total assembled from components: F G + ((1 - mu) H1 + mu H2) / F + M - E.
double assemble_total(const ActionBreakdown& b, double mu);

/// Constant of the delay equation: F G - ((1 - mu) H1 + mu H2) / F + E + E1.
double delay_constant(const ActionBreakdown& b, double mu);

ActionBreakdown eval_components(const DiscreteLoop& z, const FieldConfig& cfg,
                                double zhat_floor = kDefaultZhatFloor);

double eval_action(const DiscreteLoop& z, const FieldConfig& cfg, double zhat_floor = kDefaultZhatFloor);

/// (1/2) int |q'|^2 + circulation of A + int (1-mu)/|q+1| + mu/|q-1| - int E,
/// on the uniform t-grid of the physical loop with spectral velocities.
double eval_unregularized(const PhysicalLoop& q, const FieldConfig& cfg,
                          double collision_clearance = kDefaultCollisionClearance);

/// Gradients of the discrete component functionals with respect to the
/// sample coordinates (d/dx_j + i d/dy_j).
struct ComponentGradients {
  ComplexSeq F, G, H1, H2, M, E;
};

ComponentGradients component_gradients(const DiscreteLoop& z, const FieldConfig& cfg,
                                       double zhat_floor = kDefaultZhatFloor);

/// Exact gradient of the discretized total with respect to the 2N real
/// coordinates, as N complex numbers. Scales like 1/N; multiply by N for the
/// L^2 density.
ComplexSeq gradient(const DiscreteLoop& z, const FieldConfig& cfg, double zhat_floor = kDefaultZhatFloor);

/// Breakdown and gradient in one pass.
struct ActionAndGradient {
  ActionBreakdown breakdown;
  ComplexSeq grad;
};
ActionAndGradient action_and_gradient(const DiscreteLoop& z, const FieldConfig& cfg,
                                      double zhat_floor = kDefaultZhatFloor);

struct DelayResidual {
  double C = 0.0;
  ComplexSeq residual;
  double sup_norm = 0.0;
  /// max_j |z''_j|, the scale for relative reporting.
  double z2_scale = 0.0;
  ComplexSeq eps1, eps2, eps3;

  double relative() const { return z2_scale > 0.0 ? sup_norm / z2_scale : sup_norm; }
};

DelayResidual delay_residual(const DiscreteLoop& z, const FieldConfig& cfg,
                             double zhat_floor = kDefaultZhatFloor);

namespace testing {
/// Deliberately corrupts one component gradient ("F", "G", "H1", "H2", "M",
/// "E") by flipping its sign; empty string clears. For negative controls only.
void inject_gradient_fault(std::string_view component);
}  // namespace testing

}  // namespace szbov
