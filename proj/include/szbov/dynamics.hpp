#pragma once

// Physical-side dynamics: Newton's equation, an adaptive Dormand-Prince
// integrator, the first-integral profile and the generalized-solution check.

#include <string>
#include <vector>

#include "szbov/orbit.hpp"

namespace szbov {

/// q'' = -B(q) i q' - (1-mu)(q+1)/|q+1|^3 - mu (q-1)/|q-1|^3 - grad E_t(q).
ComplexPoint newtonian_rhs(double t, ComplexPoint q, ComplexPoint v, const FieldConfig& cfg);

/// U(q) = -(1-mu)/|q+1| - mu/|q-1|.
double two_center_potential(ComplexPoint q, double mu);

enum class Termination { completed, collision_proximity, step_failure };

std::string to_string(Termination t);

struct Trajectory {
  RealSeq times;
  ComplexSeq positions;
  ComplexSeq velocities;
  Termination terminated = Termination::completed;
  /// Time reached when the integration stopped.
  double final_time = 0.0;
};

struct IntegrateOptions {
  double tol = 1e-10;
  double collision_clearance = kDefaultCollisionClearance;
  double min_step = 1e-14;
  /// Output times (in the direction of integration). Empty: record every accepted step.
  RealSeq sample_times;
};

/// Integrates from t0 to t1 (either direction). Output is sorted by increasing time.
Trajectory integrate(ComplexPoint q0, ComplexPoint v0, double t0, double t1, const FieldConfig& cfg,
                     const IntegrateOptions& options = {});

struct PhiProfile {
  double C = 0.0;
  /// Phi on the uniform t-grid of the physical loop; NaN at masked nodes.
  RealSeq phi;
  std::vector<bool> masked;
  /// Psi = Phi |z^2 - 1|^2 / |z|^2 on the tau-grid (empty without a source loop).
  RealSeq psi;
  /// int Phi dt. With a source loop it is evaluated on the tau-grid (dt = w/zhat dtau),
  /// where the integrand is smooth even through collisions.
  double mean_phi = 0.0;
  /// Trapezoid mean of phi on the t-grid (NaN when nodes are masked).
  double mean_phi_t = 0.0;
  /// max |phi| over unmasked t-grid nodes.
  double sup_phi = 0.0;
  /// max over tau-nodes of |Phi| / (|C| + |q'|^2/2 + |U| + |E| + |tail|), evaluated via Psi.
  double sup_phi_relative = 0.0;
};

/// First-integral profile Phi(t) = C - |q'|^2/2 - U(q) - int_t^1 Edot - E_t(q).
/// Velocities are taken from q.velocities when present, else by spectral differentiation.
PhiProfile phi_profile(const PhysicalLoop& q, const FieldConfig& cfg, double C,
                       const DiscreteLoop* source = nullptr, double collision_clearance = kDefaultCollisionClearance);

struct VerifyOptions {
  double tol = 1e-5;
  double integrator_tol = 1e-10;
  /// A tau-node closer than this to z = +-1 (in the blown-up plane) marks a collision.
  double collision_z_tolerance = 1e-5;
  /// Arc comparisons stop this far (in q) from a primary.
  double arc_clearance = 1e-2;
  /// Grid used for arc comparison and energy limits.
  std::size_t m = 512;
  double collision_clearance = kDefaultCollisionClearance;
};

struct VerifyReport {
  std::size_t collision_count = 0;
  RealSeq collision_times;
  bool collisions_finite = true;
  double arc_error = 0.0;
  bool arcs_ok = true;
  double energy_jump = 0.0;
  bool energy_ok = true;
  double closure_error = 0.0;
  bool closure_ok = true;

  bool passed() const { return collisions_finite && arcs_ok && energy_ok && closure_ok; }
};

/// Collision times of the reconstruction of z (in physical time, sorted).
RealSeq collision_times(const DiscreteLoop& z, double z_tolerance = 1e-5);

/// Checks that the reconstruction of the orbit is a generalized solution.
VerifyReport verify_generalized(const OrbitRecord& orbit, const FieldConfig& cfg, const VerifyOptions& options = {});

}  // namespace szbov
