#pragma once

// Critical-point search for the regularized functional: seeds, a damped
// Gauss-Newton (Levenberg-Marquardt) iteration on the gradient residual, and
// natural-parameter continuation.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "szbov/orbit.hpp"

namespace szbov {

struct SolveOptions {
  double g_tol = 1e-9;
  int max_iterations = 200;
  /// Initial damping relative to the largest squared singular value of the Jacobian.
  double lambda0 = 1e-3;
  double lambda_increase = 10.0;
  double lambda_decrease = 0.2;
  /// Append <z'_seed, Z - Z_seed> = 0 when the configuration is autonomous.
  bool phase_fix = true;
  double zhat_floor = kDefaultZhatFloor;
  /// Samples may not come closer than this to the origin.
  double origin_clearance = 1e-8;
  /// Finite-difference step for Jacobian columns, relative to the loop scale.
  double fd_step = 1e-6;
  /// Fixed-step gradient-flow iterations before Gauss-Newton (0 disables).
  int warmup_steps = 0;
  double warmup_step = 1e-3;
  /// Physical samples in the reconstruction attached to the record.
  std::size_t m = 512;
  /// Worker threads for Jacobian assembly; 0 reads SZBOV_THREADS, else hardware concurrency.
  unsigned threads = 0;
  /// Called after every accepted iteration with (iteration, grad_norm, action).
  std::function<void(int, double, double)> progress;
};

class NoConvergenceError : public std::runtime_error {
 public:
  NoConvergenceError(const std::string& what, OrbitRecord best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const OrbitRecord& best() const { return best_; }

 private:
  OrbitRecord best_;
};

class DegeneratedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContinuationError : public std::runtime_error {
 public:
  ContinuationError(const std::string& what, FieldConfig failed)
      : std::runtime_error(what), failed_(std::move(failed)) {}
  const FieldConfig& failed_config() const { return failed_; }

 private:
  FieldConfig failed_;
};

namespace seeds {

/// Plain loop: circle about `center` of radius `radius`.
DiscreteLoop circle(ComplexPoint center, double radius, std::size_t n);
/// Lift of the ellipse a cos(2 pi t) + i b sin(2 pi t).
DiscreteLoop ellipse_lift(double a, double b, std::size_t n);
/// Lift of a uniformly traversed circle of the given radius about the primary at `side` (+-1).
DiscreteLoop kepler_guess(double side, double radius, std::size_t n);
/// Twisted collision loop z = side * exp(kappa sin(pi tau)): for real kappa the
/// reconstruction bounces radially on the outer side of the primary, for
/// imaginary kappa on the inner segment towards the other primary.
DiscreteLoop radial(double side, ComplexPoint kappa, std::size_t n);
/// Band-limited resampling to a different number of samples.
DiscreteLoop resample(const DiscreteLoop& loop, std::size_t n);

}  // namespace seeds

/// Diagnostics for a loop (whether or not it is critical).
OrbitRecord make_record(const DiscreteLoop& z, const FieldConfig& cfg, std::size_t m = 512);

/// N * max_j |gradient_j|: sup norm of the L^2 gradient density.
double gradient_norm(const DiscreteLoop& z, const FieldConfig& cfg);

OrbitRecord solve(const DiscreteLoop& seed, const FieldConfig& cfg, const SolveOptions& options = {});

/// Each converged orbit seeds the next configuration. The returned family starts
/// with `start`; it stops at the first failure (ContinuationError when the very
/// first step fails).
std::vector<OrbitRecord> continue_family(const OrbitRecord& start, const std::vector<FieldConfig>& path,
                                         const SolveOptions& options = {});

/// Extreme eigenvalues of the Gauss-Newton normal matrix J^T J at z.
struct NormalSpectrum {
  double smallest = 0.0;
  double largest = 0.0;
};
NormalSpectrum normal_spectrum(const DiscreteLoop& z, const FieldConfig& cfg, bool phase_fix,
                               const SolveOptions& options = {});

}  // namespace szbov
