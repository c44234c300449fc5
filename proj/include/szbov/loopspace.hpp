#pragma once

// Discrete loops in the blown-up plane, the time reparametrization they induce,
// and the passage to physical loops (reconstruction) and back (lifting).

#include <span>

#include "szbov/geometry.hpp"
#include "szbov/spectral.hpp"
#include "szbov/types.hpp"

namespace szbov {

inline constexpr double kDefaultZhatFloor = 1e-10;
inline constexpr double kDefaultCollisionClearance = 1e-6;
inline constexpr std::size_t kMinLoopSize = 16;

/// Uniformly sampled loop z(tau_j), tau_j = j/N.
///
/// A twisted loop stores the restriction to [0,1) of a path with
/// z(tau + 1) = 1/z(tau); its double cover (samples followed by their
/// inversions) is an ordinary loop of period 2.
class DiscreteLoop {
 public:
  DiscreteLoop() = default;
  explicit DiscreteLoop(ComplexSeq samples, bool twisted = false);

  std::size_t size() const { return samples_.size(); }
  bool twisted() const { return twisted_; }
  const ComplexSeq& samples() const { return samples_; }
  ComplexPoint operator[](std::size_t j) const { return samples_[j]; }
  double node(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(size()); }

  /// 2N samples on [0,2) for twisted loops, the N samples otherwise.
  ComplexSeq double_cover() const;
  /// Period of the sequence returned by double_cover().
  double cover_period() const { return twisted_ ? 2.0 : 1.0; }

  /// Samplewise involution z_j -> 1/z_j.
  DiscreteLoop inverted() const;

  bool operator==(const DiscreteLoop&) const = default;

 private:
  ComplexSeq samples_;
  bool twisted_ = false;
};

/// z'(tau_j), spectral; twisted loops are differentiated on their double cover.
ComplexSeq derivative(const DiscreteLoop& loop);
/// z''(tau_j), spectral.
ComplexSeq second_derivative(const DiscreteLoop& loop);

/// Band-limited evaluation of z and z' at arbitrary tau.
class LoopInterpolant {
 public:
  explicit LoopInterpolant(const DiscreteLoop& loop);
  ComplexPoint operator()(double tau) const { return interp_(tau); }
  ComplexPoint derivative(double tau) const { return interp_.derivative(tau); }

 private:
  spectral::TrigInterpolant interp_;
};

/// Quadrature of the conformal weight over the loop.
/// Throws DegenerateLoopError when the value is at or below `floor`.
double zhat(const DiscreteLoop& loop, double floor = kDefaultZhatFloor);

/// Normalized cumulative integral of 1-periodic nonnegative samples and its inverse.
class MonotoneMap {
 public:
  MonotoneMap() = default;
  explicit MonotoneMap(std::span<const double> density);

  double total() const { return total_; }
  /// Monotone (running-maximum) values at the nodes j/N, j = 0..N; first 0, last 1.
  const RealSeq& nodes() const { return nodes_; }
  double operator()(double x) const;
  double inverse(double y) const;

 private:
  spectral::Antiderivative integral_;
  RealSeq nodes_;
  double total_ = 0.0;
};

/// Reparametrization t_z(tau) = (1/zhat) int_0^tau w(z(s)) ds.
struct TimeMap {
  double zhat = 0.0;
  RealSeq t_of_tau;  // N + 1 nondecreasing samples from 0 to 1
  MonotoneMap map;

  double operator()(double tau) const { return map(tau); }
};

TimeMap time_map(const DiscreteLoop& loop, double floor = kDefaultZhatFloor);

/// tau_z(t): the inverse of the reparametrization, residual below 1e-12.
double inverse_time(const TimeMap& tm, double t);

/// Physical loop sampled at t_j = j/M.
struct PhysicalLoop {
  ComplexSeq samples;
  /// dq/dt at the samples; NaN at collision nodes. May be empty for user-supplied loops.
  ComplexSeq velocities;
  RealSeq collision_times;

  std::size_t size() const { return samples.size(); }
  double node(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(size()); }
};

/// Continuous evaluation of the reconstructed physical loop at arbitrary t.
class ReconstructedPath {
 public:
  explicit ReconstructedPath(const DiscreteLoop& loop, double zhat_floor = kDefaultZhatFloor);

  /// tau_z(t mod 1).
  double tau(double t) const;
  ComplexPoint z(double t) const { return interp_(tau(t)); }
  ComplexPoint position(double t) const { return birkhoff_map(z(t)); }
  /// dq/dt; non-finite at a collision.
  ComplexPoint velocity(double t) const;
  const TimeMap& time() const { return tm_; }

 private:
  TimeMap tm_;
  LoopInterpolant interp_;
};

struct ReconstructOptions {
  double zhat_floor = kDefaultZhatFloor;
  double collision_clearance = kDefaultCollisionClearance;
};

/// q(t) = B(z(tau_z(t))) on a uniform physical-time grid of M samples.
PhysicalLoop reconstruct(const DiscreteLoop& loop, std::size_t m, const ReconstructOptions& options = {});

struct LiftOptions {
  double collision_clearance = kDefaultCollisionClearance;
  /// Branch choice is ambiguous when the nearer root is not at most this fraction
  /// of the farther root's distance to the previous lifted point.
  double ambiguity_ratio = 0.5;
};

/// Lift a uniformly-timed physical loop through the Birkhoff cover and resample
/// it on a uniform tau grid of n samples, so that reconstruct(lift(q)) ~ q.
/// Odd total winding yields a twisted loop.
DiscreteLoop lift(const PhysicalLoop& q, std::size_t n, const LiftOptions& options = {});

}  // namespace szbov
