#include "szbov/loopspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace szbov {

DiscreteLoop::DiscreteLoop(ComplexSeq samples, bool twisted)
    : samples_(std::move(samples)), twisted_(twisted) {
  if (samples_.size() < kMinLoopSize || samples_.size() % 2 != 0) {
    throw ValidationError("loop size must be even and at least " + std::to_string(kMinLoopSize) +
                          ", got " + std::to_string(samples_.size()));
  }
  for (std::size_t j = 0; j < samples_.size(); ++j) {
    if (!is_finite(samples_[j])) throw DomainError("loop sample " + std::to_string(j) + " is not finite");
    if (samples_[j] == ComplexPoint{}) throw DomainError("loop sample " + std::to_string(j) + " at origin");
  }
}

ComplexSeq DiscreteLoop::double_cover() const {
  if (!twisted_) return samples_;
  ComplexSeq cover(samples_);
  cover.reserve(2 * samples_.size());
  for (auto z : samples_) cover.push_back(1.0 / z);
  return cover;
}

DiscreteLoop DiscreteLoop::inverted() const {
  ComplexSeq out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), [](ComplexPoint z) { return 1.0 / z; });
  return DiscreteLoop(std::move(out), twisted_);
}

ComplexSeq derivative(const DiscreteLoop& loop) {
  ComplexSeq d = spectral::derivative(loop.double_cover(), loop.cover_period());
  d.resize(loop.size());
  return d;
}

ComplexSeq second_derivative(const DiscreteLoop& loop) {
  const double period = loop.cover_period();
  ComplexSeq d = spectral::derivative(spectral::derivative(loop.double_cover(), period), period);
  d.resize(loop.size());
  return d;
}

LoopInterpolant::LoopInterpolant(const DiscreteLoop& loop)
    : interp_(loop.double_cover(), loop.cover_period()) {}

double zhat(const DiscreteLoop& loop, double floor) {
  double sum = 0.0;
  for (auto z : loop.samples()) sum += conformal_weight(z);
  const double value = sum / static_cast<double>(loop.size());
  if (!(value > floor)) throw DegenerateLoopError("degenerate loop: ẑ vanishes");
  return value;
}

MonotoneMap::MonotoneMap(std::span<const double> density) : integral_(density) {
  total_ = integral_.mean();
  if (!(total_ > 0.0)) throw DegenerateLoopError("monotone map: density integrates to zero");
  nodes_ = spectral::cumulative_integral(density);
  double running = 0.0;
  for (auto& v : nodes_) {
    v /= total_;
    running = std::max(running, v);
    v = running;
  }
  nodes_.front() = 0.0;
  nodes_.back() = 1.0;
  for (auto& v : nodes_) v = std::min(v, 1.0);
}

double MonotoneMap::operator()(double x) const { return integral_(x) / total_; }

double MonotoneMap::inverse(double y) const {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  const std::size_t n = nodes_.size() - 1;
  const double h = 1.0 / static_cast<double>(n);
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
  std::size_t j = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  j = std::clamp<std::size_t>(j, 1, n) - 1;

  double a = static_cast<double>(j) * h;
  double b = a + h;
  double fa = (*this)(a) - y;
  double fb = (*this)(b) - y;
  // Node values were made monotone; the continuous map can differ by roundoff.
  for (int widen = 0; widen < 4 && fa > 0.0 && a > 0.0; ++widen) {
    a = std::max(0.0, a - h);
    fa = (*this)(a) - y;
  }
  for (int widen = 0; widen < 4 && fb < 0.0 && b < 1.0; ++widen) {
    b = std::min(1.0, b + h);
    fb = (*this)(b) - y;
  }
  if (fa >= 0.0) return a;
  if (fb <= 0.0) return b;

  // Linear initial guess, then Newton safeguarded by bisection.
  double x = a + (b - a) * (-fa) / (fb - fa);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = (*this)(x) - y;
    if (fx == 0.0 || std::abs(fx) < 1e-15) return x;
    if (fx < 0.0) {
      a = x;
    } else {
      b = x;
    }
    if (b - a < 1e-15) return 0.5 * (a + b);
    const double slope = integral_.rate(x) / total_;
    double next = slope > 0.0 ? x - fx / slope : a - 1.0;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    x = next;
  }
  return x;
}

TimeMap time_map(const DiscreteLoop& loop, double floor) {
  RealSeq w(loop.size());
  std::transform(loop.samples().begin(), loop.samples().end(), w.begin(), conformal_weight);
  TimeMap tm;
  tm.zhat = zhat(loop, floor);
  tm.map = MonotoneMap(w);
  tm.t_of_tau = tm.map.nodes();
  return tm;
}

double inverse_time(const TimeMap& tm, double t) { return tm.map.inverse(t); }

ReconstructedPath::ReconstructedPath(const DiscreteLoop& loop, double zhat_floor)
    : tm_(time_map(loop, zhat_floor)), interp_(loop) {}

double ReconstructedPath::tau(double t) const {
  const double wrapped = t - std::floor(t);
  return inverse_time(tm_, wrapped);
}

ComplexPoint ReconstructedPath::velocity(double t) const {
  const double s = tau(t);
  const ComplexPoint zz = interp_(s);
  return birkhoff_derivative(zz) * interp_.derivative(s) * (tm_.zhat / conformal_weight(zz));
}

PhysicalLoop reconstruct(const DiscreteLoop& loop, std::size_t m, const ReconstructOptions& options) {
  if (m == 0) throw ValidationError("reconstruct: M must be positive");
  const TimeMap tm = time_map(loop, options.zhat_floor);
  const LoopInterpolant z_of(loop);
  PhysicalLoop q;
  q.samples.resize(m);
  q.velocities.resize(m);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 0; j < m; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(m);
    const double tau = inverse_time(tm, t);
    const ComplexPoint z = z_of(tau);
    const ComplexPoint qj = birkhoff_map(z);
    q.samples[j] = qj;
    const double gap = std::min(std::abs(qj - kMinusPrimary), std::abs(qj - kPlusPrimary));
    if (gap < options.collision_clearance) {
      q.collision_times.push_back(t);
      q.velocities[j] = {nan, nan};
    } else {
      q.velocities[j] = birkhoff_derivative(z) * z_of.derivative(tau) * (tm.zhat / conformal_weight(z));
    }
  }
  return q;
}

DiscreteLoop lift(const PhysicalLoop& q, std::size_t n, const LiftOptions& options) {
  const std::size_t m = q.size();
  if (m < 4) throw ValidationError("lift: physical loop needs at least 4 samples");
  for (const auto& p : q.samples) {
    if (!is_finite(p)) throw DomainError("lift: non-finite sample");
    if (std::abs(p - kMinusPrimary) < options.collision_clearance ||
        std::abs(p - kPlusPrimary) < options.collision_clearance) {
      throw DomainError("cannot lift through branch point");
    }
  }
  auto roots = [](ComplexPoint p) {
    const ComplexPoint r = p + std::sqrt(p * p - 1.0);
    return std::pair{r, 1.0 / r};
  };
  auto follow = [&](ComplexPoint p, ComplexPoint previous) {
    auto [r1, r2] = roots(p);
    const double d1 = std::abs(r1 - previous);
    const double d2 = std::abs(r2 - previous);
    if (std::min(d1, d2) > options.ambiguity_ratio * std::max(d1, d2)) {
      throw DomainError("undersampled lift");
    }
    return d1 <= d2 ? r1 : r2;
  };

  ComplexSeq track(m);
  {
    auto [r1, r2] = roots(q.samples[0]);
    track[0] = std::abs(r1) >= std::abs(r2) ? r1 : r2;
  }
  for (std::size_t j = 1; j < m; ++j) track[j] = follow(q.samples[j], track[j - 1]);
  const ComplexPoint closing = follow(q.samples[0], track[m - 1]);
  const bool twisted = std::abs(closing - track[0]) > std::abs(closing - 1.0 / track[0]);

  // Physical time runs with dt/dtau = w / zhat, so tau(t) is the normalized
  // integral of 1/w along the tracked branch.
  RealSeq inv_weight(m);
  for (std::size_t j = 0; j < m; ++j) inv_weight[j] = 1.0 / conformal_weight(track[j]);
  const MonotoneMap tau_of_t(inv_weight);

  ComplexSeq cover(track);
  if (twisted) {
    for (auto z : track) cover.push_back(1.0 / z);
  }
  const spectral::TrigInterpolant z_of_t(cover, twisted ? 2.0 : 1.0);

  ComplexSeq samples(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double tau = static_cast<double>(k) / static_cast<double>(n);
    samples[k] = z_of_t(tau_of_t.inverse(tau));
  }
  return DiscreteLoop(std::move(samples), twisted);
}

}  // namespace szbov
