#include "szbov/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

namespace szbov {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 4>;  // q_re, q_im, v_re, v_im

ComplexPoint acceleration(double t, ComplexPoint q, ComplexPoint v, const FieldConfig& cfg) {
  const ComplexPoint dm = q + 1.0;
  const ComplexPoint dp = q - 1.0;
  const double rm = std::abs(dm);
  const double rp = std::abs(dp);
  ComplexPoint a = -(1.0 - cfg.mu) * dm / (rm * rm * rm) - cfg.mu * dp / (rp * rp * rp);
  if (!cfg.magnetic.is_zero()) a -= cfg.magnetic.field(q) * kI * v;
  if (!cfg.electric.is_zero()) a -= cfg.electric.gradient(t, q);
  return a;
}

double min_primary_distance(ComplexPoint q) { return std::min(std::abs(q - kMinusPrimary), std::abs(q - kPlusPrimary)); }

}  // namespace

double two_center_potential(ComplexPoint q, double mu) {
  return -(1.0 - mu) / std::abs(q + 1.0) - mu / std::abs(q - 1.0);
}

ComplexPoint newtonian_rhs(double t, ComplexPoint q, ComplexPoint v, const FieldConfig& cfg) {
  if (!is_finite(q) || !is_finite(v)) throw DomainError("Newtonian force: non-finite state");
  if (q == kMinusPrimary || q == kPlusPrimary) throw DomainError("Newtonian force singular at a primary");
  return acceleration(t, q, v, cfg);
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::collision_proximity: return "collision_proximity";
    case Termination::step_failure: return "step_failure";
  }
  return "unknown";
}

Trajectory integrate(ComplexPoint q0, ComplexPoint v0, double t0, double t1, const FieldConfig& cfg,
                     const IntegrateOptions& options) {
  if (!is_finite(q0) || !is_finite(v0)) throw ValidationError("integrate: non-finite initial data");
  if (min_primary_distance(q0) < options.collision_clearance) {
    throw DomainError("integrate: initial position within collision clearance");
  }
  Trajectory traj;
  const double direction = t1 >= t0 ? 1.0 : -1.0;
  auto system = [&cfg](const State& x, State& dxdt, double t) {
    const ComplexPoint a = acceleration(t, {x[0], x[1]}, {x[2], x[3]}, cfg);
    dxdt = {x[2], x[3], a.real(), a.imag()};
  };
  auto stepper = odeint::make_dense_output(options.tol, options.tol, odeint::runge_kutta_dopri5<State>());

  auto record = [&traj](double t, const State& x) {
    traj.times.push_back(t);
    traj.positions.emplace_back(x[0], x[1]);
    traj.velocities.emplace_back(x[2], x[3]);
  };

  RealSeq samples = options.sample_times;
  std::sort(samples.begin(), samples.end());
  if (direction < 0) std::reverse(samples.begin(), samples.end());
  std::size_t next = 0;
  // Samples at the start time.
  while (next < samples.size() && direction * (samples[next] - t0) <= 0.0) {
    if (samples[next] == t0) record(t0, {q0.real(), q0.imag(), v0.real(), v0.imag()});
    ++next;
  }
  const bool every_step = samples.empty();
  if (every_step) record(t0, {q0.real(), q0.imag(), v0.real(), v0.imag()});

  const double span = std::abs(t1 - t0);
  traj.final_time = t0;
  if (span == 0.0) {
    if (direction < 0) {
      std::reverse(traj.times.begin(), traj.times.end());
      std::reverse(traj.positions.begin(), traj.positions.end());
      std::reverse(traj.velocities.begin(), traj.velocities.end());
    }
    return traj;
  }
  stepper.initialize(State{q0.real(), q0.imag(), v0.real(), v0.imag()}, t0, direction * std::min(1e-3, span));

  State x{};
  try {
    while (direction * (stepper.current_time() - t1) < 0.0) {
      auto [from, to] = stepper.do_step(system);
      if (std::abs(to - from) < options.min_step) {
        traj.terminated = Termination::step_failure;
        break;
      }
      // Dense output for the samples inside this step (clipped at t1).
      while (next < samples.size() && direction * (samples[next] - to) <= 0.0 &&
             direction * (samples[next] - t1) <= 0.0) {
        stepper.calc_state(samples[next], x);
        record(samples[next], x);
        ++next;
      }
      const State& cur = stepper.current_state();
      if (every_step && direction * (to - t1) < 0.0) record(to, cur);
      traj.final_time = to;
      if (min_primary_distance({cur[0], cur[1]}) < options.collision_clearance) {
        traj.terminated = Termination::collision_proximity;
        break;
      }
      if (!std::isfinite(cur[0]) || !std::isfinite(cur[2])) {
        traj.terminated = Termination::step_failure;
        break;
      }
    }
  } catch (const odeint::step_adjustment_error&) {
    traj.terminated = Termination::step_failure;
  }
  if (traj.terminated == Termination::completed) {
    traj.final_time = t1;
    if (every_step) {
      stepper.calc_state(t1, x);
      record(t1, x);
    }
  }
  if (direction < 0) {
    std::reverse(traj.times.begin(), traj.times.end());
    std::reverse(traj.positions.begin(), traj.positions.end());
    std::reverse(traj.velocities.begin(), traj.velocities.end());
  }
  return traj;
}

PhiProfile phi_profile(const PhysicalLoop& q, const FieldConfig& cfg, double C, const DiscreteLoop* source,
                       double collision_clearance) {
  PhiProfile out;
  out.C = C;
  const std::size_t m = q.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool electric = !cfg.electric.is_zero();

  // t-grid profile.
  ComplexSeq v = q.velocities;
  if (v.size() != m) v = spectral::derivative(q.samples, 1.0);
  RealSeq tail(m, 0.0);
  if (electric && m > 0) {
    RealSeq edot(m);
    for (std::size_t j = 0; j < m; ++j) edot[j] = cfg.electric.time_derivative(q.node(j), q.samples[j]);
    const RealSeq s = spectral::cumulative_integral(edot);
    for (std::size_t j = 0; j < m; ++j) tail[j] = s[m] - s[j];
  }
  out.phi.assign(m, nan);
  out.masked.assign(m, false);
  double sum = 0.0;
  bool any_masked = false;
  for (std::size_t j = 0; j < m; ++j) {
    const ComplexPoint p = q.samples[j];
    if (!is_finite(v[j]) || min_primary_distance(p) < 10.0 * collision_clearance) {
      out.masked[j] = true;
      any_masked = true;
      continue;
    }
    const double t = q.node(j);
    const double e = electric ? cfg.electric.value(t, p) : 0.0;
    const double phi = C - 0.5 * std::norm(v[j]) - two_center_potential(p, cfg.mu) - tail[j] - e;
    out.phi[j] = phi;
    sum += phi;
    out.sup_phi = std::max(out.sup_phi, std::abs(phi));
  }
  out.mean_phi_t = any_masked || m == 0 ? nan : sum / static_cast<double>(m);
  out.mean_phi = out.mean_phi_t;

  if (source == nullptr) return out;

  // tau-grid profile via Psi = 4 w Phi, finite through collisions.
  const DiscreteLoop& z = *source;
  const std::size_t n = z.size();
  const ComplexSeq zp = derivative(z);
  RealSeq w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = conformal_weight(z[j]);
  double F = 0.0;
  for (double x : w) F += x;
  F /= static_cast<double>(n);
  if (!(F > kDefaultZhatFloor)) throw DegenerateLoopError("degenerate loop: ẑ vanishes");
  const RealSeq s = spectral::cumulative_integral(w);
  RealSeq t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = s[j] / F;
  RealSeq tail_tau(n, 0.0);
  if (electric) {
    RealSeq density(n);
    for (std::size_t j = 0; j < n; ++j) density[j] = cfg.electric.time_derivative(t[j], birkhoff_map(z[j])) * w[j];
    const RealSeq cum = spectral::cumulative_integral(density);
    for (std::size_t j = 0; j < n; ++j) tail_tau[j] = (cum[n] - cum[j]) / F;
  }
  out.psi.resize(n);
  double weighted = 0.0;
  out.sup_phi_relative = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexPoint zz = z[j];
    const double r = std::abs(zz);
    const ComplexPoint qq = birkhoff_map(zz);
    const double e = electric ? cfg.electric.value(t[j], qq) : 0.0;
    // 4 w (1-mu)/|q+1| = 2 (1-mu) |z-1|^2/|z|, and likewise at +1.
    const double kinetic4w = 2.0 * F * F * std::norm(zp[j]) / (r * r);
    const double potential4w = 2.0 * (1.0 - cfg.mu) * std::norm(zz - 1.0) / r + 2.0 * cfg.mu * std::norm(zz + 1.0) / r;
    const double psi = 4.0 * w[j] * (C - tail_tau[j] - e) - kinetic4w + potential4w;
    out.psi[j] = psi;
    // int Phi dt = int Psi / (4 w) * w / F dtau = mean(Psi) / (4 F)
    weighted += psi;
    const double scale = 4.0 * w[j] * (std::abs(C) + std::abs(tail_tau[j]) + std::abs(e)) + kinetic4w + potential4w;
    if (scale > 0.0) out.sup_phi_relative = std::max(out.sup_phi_relative, std::abs(psi) / scale);
  }
  out.mean_phi = weighted / static_cast<double>(n) / (4.0 * F);
  return out;
}

RealSeq collision_times(const DiscreteLoop& z, double z_tolerance) {
  const LoopInterpolant interp(z);
  const TimeMap tm = time_map(z);
  const std::size_t fine = 8 * z.size();
  auto dist = [&](double tau) {
    const ComplexPoint p = interp(tau);
    return std::min(std::abs(p - 1.0), std::abs(p + 1.0));
  };
  RealSeq d(fine);
  for (std::size_t k = 0; k < fine; ++k) d[k] = dist(static_cast<double>(k) / static_cast<double>(fine));
  RealSeq out;
  const double h = 1.0 / static_cast<double>(fine);
  for (std::size_t k = 0; k < fine; ++k) {
    const double prev = d[(k + fine - 1) % fine];
    const double nxt = d[(k + 1) % fine];
    if (!(d[k] <= prev && d[k] < nxt)) continue;
    if (d[k] > 0.5) continue;
    // Gauss-Newton on z(tau) = target.
    double tau = static_cast<double>(k) * h;
    const ComplexPoint target = std::abs(interp(tau) - 1.0) < std::abs(interp(tau) + 1.0) ? 1.0 : -1.0;
    for (int it = 0; it < 50; ++it) {
      const ComplexPoint r = interp(tau) - target;
      const ComplexPoint dz = interp.derivative(tau);
      const double denom = std::norm(dz);
      if (denom == 0.0) break;
      const double step = dot(dz, r) / denom;
      tau -= std::clamp(step, -h, h);
      if (std::abs(step) < 1e-15) break;
    }
    if (std::abs(interp(tau) - target) > z_tolerance) continue;
    tau -= std::floor(tau);
    out.push_back(tm(tau));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), out.end());
  if (out.size() >= 2 && out.back() - out.front() > 1.0 - 1e-9) out.pop_back();
  return out;
}

VerifyReport verify_generalized(const OrbitRecord& orbit, const FieldConfig& cfg, const VerifyOptions& options) {
  VerifyReport report;
  const DiscreteLoop& z = orbit.z;
  const ReconstructedPath path(z);
  const double C = orbit.C;
  const bool electric = !cfg.electric.is_zero();

  // (1) collision set
  report.collision_times = collision_times(z, options.collision_z_tolerance);
  report.collision_count = report.collision_times.size();
  report.collisions_finite = report.collision_count < z.size() / 4;

  // Energy extension h(t) = |q'|^2/2 + U + E_t + int_t^1 Edot, constant (= C) on solutions.
  const std::size_t n = z.size();
  spectral::Antiderivative edot_integral;
  double F = path.time().zhat;
  if (electric) {
    RealSeq density(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = path.time().t_of_tau[j];
      density[j] = cfg.electric.time_derivative(t, birkhoff_map(z[j])) * conformal_weight(z[j]);
    }
    edot_integral = spectral::Antiderivative(density);
  }
  auto energy = [&](double t) {
    const ComplexPoint q = path.position(t);
    const ComplexPoint v = path.velocity(t);
    double h = 0.5 * std::norm(v) + two_center_potential(q, cfg.mu);
    if (electric) {
      const double wrapped = t - std::floor(t);
      const double tau = path.tau(wrapped);
      h += cfg.electric.value(wrapped, q) + (edot_integral(1.0) - edot_integral(tau)) / F;
    }
    return h;
  };

  const std::size_t m = options.m;
  auto node = [m](long k) { return static_cast<double>(k) / static_cast<double>(m); };

  // (3) energy continuity across each collision
  const double energy_scale = std::max(1.0, std::abs(C));
  for (double tc : report.collision_times) {
    long before = static_cast<long>(std::floor(tc * static_cast<double>(m)));
    long after = before + 1;
    while (min_primary_distance(path.position(node(before))) <= 10.0 * options.collision_clearance) --before;
    while (min_primary_distance(path.position(node(after))) <= 10.0 * options.collision_clearance) ++after;
    const double jump = std::abs(energy(node(after)) - energy(node(before))) / energy_scale;
    report.energy_jump = std::max(report.energy_jump, jump);
  }
  report.energy_ok = report.energy_jump < options.tol;

  // (2) re-integration on collision-free arcs
  IntegrateOptions iopt;
  iopt.tol = options.integrator_tol;
  iopt.collision_clearance = options.collision_clearance;
  auto compare = [&](double t_start, double t_end, double t_from) {
    RealSeq times;
    const long k0 = static_cast<long>(std::ceil(std::min(t_start, t_end) * static_cast<double>(m)));
    const long k1 = static_cast<long>(std::floor(std::max(t_start, t_end) * static_cast<double>(m)));
    for (long k = k0; k <= k1; ++k) {
      const double t = node(k);
      if (min_primary_distance(path.position(t)) > options.arc_clearance) times.push_back(t);
    }
    if (times.empty()) return;
    // Stop short of the primaries: the integrator aborts at the clearance.
    iopt.sample_times = times;
    iopt.collision_clearance = std::max(options.collision_clearance, 0.5 * options.arc_clearance);
    const Trajectory tr = integrate(path.position(t_from), path.velocity(t_from), t_from, t_end, cfg, iopt);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const double err = std::abs(tr.positions[i] - path.position(tr.times[i]));
      report.arc_error = std::max(report.arc_error, err);
    }
  };

  if (report.collision_count == 0) {
    compare(0.0, 1.0, 0.0);
    // (4) closure of the integrated orbit
    iopt.sample_times = {1.0};
    const Trajectory tr = integrate(path.position(0.0), path.velocity(0.0), 0.0, 1.0, cfg, iopt);
    if (tr.terminated == Termination::completed && !tr.positions.empty()) {
      report.closure_error = std::abs(tr.positions.back() - path.position(0.0));
    } else {
      report.closure_error = std::numeric_limits<double>::infinity();
    }
  } else {
    const RealSeq& tc = report.collision_times;
    for (std::size_t i = 0; i < tc.size(); ++i) {
      const double ta = tc[i];
      const double tb = i + 1 < tc.size() ? tc[i + 1] : tc[0] + 1.0;
      const double tm = 0.5 * (ta + tb);
      compare(tm, tb, tm);
      compare(tm, ta, tm);
    }
    report.closure_error = std::abs(path.position(1.0) - path.position(0.0));
  }
  report.arcs_ok = report.arc_error < options.tol;
  report.closure_ok = report.closure_error < options.tol;
  return report;
}

}  // namespace szbov
