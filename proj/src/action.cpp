#include "szbov/action.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

namespace szbov {

namespace {

enum class Fault { none, F, G, H1, H2, M, E };
std::atomic<Fault> g_fault{Fault::none};

// Everything the quadratures need, evaluated once per loop.
struct LoopData {
  std::size_t n = 0;
  ComplexSeq z;
  ComplexSeq zp;
  // Double cover for twisted loops (the samples themselves otherwise). The
  // derivative terms are averaged over the whole cover so that the discrete
  // functional is exactly invariant under z -> 1/z.
  ComplexSeq cover;
  ComplexSeq cover_zp;
  RealSeq w;
  double F = 0.0;
  RealSeq t;  // t_z at the nodes, first n entries
};

LoopData prepare(const DiscreteLoop& loop, double zhat_floor) {
  LoopData d;
  d.n = loop.size();
  d.z = loop.samples();
  d.cover = loop.double_cover();
  d.cover_zp = spectral::derivative(d.cover, loop.cover_period());
  d.zp.assign(d.cover_zp.begin(), d.cover_zp.begin() + static_cast<std::ptrdiff_t>(d.n));
  d.w.resize(d.n);
  double sum = 0.0;
  for (std::size_t j = 0; j < d.n; ++j) {
    d.w[j] = conformal_weight(d.z[j]);
    sum += d.w[j];
  }
  d.F = sum / static_cast<double>(d.n);
  if (!(d.F > zhat_floor)) throw DegenerateLoopError("degenerate loop: ẑ vanishes");
  RealSeq s = spectral::cumulative_integral(d.w);
  d.t.resize(d.n);
  for (std::size_t j = 0; j < d.n; ++j) d.t[j] = s[j] / d.F;
  return d;
}

// Pull a cotangent on the cover samples back to the stored samples.
ComplexSeq fold_cover(const DiscreteLoop& loop, const ComplexSeq& bar_cover) {
  const std::size_t n = loop.size();
  ComplexSeq out(bar_cover.begin(), bar_cover.begin() + static_cast<std::ptrdiff_t>(n));
  if (loop.twisted()) {
    for (std::size_t j = 0; j < n; ++j) {
      const ComplexPoint z = loop[j];
      // d(1/z) = -dz / z^2
      out[j] += std::conj(-1.0 / (z * z)) * bar_cover[n + j];
    }
  }
  return out;
}

struct Components {
  double G = 0.0, H1 = 0.0, H2 = 0.0, M = 0.0, E = 0.0, E1 = 0.0;
};

Components quadratures(const LoopData& d, const FieldConfig& cfg) {
  Components c;
  const bool magnetic = !cfg.magnetic.is_zero();
  const bool electric = !cfg.electric.is_zero();
  RealSeq edot_w(electric ? d.n : 0);
  for (std::size_t j = 0; j < d.n; ++j) {
    const ComplexPoint z = d.z[j];
    const double r = std::abs(z);
    c.H1 += 0.5 * std::norm(z - 1.0) / r;
    c.H2 += 0.5 * std::norm(z + 1.0) / r;
    if (magnetic || electric) {
      const ComplexPoint q = birkhoff_map(z);
      if (electric) {
        c.E += cfg.electric.value(d.t[j], q) * d.w[j];
        edot_w[j] = cfg.electric.time_derivative(d.t[j], q) * d.w[j];
      }
    }
  }
  const std::size_t len = d.cover.size();
  for (std::size_t j = 0; j < len; ++j) {
    const ComplexPoint z = d.cover[j];
    c.G += 0.5 * std::norm(d.cover_zp[j]) / std::norm(z);
    if (magnetic) c.M += dot(cfg.magnetic.potential(birkhoff_map(z)), birkhoff_derivative(z) * d.cover_zp[j]);
  }
  c.G /= static_cast<double>(len);
  c.M /= static_cast<double>(len);
  const double inv_n = 1.0 / static_cast<double>(d.n);
  c.H1 *= inv_n;
  c.H2 *= inv_n;
  c.E *= inv_n / d.F;
  if (electric) {
    // int t Edot dt, written as int (int_t^1 Edot) dt with the same cumulative
    // quadrature as the tail, so the mean of Phi vanishes exactly on the grid.
    const RealSeq cum = spectral::cumulative_integral(edot_w);
    for (std::size_t j = 0; j < d.n; ++j) c.E1 += d.w[j] * (cum[d.n] - cum[j]);
    c.E1 *= inv_n / (d.F * d.F);
  }
  return c;
}

ActionBreakdown breakdown_from(const LoopData& d, const Components& c, double mu) {
  ActionBreakdown b;
  b.F = d.F;
  b.G = c.G;
  b.H1 = c.H1;
  b.H2 = c.H2;
  b.M = c.M;
  b.E_val = c.E;
  b.E1 = c.E1;
  b.total = assemble_total(b, mu);
  return b;
}

ComponentGradients compute_gradients(const DiscreteLoop& loop, const LoopData& d, const FieldConfig& cfg,
                                     double E_val) {
  const std::size_t n = d.n;
  const double inv_n = 1.0 / static_cast<double>(n);
  ComponentGradients g;
  g.F.resize(n);
  g.H1.resize(n);
  g.H2.resize(n);
  g.E.assign(n, ComplexPoint{});

  RealSeq bar_t(n, 0.0);
  RealSeq bar_w_E(n, 0.0);
  const bool magnetic = !cfg.magnetic.is_zero();
  const bool electric = !cfg.electric.is_zero();

  for (std::size_t j = 0; j < n; ++j) {
    const ComplexPoint z = d.z[j];
    const double r = std::abs(z);
    const double r3 = r * r * r;
    const ComplexPoint grad_w = conformal_weight_gradient(z);
    g.F[j] = inv_n * grad_w;
    g.H1[j] = 0.5 * inv_n * (2.0 * (z - 1.0) / r - std::norm(z - 1.0) * z / r3);
    g.H2[j] = 0.5 * inv_n * (2.0 * (z + 1.0) / r - std::norm(z + 1.0) * z / r3);

    if (electric) {
      const ComplexPoint q = birkhoff_map(z);
      const ComplexPoint bp = birkhoff_derivative(z);
      {
        const double scale = inv_n / d.F;
        const double e = cfg.electric.value(d.t[j], q);
        const double e_dot = cfg.electric.time_derivative(d.t[j], q);
        const ComplexPoint e_grad = cfg.electric.gradient(d.t[j], q);
        g.E[j] = scale * d.w[j] * std::conj(bp) * e_grad;
        bar_w_E[j] = scale * e;
        bar_t[j] = scale * e_dot * d.w[j];
      }
    }
  }

  // G and M are averages over the cover: direct partials plus the adjoint of
  // the spectral derivative (which is skew), then folded onto the samples.
  const std::size_t len = d.cover.size();
  const double inv_len = 1.0 / static_cast<double>(len);
  const double period = loop.cover_period();
  {
    ComplexSeq direct(len), bar_zp(len);
    for (std::size_t j = 0; j < len; ++j) {
      const ComplexPoint z = d.cover[j];
      const double r2 = std::norm(z);
      direct[j] = -inv_len * std::norm(d.cover_zp[j]) * z / (r2 * r2);
      bar_zp[j] = inv_len * d.cover_zp[j] / r2;
    }
    const ComplexSeq back = spectral::derivative(bar_zp, period);
    for (std::size_t j = 0; j < len; ++j) direct[j] -= back[j];
    g.G = fold_cover(loop, direct);
  }
  if (magnetic) {
    ComplexSeq direct(len), bar_zp(len);
    for (std::size_t j = 0; j < len; ++j) {
      const ComplexPoint z = d.cover[j];
      const ComplexPoint zp = d.cover_zp[j];
      const ComplexPoint q = birkhoff_map(z);
      const ComplexPoint bp = birkhoff_derivative(z);
      const ComplexPoint a = cfg.magnetic.potential(q);
      const ComplexPoint u = bp * zp;
      const auto jac = cfg.magnetic.potential_jacobian(q);
      // J^T u with J = [[d1a1, d2a1], [d1a2, d2a2]]
      const ComplexPoint bar_q{jac[0] * u.real() + jac[2] * u.imag(), jac[1] * u.real() + jac[3] * u.imag()};
      direct[j] = inv_len * (std::conj(bp) * bar_q + std::conj(zp / (z * z * z)) * a);
      bar_zp[j] = inv_len * std::conj(bp) * a;
    }
    const ComplexSeq back = spectral::derivative(bar_zp, period);
    for (std::size_t j = 0; j < len; ++j) direct[j] -= back[j];
    g.M = fold_cover(loop, direct);
  } else {
    g.M.assign(n, ComplexPoint{});
  }
  if (electric) {
    // E = (1/(N F)) sum e_j w_j with t_j = S_j / F.
    double bar_F = -E_val / d.F;
    RealSeq bar_s(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      bar_s[j] = bar_t[j] / d.F;
      bar_F -= bar_t[j] * d.t[j] / d.F;
    }
    RealSeq from_s = spectral::cumulative_integral_adjoint(bar_s);
    for (std::size_t j = 0; j < n; ++j) {
      const double bar_w = bar_w_E[j] + from_s[j] + bar_F * inv_n;
      g.E[j] += bar_w * conformal_weight_gradient(d.z[j]);
    }
  }

  switch (g_fault.load()) {
    case Fault::none: break;
    case Fault::F: for (auto& v : g.F) v = -v; break;
    case Fault::G: for (auto& v : g.G) v = -v; break;
    case Fault::H1: for (auto& v : g.H1) v = -v; break;
    case Fault::H2: for (auto& v : g.H2) v = -v; break;
    case Fault::M: for (auto& v : g.M) v = -v; break;
    case Fault::E: for (auto& v : g.E) v = -v; break;
  }
  return g;
}

ComplexSeq combine(const ComponentGradients& g, const ActionBreakdown& b, double mu) {
  const double p = (1.0 - mu) * b.H1 + mu * b.H2;
  const double cF = b.G - p / (b.F * b.F);
  const double cG = b.F;
  const double cH1 = (1.0 - mu) / b.F;
  const double cH2 = mu / b.F;
  ComplexSeq out(g.F.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = cF * g.F[j] + cG * g.G[j] + cH1 * g.H1[j] + cH2 * g.H2[j] + g.M[j] - g.E[j];
  }
  return out;
}

}  // namespace

double assemble_total(const ActionBreakdown& b, double mu) {
  return b.F * b.G + ((1.0 - mu) * b.H1 + mu * b.H2) / b.F + b.M - b.E_val;
}

double delay_constant(const ActionBreakdown& b, double mu) {
  return b.F * b.G - ((1.0 - mu) * b.H1 + mu * b.H2) / b.F + b.E_val + b.E1;
}

ActionBreakdown eval_components(const DiscreteLoop& z, const FieldConfig& cfg, double zhat_floor) {
  check_mass_parameter(cfg.mu);
  const LoopData d = prepare(z, zhat_floor);
  return breakdown_from(d, quadratures(d, cfg), cfg.mu);
}

double eval_action(const DiscreteLoop& z, const FieldConfig& cfg, double zhat_floor) {
  return eval_components(z, cfg, zhat_floor).total;
}

double eval_unregularized(const PhysicalLoop& q, const FieldConfig& cfg, double collision_clearance) {
  check_mass_parameter(cfg.mu);
  const std::size_t m = q.size();
  if (m == 0) throw ValidationError("unregularized action: empty loop");
  for (const auto& p : q.samples) {
    if (!is_finite(p)) throw DomainError("unregularized action: non-finite sample");
    if (std::abs(p - kMinusPrimary) < collision_clearance || std::abs(p - kPlusPrimary) < collision_clearance) {
      throw DomainError("unregularized action singular near collision");
    }
  }
  const ComplexSeq v = spectral::derivative(q.samples, 1.0);
  double kinetic = 0.0, circulation = 0.0, potential = 0.0, electric = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const ComplexPoint p = q.samples[j];
    const double t = q.node(j);
    kinetic += 0.5 * std::norm(v[j]);
    circulation += dot(cfg.magnetic.potential(p), v[j]);
    potential += (1.0 - cfg.mu) / std::abs(p + 1.0) + cfg.mu / std::abs(p - 1.0);
    electric += cfg.electric.value(t, p);
  }
  return (kinetic + circulation + potential - electric) / static_cast<double>(m);
}

ComponentGradients component_gradients(const DiscreteLoop& z, const FieldConfig& cfg, double zhat_floor) {
  check_mass_parameter(cfg.mu);
  const LoopData d = prepare(z, zhat_floor);
  const Components c = quadratures(d, cfg);
  return compute_gradients(z, d, cfg, c.E);
}

ActionAndGradient action_and_gradient(const DiscreteLoop& z, const FieldConfig& cfg, double zhat_floor) {
  check_mass_parameter(cfg.mu);
  const LoopData d = prepare(z, zhat_floor);
  const Components c = quadratures(d, cfg);
  ActionAndGradient out;
  out.breakdown = breakdown_from(d, c, cfg.mu);
  out.grad = combine(compute_gradients(z, d, cfg, c.E), out.breakdown, cfg.mu);
  return out;
}

ComplexSeq gradient(const DiscreteLoop& z, const FieldConfig& cfg, double zhat_floor) {
  return action_and_gradient(z, cfg, zhat_floor).grad;
}

DelayResidual delay_residual(const DiscreteLoop& loop, const FieldConfig& cfg, double zhat_floor) {
  check_mass_parameter(cfg.mu);
  const LoopData d = prepare(loop, zhat_floor);
  const Components c = quadratures(d, cfg);
  const ActionBreakdown b = breakdown_from(d, c, cfg.mu);
  const double mu = cfg.mu;
  const double F = d.F;
  const std::size_t n = d.n;

  DelayResidual out;
  out.C = delay_constant(b, mu);
  out.residual.resize(n);
  out.eps1.assign(n, ComplexPoint{});
  out.eps2.assign(n, ComplexPoint{});
  out.eps3.assign(n, ComplexPoint{});
  const ComplexSeq zpp = second_derivative(loop);

  // tail_j = int_{t_j}^1 dE/dt ds, by reverse cumulative quadrature in tau:
  // int_{tau_j}^1 Edot w dtau = F * tail_j.
  RealSeq tail(n, 0.0);
  const bool electric = !cfg.electric.is_zero();
  if (electric) {
    RealSeq density(n);
    for (std::size_t j = 0; j < n; ++j) {
      density[j] = cfg.electric.time_derivative(d.t[j], birkhoff_map(d.z[j])) * d.w[j];
    }
    const RealSeq s = spectral::cumulative_integral(density);
    for (std::size_t j = 0; j < n; ++j) tail[j] = (s[n] - s[j]) / F;
  }

  const double inv_2f2 = 0.5 / (F * F);
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexPoint z = d.z[j];
    const ComplexPoint zp = d.zp[j];
    const ComplexPoint zb = std::conj(z);
    const double r = std::abs(z);
    const double r2 = r * r;
    const ComplexPoint q = birkhoff_map(z);
    ComplexPoint rhs = inv_2f2 * out.C * z * (z * z - 1.0) * (zb * zb + 1.0) / r2;
    rhs += zb * zp * zp / r2;
    rhs += inv_2f2 * ((1.0 - mu) * z * (z - 1.0) * (zb + 1.0) / r + mu * z * (z + 1.0) * (zb - 1.0) / r);
    rhs -= (d.w[j] / F) * cfg.magnetic.field(q) * kI * zp;
    if (electric) {
      const ComplexPoint a = conformal_weight_gradient(z);
      out.eps1[j] = tail[j] * a;
      out.eps2[j] = cfg.electric.gradient(d.t[j], q) * (0.5 * (1.0 - 1.0 / (zb * zb))) * d.w[j];
      out.eps3[j] = cfg.electric.value(d.t[j], q) * a;
      rhs -= (r2 / (F * F)) * (out.eps1[j] + out.eps2[j] + out.eps3[j]);
    }
    out.residual[j] = zpp[j] - rhs;
    out.sup_norm = std::max(out.sup_norm, std::abs(out.residual[j]));
    out.z2_scale = std::max(out.z2_scale, std::abs(zpp[j]));
  }
  return out;
}

namespace testing {

void inject_gradient_fault(std::string_view component) {
  Fault f = Fault::none;
  if (component == "F") f = Fault::F;
  else if (component == "G") f = Fault::G;
  else if (component == "H1") f = Fault::H1;
  else if (component == "H2") f = Fault::H2;
  else if (component == "M") f = Fault::M;
  else if (component == "E") f = Fault::E;
  else if (!component.empty()) throw ValidationError("unknown gradient component '" + std::string(component) + "'");
  g_fault.store(f);
}

}  // namespace testing

}  // namespace szbov
