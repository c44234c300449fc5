#include "szbov/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "szbov/dynamics.hpp"

namespace szbov {

namespace seeds {

DiscreteLoop circle(ComplexPoint center, double radius, std::size_t n) {
  if (!(radius > 0.0)) throw ValidationError("circle seed: radius must be positive");
  ComplexSeq s(n);
  for (std::size_t j = 0; j < n; ++j) {
    s[j] = center + std::polar(radius, kTwoPi * static_cast<double>(j) / static_cast<double>(n));
  }
  return DiscreteLoop(std::move(s));
}

namespace {

PhysicalLoop sampled(std::size_t m, const std::function<ComplexPoint(double)>& f) {
  PhysicalLoop q;
  q.samples.resize(m);
  for (std::size_t j = 0; j < m; ++j) q.samples[j] = f(static_cast<double>(j) / static_cast<double>(m));
  return q;
}

}  // namespace

DiscreteLoop ellipse_lift(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("ellipse seed: semi-axes must be positive");
  const auto q = sampled(std::max<std::size_t>(4 * n, 512),
                         [&](double t) { return ComplexPoint{a * std::cos(kTwoPi * t), b * std::sin(kTwoPi * t)}; });
  return lift(q, n);
}

DiscreteLoop kepler_guess(double side, double radius, std::size_t n) {
  if (side != 1.0 && side != -1.0) throw ValidationError("kepler seed: side must be -1 or +1");
  if (!(radius > 0.0)) throw ValidationError("kepler seed: radius must be positive");
  const auto q = sampled(std::max<std::size_t>(4 * n, 512),
                         [&](double t) { return side + std::polar(radius, kTwoPi * t); });
  return lift(q, n);
}

DiscreteLoop radial(double side, ComplexPoint kappa, std::size_t n) {
  if (side != 1.0 && side != -1.0) throw ValidationError("radial seed: side must be -1 or +1");
  ComplexSeq s(n);
  for (std::size_t j = 0; j < n; ++j) {
    s[j] = side * std::exp(kappa * std::sin(kPi * static_cast<double>(j) / static_cast<double>(n)));
  }
  return DiscreteLoop(std::move(s), true);
}

DiscreteLoop resample(const DiscreteLoop& loop, std::size_t n) {
  if (n == loop.size()) return loop;
  const spectral::TrigInterpolant interp(loop.double_cover(), loop.cover_period());
  ComplexSeq s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = interp(static_cast<double>(j) / static_cast<double>(n));
  return DiscreteLoop(std::move(s), loop.twisted());
}

}  // namespace seeds

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Vec pack(const ComplexSeq& s, double scale = 1.0) {
  Vec v(2 * static_cast<Eigen::Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) {
    v[2 * static_cast<Eigen::Index>(j)] = scale * s[j].real();
    v[2 * static_cast<Eigen::Index>(j) + 1] = scale * s[j].imag();
  }
  return v;
}

ComplexSeq unpack(const Vec& v) {
  ComplexSeq s(static_cast<std::size_t>(v.size() / 2));
  for (std::size_t j = 0; j < s.size(); ++j) {
    s[j] = {v[2 * static_cast<Eigen::Index>(j)], v[2 * static_cast<Eigen::Index>(j) + 1]};
  }
  return s;
}

unsigned worker_count(const SolveOptions& opt, const FieldConfig& cfg) {
  if (!cfg.thread_safe) return 1;
  unsigned n = opt.threads;
  if (n == 0) {
    if (const char* env = std::getenv("SZBOV_THREADS")) n = static_cast<unsigned>(std::max(1, std::atoi(env)));
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

// Residual r = N * gradient, as 2N reals.
Vec residual(const DiscreteLoop& z, const FieldConfig& cfg, double floor) {
  return pack(gradient(z, cfg, floor), static_cast<double>(z.size()));
}

double sup_norm(const Vec& r) {
  double m = 0.0;
  for (Eigen::Index j = 0; j + 1 < r.size(); j += 2) m = std::max(m, std::hypot(r[j], r[j + 1]));
  return m;
}

Mat jacobian(const DiscreteLoop& z, const FieldConfig& cfg, const SolveOptions& opt) {
  const Vec x = pack(z.samples());
  const Eigen::Index dim = x.size();
  double scale = 0.0;
  for (auto s : z.samples()) scale = std::max(scale, std::abs(s));
  const double h = opt.fd_step * std::max(scale, 1e-3);
  Mat J(dim, dim);
  std::atomic<Eigen::Index> next{0};
  auto work = [&]() {
    for (Eigen::Index k = next++; k < dim; k = next++) {
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const Vec rp = residual(DiscreteLoop(unpack(xp), z.twisted()), cfg, 0.0);
      const Vec rm = residual(DiscreteLoop(unpack(xm), z.twisted()), cfg, 0.0);
      J.col(k) = (rp - rm) / (2.0 * h);
    }
  };
  const unsigned workers = std::min<unsigned>(worker_count(opt, cfg), static_cast<unsigned>(dim));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  // The exact Jacobian is a scaled Hessian; symmetrizing removes FD noise.
  return 0.5 * (J + J.transpose());
}

bool admissible(const ComplexSeq& s, const SolveOptions& opt) {
  for (auto v : s) {
    if (!is_finite(v) || std::abs(v) <= opt.origin_clearance) return false;
  }
  return true;
}

}  // namespace

double gradient_norm(const DiscreteLoop& z, const FieldConfig& cfg) {
  return sup_norm(residual(z, cfg, 0.0));
}

OrbitRecord make_record(const DiscreteLoop& z, const FieldConfig& cfg, std::size_t m) {
  OrbitRecord rec;
  rec.z = z;
  rec.twisted = z.twisted();
  rec.cfg = cfg;
  const auto ag = action_and_gradient(z, cfg);
  rec.breakdown = ag.breakdown;
  rec.C = delay_constant(ag.breakdown, cfg.mu);
  double g = 0.0;
  for (auto v : ag.grad) g = std::max(g, std::abs(v));
  rec.grad_norm = g * static_cast<double>(z.size());
  rec.delay_sup = delay_residual(z, cfg).relative();
  rec.q = reconstruct(z, m);
  rec.phi_sup = phi_profile(rec.q, cfg, rec.C, &z).sup_phi_relative;
  rec.q.collision_times = collision_times(z);
  // Winding about a primary the loop passes through is meaningless.
  if (!rec.q.collision_times.empty()) {
    rec.winding_defined = false;
    return rec;
  }
  try {
    rec.winding = winding_report(rec.q.samples);
    rec.winding_defined = true;
  } catch (const DomainError&) {
    rec.winding_defined = false;
  }
  return rec;
}

OrbitRecord solve(const DiscreteLoop& seed, const FieldConfig& cfg, const SolveOptions& opt) {
  check_mass_parameter(cfg.mu);
  if (!(opt.g_tol > 0.0) || opt.max_iterations <= 0 || !(opt.fd_step > 0.0)) {
    throw ValidationError("solver options: tolerances and iteration cap must be positive");
  }
  zhat(seed, opt.zhat_floor);

  DiscreteLoop z = seed;
  const bool twisted = seed.twisted();

  // Optional gradient-flow warm-up on the L^2 density.
  for (int k = 0; k < opt.warmup_steps; ++k) {
    const ComplexSeq g = gradient(z, cfg, opt.zhat_floor);
    ComplexSeq s = z.samples();
    for (std::size_t j = 0; j < s.size(); ++j) s[j] -= opt.warmup_step * static_cast<double>(s.size()) * g[j];
    if (!admissible(s, opt)) break;
    z = DiscreteLoop(std::move(s), twisted);
  }

  const bool phase = opt.phase_fix && cfg.autonomous();
  const Vec x_seed = pack(z.samples());
  Vec phase_row;
  if (phase) {
    phase_row = pack(derivative(z));
    phase_row /= phase_row.norm();
  }
  double phase_weight = 0.0;

  auto merit_parts = [&](const DiscreteLoop& loop, Vec& r) {
    r = residual(loop, cfg, opt.zhat_floor);
    double m = 0.5 * r.squaredNorm();
    if (phase) {
      const double c = phase_weight * phase_row.dot(pack(loop.samples()) - x_seed);
      m += 0.5 * c * c;
    }
    return m;
  };

  Vec r;
  double merit = 0.0;
  try {
    r = residual(z, cfg, opt.zhat_floor);
  } catch (const DegenerateLoopError&) {
    throw DegeneratedError("degenerated toward excluded locus");
  }
  double gnorm = sup_norm(r);
  double lambda_rel = opt.lambda0;
  int iter = 0;
  bool first = true;

  while (gnorm >= opt.g_tol && iter < opt.max_iterations) {
    const Mat H = jacobian(z, cfg, opt);
    const Eigen::Index dim = H.rows();
    if (first) {
      phase_weight = phase ? H.colwise().norm().mean() : 0.0;
      merit = merit_parts(z, r);
      first = false;
    }
    Mat J = H;
    Vec rhs = r;
    const Vec x = pack(z.samples());
    if (phase) {
      J.conservativeResize(dim + 1, dim);
      J.row(dim) = phase_weight * phase_row.transpose();
      rhs.conservativeResize(dim + 1);
      rhs[dim] = phase_weight * phase_row.dot(x - x_seed);
    }
    Eigen::BDCSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    const Vec ut_r = svd.matrixU().transpose() * rhs;
    const double smax2 = sv.size() > 0 ? sv[0] * sv[0] : 1.0;

    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      const double lambda = lambda_rel * smax2;
      Vec coeff(sv.size());
      for (Eigen::Index i = 0; i < sv.size(); ++i) coeff[i] = sv[i] / (sv[i] * sv[i] + lambda) * ut_r[i];
      const Vec step = -(svd.matrixV() * coeff);
      const ComplexSeq trial = unpack(x + step);
      if (admissible(trial, opt)) {
        try {
          DiscreteLoop candidate(trial, twisted);
          Vec r_new;
          const double m_new = merit_parts(candidate, r_new);
          if (std::isfinite(m_new) && m_new < merit) {
            z = std::move(candidate);
            r = std::move(r_new);
            merit = m_new;
            lambda_rel = std::max(lambda_rel * opt.lambda_decrease, 1e-15);
            accepted = true;
            break;
          }
        } catch (const DomainError&) {
          // zhat collapsed or a sample hit the origin: shrink the step.
        }
      }
      lambda_rel *= opt.lambda_increase;
      if (lambda_rel > 1e12) break;
    }
    ++iter;
    if (!accepted) break;
    gnorm = sup_norm(r);
    if (opt.progress) opt.progress(iter, gnorm, eval_action(z, cfg, opt.zhat_floor));
  }

  if (zhat(z, 0.0) <= opt.zhat_floor * 10.0) throw DegeneratedError("degenerated toward excluded locus");
  OrbitRecord rec = make_record(z, cfg, opt.m);
  rec.iterations = iter;
  rec.converged = rec.grad_norm < opt.g_tol;
  if (!rec.converged) {
    throw NoConvergenceError("no convergence: gradient norm " + std::to_string(rec.grad_norm) + " after " +
                                 std::to_string(iter) + " iterations",
                             rec);
  }
  return rec;
}

std::vector<OrbitRecord> continue_family(const OrbitRecord& start, const std::vector<FieldConfig>& path,
                                         const SolveOptions& opt) {
  std::vector<OrbitRecord> family{start};
  for (std::size_t i = 0; i < path.size(); ++i) {
    try {
      family.push_back(solve(family.back().z, path[i], opt));
    } catch (const std::exception& e) {
      if (i == 0) throw ContinuationError(std::string("continuation failed at first step: ") + e.what(), path[i]);
      break;
    }
  }
  return family;
}

NormalSpectrum normal_spectrum(const DiscreteLoop& z, const FieldConfig& cfg, bool phase_fix,
                               const SolveOptions& opt) {
  Mat J = jacobian(z, cfg, opt);
  const Eigen::Index dim = J.rows();
  if (phase_fix) {
    Vec row = pack(derivative(z));
    row /= row.norm();
    const double weight = J.colwise().norm().mean();
    J.conservativeResize(dim + 1, dim);
    J.row(dim) = weight * row.transpose();
  }
  const Mat normal = J.transpose() * J;
  Eigen::SelfAdjointEigenSolver<Mat> eig(normal, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues()[0], eig.eigenvalues()[dim - 1]};
}

}  // namespace szbov
