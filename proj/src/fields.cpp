#include "szbov/fields.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace szbov {

double MagneticSpec::field(ComplexPoint q) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::constant: return b;
    case Kind::custom: return custom_field(q);
  }
  return 0.0;
}

ComplexPoint MagneticSpec::potential(ComplexPoint q) const {
  switch (kind) {
    case Kind::zero: return {};
    case Kind::constant: return {-0.5 * b * q.imag(), 0.5 * b * q.real()};
    case Kind::custom: return custom_potential(q);
  }
  return {};
}

std::array<double, 4> MagneticSpec::potential_jacobian(ComplexPoint q) const {
  switch (kind) {
    case Kind::zero: return {0.0, 0.0, 0.0, 0.0};
    case Kind::constant: return {0.0, -0.5 * b, 0.5 * b, 0.0};
    case Kind::custom: return custom_potential_jacobian(q);
  }
  return {0.0, 0.0, 0.0, 0.0};
}

ComplexPoint ElectricSpec::charge_position(double t) const {
  return std::polar(r_s, kTwoPi * static_cast<double>(k) * t + theta0);
}

double ElectricSpec::value(double t, ComplexPoint q) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::uniform_oscillating: return eps * std::cos(kTwoPi * t) * dot(direction, q);
    case Kind::rotating_charge: return -mu_s / std::abs(q - charge_position(t));
    case Kind::custom: return custom_value(t, q);
  }
  return 0.0;
}

ComplexPoint ElectricSpec::gradient(double t, ComplexPoint q) const {
  switch (kind) {
    case Kind::zero: return {};
    case Kind::uniform_oscillating: return eps * std::cos(kTwoPi * t) * direction;
    case Kind::rotating_charge: {
      const ComplexPoint r = q - charge_position(t);
      const double d = std::abs(r);
      return mu_s * r / (d * d * d);
    }
    case Kind::custom: return custom_gradient(t, q);
  }
  return {};
}

double ElectricSpec::time_derivative(double t, ComplexPoint q) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::uniform_oscillating:
      return -kTwoPi * eps * std::sin(kTwoPi * t) * dot(direction, q);
    case Kind::rotating_charge: {
      const ComplexPoint qs = charge_position(t);
      const ComplexPoint qs_dot = kI * (kTwoPi * static_cast<double>(k)) * qs;
      // dE/dt = -<grad E, dq_s/dt>
      return -dot(gradient(t, q), qs_dot);
    }
    case Kind::custom: return custom_time_derivative(t, q);
  }
  return 0.0;
}

bool ElectricSpec::is_zero() const {
  switch (kind) {
    case Kind::zero: return true;
    case Kind::uniform_oscillating: return eps == 0.0 || direction == ComplexPoint{};
    case Kind::rotating_charge: return mu_s == 0.0;
    case Kind::custom: return false;
  }
  return true;
}

void check_mass_parameter(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw ValidationError("mass parameter mu must lie in [0, 1], got " + std::to_string(mu));
  }
}

namespace presets {

MagneticSpec zero_magnetic() { return {}; }

MagneticSpec constant_magnetic(double b) {
  MagneticSpec m;
  m.kind = MagneticSpec::Kind::constant;
  m.b = b;
  return m;
}

ElectricSpec zero_electric() { return {}; }

ElectricSpec uniform_oscillating(double eps, ComplexPoint direction) {
  ElectricSpec e;
  e.kind = ElectricSpec::Kind::uniform_oscillating;
  e.eps = eps;
  e.direction = direction;
  return e;
}

ElectricSpec rotating_charge(double mu_s, double r_s, int k, double theta0) {
  ElectricSpec e;
  e.kind = ElectricSpec::Kind::rotating_charge;
  e.mu_s = mu_s;
  e.r_s = r_s;
  e.k = k;
  e.theta0 = theta0;
  return e;
}

}  // namespace presets

FieldConfig make_config(double mu, MagneticSpec magnetic, ElectricSpec electric) {
  check_mass_parameter(mu);
  FieldConfig cfg;
  cfg.mu = mu;
  cfg.magnetic = std::move(magnetic);
  cfg.electric = std::move(electric);
  if (cfg.electric.kind == ElectricSpec::Kind::rotating_charge && cfg.electric.r_s <= 1.0) {
    cfg.warnings.emplace_back("third center may intersect orbit region");
  }
  cfg.thread_safe = cfg.magnetic.kind != MagneticSpec::Kind::custom &&
                    cfg.electric.kind != ElectricSpec::Kind::custom;
  return cfg;
}

FieldConfig preset(const std::string& name, const PresetParams& p) {
  if (name == "zero") return make_config(p.mu, presets::zero_magnetic(), presets::zero_electric());
  if (name == "constant") return make_config(p.mu, presets::constant_magnetic(p.b), presets::zero_electric());
  if (name == "uniform_oscillating") {
    return make_config(p.mu, presets::zero_magnetic(), presets::uniform_oscillating(p.eps, p.direction));
  }
  if (name == "rotating_charge") {
    return make_config(p.mu, presets::zero_magnetic(),
                       presets::rotating_charge(p.mu_s, p.r_s, p.k, p.theta0));
  }
  throw ValidationError("unknown field preset '" + name + "'");
}

bool FieldValidationReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed()) return false;
  }
  return true;
}

std::string FieldValidationReport::failures() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : checks) {
    if (c.passed()) continue;
    if (!first) os << "; ";
    os << c.name << " (violation " << c.max_violation << " > " << c.tolerance << ")";
    first = false;
  }
  return os.str();
}

FieldValidationReport validate(const FieldConfig& cfg, const FieldValidationOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> coord(-opt.radius, opt.radius);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  FieldCheck curl{"gauge curl", 0.0, opt.curl_tolerance};
  FieldCheck jac{"gauge jacobian", 0.0, opt.curl_tolerance};
  FieldCheck periodic{"E periodicity", 0.0, opt.periodicity_tolerance};
  FieldCheck grad{"grad_E mismatch", 0.0, opt.derivative_tolerance};
  FieldCheck dot_e{"dot_E mismatch", 0.0, opt.derivative_tolerance};

  const double h = 1e-5;
  const auto& mag = cfg.magnetic;
  const auto& el = cfg.electric;
  std::size_t accepted = 0;
  while (accepted < opt.points) {
    const ComplexPoint q{coord(rng), coord(rng)};
    const double t = unit(rng);
    if (el.kind == ElectricSpec::Kind::rotating_charge && std::abs(q - el.charge_position(t)) < 0.5) {
      continue;
    }
    ++accepted;

    const ComplexPoint a_x1 = mag.potential(q + h);
    const ComplexPoint a_x0 = mag.potential(q - h);
    const ComplexPoint a_y1 = mag.potential(q + kI * h);
    const ComplexPoint a_y0 = mag.potential(q - kI * h);
    const double d1a1 = (a_x1.real() - a_x0.real()) / (2 * h);
    const double d1a2 = (a_x1.imag() - a_x0.imag()) / (2 * h);
    const double d2a1 = (a_y1.real() - a_y0.real()) / (2 * h);
    const double d2a2 = (a_y1.imag() - a_y0.imag()) / (2 * h);
    const double bq = mag.field(q);
    curl.max_violation = std::max(curl.max_violation, std::abs(d1a2 - d2a1 - bq) / std::max(1.0, std::abs(bq)));
    const auto j = mag.potential_jacobian(q);
    const double jac_err = std::max({std::abs(j[0] - d1a1), std::abs(j[1] - d2a1), std::abs(j[2] - d1a2),
                                     std::abs(j[3] - d2a2)});
    jac.max_violation = std::max(jac.max_violation, jac_err);

    const double e = el.value(t, q);
    const double scale = std::max(1.0, std::abs(e));
    periodic.max_violation = std::max(periodic.max_violation, std::abs(el.value(t + 1.0, q) - e) / scale);
    const ComplexPoint g_fd{(el.value(t, q + h) - el.value(t, q - h)) / (2 * h),
                            (el.value(t, q + kI * h) - el.value(t, q - kI * h)) / (2 * h)};
    const ComplexPoint g = el.gradient(t, q);
    grad.max_violation = std::max(grad.max_violation, std::abs(g - g_fd) / std::max(1.0, std::abs(g)));
    const double dt_fd = (el.value(t + h, q) - el.value(t - h, q)) / (2 * h);
    const double dt = el.time_derivative(t, q);
    dot_e.max_violation = std::max(dot_e.max_violation, std::abs(dt - dt_fd) / std::max(1.0, std::abs(dt)));
  }
  return {{curl, jac, periodic, grad, dot_e}};
}

}  // namespace szbov
