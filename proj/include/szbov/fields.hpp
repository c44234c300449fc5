#pragma once

// Problem data: mass parameter, magnetic field with an explicit gauge
// primitive, and the 1-periodic electric potential E(t, q).

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "szbov/types.hpp"

namespace szbov {

/// Magnetic field B(q) with a primitive A = a1 dq1 + a2 dq2, dA = B dq1 ^ dq2.
/// The primitive is carried as the complex number a1 + i a2.
struct MagneticSpec {
  enum class Kind { zero, constant, custom };

  Kind kind = Kind::zero;
  double b = 0.0;
  std::function<double(ComplexPoint)> custom_field;
  std::function<ComplexPoint(ComplexPoint)> custom_potential;
  /// {d1 a1, d2 a1, d1 a2, d2 a2}
  std::function<std::array<double, 4>(ComplexPoint)> custom_potential_jacobian;

  double field(ComplexPoint q) const;
  ComplexPoint potential(ComplexPoint q) const;
  std::array<double, 4> potential_jacobian(ComplexPoint q) const;
  bool is_zero() const { return kind == Kind::zero || (kind == Kind::constant && b == 0.0); }
};

/// Time-periodic electric potential. Gradients are returned as d1 E + i d2 E.
struct ElectricSpec {
  enum class Kind { zero, uniform_oscillating, rotating_charge, custom };

  Kind kind = Kind::zero;
  // uniform_oscillating: E = eps cos(2 pi t) <d, q>
  double eps = 0.0;
  ComplexPoint direction{1.0, 0.0};
  // rotating_charge: E = -mu_s / |q - r_s exp(i (2 pi k t + theta0))|
  double mu_s = 0.0;
  double r_s = 0.0;
  int k = 1;
  double theta0 = 0.0;
  std::function<double(double, ComplexPoint)> custom_value;
  std::function<ComplexPoint(double, ComplexPoint)> custom_gradient;
  std::function<double(double, ComplexPoint)> custom_time_derivative;

  double value(double t, ComplexPoint q) const;
  ComplexPoint gradient(double t, ComplexPoint q) const;
  double time_derivative(double t, ComplexPoint q) const;
  /// Position of the moving charge (rotating_charge only).
  ComplexPoint charge_position(double t) const;
  bool is_zero() const;
};

struct FieldConfig {
  double mu = 0.5;  // mass at +1; 1 - mu at -1
  MagneticSpec magnetic;
  ElectricSpec electric;
  /// Custom evaluators that are not reentrant must clear this flag.
  bool thread_safe = true;
  std::vector<std::string> warnings;

  /// True when E does not depend on time (so tau-shifts are a symmetry).
  bool autonomous() const { return electric.is_zero(); }
};

/// Throws ValidationError unless 0 <= mu <= 1.
void check_mass_parameter(double mu);

namespace presets {

MagneticSpec zero_magnetic();
MagneticSpec constant_magnetic(double b);
ElectricSpec zero_electric();
ElectricSpec uniform_oscillating(double eps, ComplexPoint direction);
/// Warns (non-fatally, via the returned config's warnings) when r_s <= 1.
ElectricSpec rotating_charge(double mu_s, double r_s, int k, double theta0);

}  // namespace presets

/// Assemble a configuration from parts, collecting preset warnings.
FieldConfig make_config(double mu, MagneticSpec magnetic, ElectricSpec electric);

/// Named preset: "zero", "constant" {b}, "uniform_oscillating" {eps, d_re, d_im},
/// "rotating_charge" {mu_s, r_s, k, theta0}. Unused parameters are ignored.
struct PresetParams {
  double mu = 0.5;
  double b = 0.0;
  double eps = 0.0;
  ComplexPoint direction{1.0, 0.0};
  double mu_s = 0.0;
  double r_s = 0.0;
  int k = 1;
  double theta0 = 0.0;
};
FieldConfig preset(const std::string& name, const PresetParams& params = {});

struct FieldCheck {
  std::string name;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_violation <= tolerance; }
};

struct FieldValidationReport {
  std::vector<FieldCheck> checks;
  bool passed() const;
  std::string failures() const;
};

struct FieldValidationOptions {
  std::size_t points = 64;
  unsigned seed = 12345;
  double radius = 3.0;
  double curl_tolerance = 1e-6;
  double periodicity_tolerance = 1e-10;
  double derivative_tolerance = 1e-6;
};

/// Gauge/curl, periodicity and derivative consistency on a seeded point cloud.
FieldValidationReport validate(const FieldConfig& cfg, const FieldValidationOptions& options = {});

}  // namespace szbov
