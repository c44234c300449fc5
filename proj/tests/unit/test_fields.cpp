#include <doctest.h>

#include "szbov/fields.hpp"

using namespace szbov;

TEST_CASE("mass parameter range") {
  CHECK_NOTHROW(check_mass_parameter(0.0));
  CHECK_NOTHROW(check_mass_parameter(1.0));
  CHECK_THROWS_AS(check_mass_parameter(-0.1), ValidationError);
  CHECK_THROWS_AS(check_mass_parameter(1.5), ValidationError);
  CHECK_THROWS_AS(make_config(2.0, presets::zero_magnetic(), presets::zero_electric()), ValidationError);
}

TEST_CASE("preset values") {
  const auto c = presets::constant_magnetic(2.0);
  for (ComplexPoint q : {ComplexPoint{0.3, -1.0}, ComplexPoint{5.0, 2.0}}) CHECK(c.field(q) == 2.0);

  const auto e = presets::uniform_oscillating(0.1, {0.6, 0.8});
  for (ComplexPoint q : {ComplexPoint{0.3, -1.0}, ComplexPoint{5.0, 2.0}}) {
    CHECK(std::abs(e.gradient(0.25, q)) < 1e-16);
    CHECK(e.value(0.0, q) == doctest::Approx(0.1 * (0.6 * q.real() + 0.8 * q.imag())));
  }

  const auto r = presets::rotating_charge(0.01, 3.0, 1, 0.0);
  CHECK(std::abs(r.charge_position(0.0) - 3.0) < 1e-15);
  CHECK(std::abs(r.charge_position(0.25) - 3.0 * kI) < 1e-14);

  const auto named = preset("constant", PresetParams{.mu = 0.3, .b = 1.5});
  CHECK(named.mu == 0.3);
  CHECK(named.magnetic.b == 1.5);
  CHECK_THROWS_AS(preset("nonsense"), ValidationError);
}

TEST_CASE("validation of presets") {
  const auto zero = validate(make_config(0.5, presets::zero_magnetic(), presets::zero_electric()));
  CHECK(zero.passed());
  for (const auto& c : zero.checks) CHECK(c.max_violation == 0.0);

  const auto con = validate(make_config(0.5, presets::constant_magnetic(2.0), presets::zero_electric()));
  CHECK(con.passed());
  for (const auto& c : con.checks) {
    if (c.name == "gauge curl") CHECK(c.max_violation < 1e-9);
  }
  CHECK(validate(make_config(0.5, presets::zero_magnetic(), presets::uniform_oscillating(0.1, {1.0, 0.0}))).passed());
  CHECK(validate(make_config(0.5, presets::constant_magnetic(-1.0), presets::rotating_charge(0.01, 3.0, 2, 0.4)))
            .passed());
}

TEST_CASE("validation names a wrong electric gradient") {
  ElectricSpec e;
  e.kind = ElectricSpec::Kind::custom;
  e.custom_value = [](double t, ComplexPoint q) { return std::sin(kTwoPi * t) * q.real() * q.imag(); };
  e.custom_gradient = [](double t, ComplexPoint q) {
    return std::sin(kTwoPi * t) * ComplexPoint{q.imag(), 2.0 * q.real()};  // wrong factor in d2
  };
  e.custom_time_derivative = [](double t, ComplexPoint q) {
    return kTwoPi * std::cos(kTwoPi * t) * q.real() * q.imag();
  };
  const auto cfg = make_config(0.5, presets::zero_magnetic(), e);
  CHECK_FALSE(cfg.thread_safe);
  const auto report = validate(cfg);
  CHECK_FALSE(report.passed());
  CHECK(report.failures().find("grad_E mismatch") != std::string::npos);
  CHECK(report.failures().find("dot_E mismatch") == std::string::npos);
}

TEST_CASE("validation catches a gauge primitive with the wrong curl") {
  MagneticSpec m;
  m.kind = MagneticSpec::Kind::custom;
  m.custom_field = [](ComplexPoint) { return 1.0; };
  m.custom_potential = [](ComplexPoint q) { return ComplexPoint{-q.imag(), q.real()}; };  // curl 2
  m.custom_potential_jacobian = [](ComplexPoint) { return std::array<double, 4>{0.0, -1.0, 1.0, 0.0}; };
  const auto report = validate(make_config(0.5, m, presets::zero_electric()));
  CHECK(report.failures().find("gauge curl") != std::string::npos);
}

TEST_CASE("a third center inside the primaries' region raises a warning") {
  const auto near = make_config(0.5, presets::zero_magnetic(), presets::rotating_charge(0.01, 0.8, 1, 0.0));
  REQUIRE(near.warnings.size() == 1);
  CHECK(near.warnings[0] == "third center may intersect orbit region");
  CHECK(make_config(0.5, presets::zero_magnetic(), presets::rotating_charge(0.01, 3.0, 1, 0.0)).warnings.empty());
}
