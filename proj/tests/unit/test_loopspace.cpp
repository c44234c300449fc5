#include <doctest.h>

#include <random>

#include "support/loops.hpp"
#include "szbov/loopspace.hpp"
#include "szbov/solver.hpp"

using namespace szbov;
using szbov::test::circle;
using szbov::test::constant_loop;

TEST_CASE("loop construction enforces size and sample constraints") {
  CHECK_THROWS_AS(DiscreteLoop(ComplexSeq(8, 1.0)), ValidationError);
  CHECK_THROWS_AS(DiscreteLoop(ComplexSeq(17, 1.0)), ValidationError);
  ComplexSeq s(16, kI);
  s[3] = 0.0;
  CHECK_THROWS_AS(DiscreteLoop{s}, DomainError);
}

TEST_CASE("loop derivative") {
  const auto z = circle(0.0, 1.0, 64);
  const auto d = derivative(z);
  for (std::size_t j = 0; j < 64; ++j) CHECK(std::abs(d[j] - kTwoPi * kI * z[j]) < 1e-10);
  const auto shifted = derivative(circle(3.0, 1.0, 64));
  for (std::size_t j = 0; j < 64; ++j) CHECK(std::abs(shifted[j] - d[j]) < 1e-10);
  for (auto v : derivative(constant_loop(2.0, 32))) CHECK(v == ComplexPoint{});
}

TEST_CASE("twisted loops differentiate through their double cover") {
  // z = exp(i pi tau) satisfies z(tau + 1) = -z(tau)... use exp(a sin(pi tau)) instead.
  const std::size_t n = 64;
  ComplexSeq s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = std::exp(0.4 * std::sin(kPi * static_cast<double>(j) / n));
  const DiscreteLoop z(s, true);
  const auto cover = z.double_cover();
  REQUIRE(cover.size() == 2 * n);
  CHECK(std::abs(cover[n + 5] - 1.0 / s[5]) < 1e-15);
  const auto d = derivative(z);
  for (std::size_t j = 0; j < n; ++j) {
    const double tau = static_cast<double>(j) / n;
    CHECK(std::abs(d[j] - s[j] * 0.4 * kPi * std::cos(kPi * tau)) < 1e-9);
  }
}

TEST_CASE("zhat closed forms") {
  CHECK(zhat(circle(0.0, 2.0, 64)) == doctest::Approx(17.0 / 16.0).epsilon(1e-12));
  CHECK(zhat(circle(0.0, 1.0, 64)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(zhat(constant_loop(kI, 32)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(zhat(constant_loop(1.0, 32)), DegenerateLoopError);
}

TEST_CASE("time map and its inverse") {
  const auto tm = time_map(circle(0.0, 1.0, 64));
  CHECK(tm.t_of_tau.front() == 0.0);
  CHECK(tm.t_of_tau.back() == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t j = 1; j < tm.t_of_tau.size(); ++j) CHECK(tm.t_of_tau[j] >= tm.t_of_tau[j - 1]);
  const double t8 = 0.125 - 1.0 / (4.0 * kPi);
  CHECK(tm(0.125) == doctest::Approx(t8).epsilon(1e-12));
  for (double tau : {0.03, 0.31, 0.77}) {
    CHECK(tm(tau) == doctest::Approx(tau - std::sin(4 * kPi * tau) / (4 * kPi)).epsilon(1e-12));
  }
  CHECK(inverse_time(tm, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(inverse_time(tm, t8) == doctest::Approx(0.125).epsilon(1e-10));
  for (double t : {0.0, 0.2, 0.6, 1.0}) CHECK(std::abs(tm(inverse_time(tm, t)) - t) < 1e-12);

  const auto flat = time_map(constant_loop(kI, 32));
  for (double t : {0.1, 0.45, 0.9}) {
    CHECK(flat(t) == doctest::Approx(t).epsilon(1e-14));
    CHECK(inverse_time(flat, t) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("reconstruction of reference loops") {
  const auto q = reconstruct(circle(0.0, 2.0, 128), 256);
  CHECK(q.size() == 256);
  CHECK(std::abs(q.samples[0] - 1.25) < 1e-14);
  for (auto p : q.samples) {
    CHECK(std::norm(p.real() / 1.25) + std::norm(p.imag() / 0.75) == doctest::Approx(1.0).epsilon(1e-10));
  }
  // B o I = B and w o I = w.
  const auto qi = reconstruct(circle(0.0, 2.0, 128).inverted(), 256);
  for (std::size_t j = 0; j < q.size(); ++j) CHECK(std::abs(qi.samples[j] - q.samples[j]) < 1e-10);

  const auto seg = reconstruct(circle(0.0, 1.0, 128), 64);
  for (auto p : seg.samples) {
    CHECK(std::abs(p.imag()) < 1e-12);
    CHECK(std::abs(p.real()) <= 1.0 + 1e-12);
  }
  CHECK(std::abs(seg.samples[0] - 1.0) < 1e-12);
  CHECK(std::abs(seg.samples[32] + 1.0) < 1e-12);
  CHECK_FALSE(is_finite(seg.velocities[0]));
  CHECK(is_finite(seg.velocities[5]));
}

TEST_CASE("reconstructed path agrees with the sampled reconstruction") {
  std::mt19937_64 rng(2);
  const auto z = test::perturbed_circle(rng, 128);
  const auto q = reconstruct(z, 64);
  const ReconstructedPath path(z);
  for (std::size_t j = 0; j < q.size(); ++j) {
    CHECK(std::abs(path.position(q.node(j)) - q.samples[j]) < 1e-11);
    CHECK(std::abs(path.velocity(q.node(j)) - q.velocities[j]) < 1e-8 * (1 + std::abs(q.velocities[j])));
  }
  CHECK(std::abs(path.position(1.3) - path.position(0.3)) < 1e-12);
}

TEST_CASE("lift inverts reconstruction") {
  const auto q = reconstruct(circle(0.0, 2.0, 128), 512);
  const auto z = lift(q, 128);
  CHECK_FALSE(z.twisted());
  const auto ref = circle(0.0, 2.0, 128);
  double direct = 0.0, inverted = 0.0;
  for (std::size_t j = 0; j < 128; ++j) {
    direct = std::max(direct, std::abs(z[j] - ref[j]));
    inverted = std::max(inverted, std::abs(z[j] - 1.0 / ref[j]));
  }
  CHECK(std::min(direct, inverted) < 1e-8);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto src = trial % 2 ? seeds::kepler_guess(trial == 1 ? -1.0 : 1.0, 0.2 + 0.05 * trial, 128)
                               : test::perturbed_circle(rng, 128);
    const auto qs = reconstruct(src, 512);
    const auto back = reconstruct(lift(qs, 256), 512);
    double err = 0.0;
    for (std::size_t j = 0; j < qs.size(); ++j) err = std::max(err, std::abs(back.samples[j] - qs.samples[j]));
    CHECK(err < 1e-6);
  }
}

TEST_CASE("odd total winding lifts to a twisted loop") {
  PhysicalLoop q;
  for (auto p : test::circle_samples(-1.0, 0.29, 256)) q.samples.push_back(p);
  const auto z = lift(q, 64);
  CHECK(z.twisted());
  CHECK(std::abs(z[0] * z[0] - 1.0) > 0.0);
  PhysicalLoop collision;
  collision.samples = test::circle_samples(0.0, 1.0, 64);
  CHECK_THROWS_AS(lift(collision, 32), DomainError);
}

TEST_CASE("seeds land in the expected sectors") {
  const auto c = seeds::circle(0.0, 2.0, 256);
  CHECK_FALSE(c.twisted());
  CHECK(winding_report(reconstruct(c, 512).samples).total == 2);
  const auto k = seeds::kepler_guess(-1.0, 0.3, 64);
  CHECK(k.twisted());
  const auto wk = winding_report(reconstruct(k, 512).samples);
  CHECK(wk.total == 1);
  CHECK(wk.around_minus_one == 1);
  const auto r = seeds::resample(c, 64);
  CHECK(r.size() == 64);
  for (std::size_t j = 0; j < 64; ++j) CHECK(std::abs(r[j] - c[4 * j]) < 1e-12);
}
