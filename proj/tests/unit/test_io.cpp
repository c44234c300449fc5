#include <doctest.h>

#include <filesystem>
#include <random>

#include "support/loops.hpp"
#include "szbov/io.hpp"

using namespace szbov;
using io::Json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "szbov_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string validation_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("loop JSON round trip is exact") {
  std::mt19937_64 rng(1);
  for (const auto& z : {test::perturbed_circle(rng, 32), test::random_twisted(rng, 32)}) {
    const Json j = io::loop_to_json(z);
    CHECK(io::loop_from_json(io::parse(io::dump(j))) == z);
  }
}

TEST_CASE("field blocks round trip") {
  const std::vector<FieldConfig> cfgs{
      make_config(0.3, presets::zero_magnetic(), presets::zero_electric()),
      make_config(0.5, presets::constant_magnetic(0.5), presets::uniform_oscillating(0.01, {0.6, 0.8})),
      make_config(0.1, presets::zero_magnetic(), presets::rotating_charge(0.01, 3.0, 2, 0.25))};
  for (const auto& cfg : cfgs) {
    const auto back = io::fields_from_json(io::fields_to_json(cfg));
    CHECK(io::fields_to_json(back) == io::fields_to_json(cfg));
  }
}

TEST_CASE("orbit record round trip is lossless") {
  const auto cfg = make_config(0.5, presets::constant_magnetic(0.5), presets::zero_electric());
  auto rec = make_record(test::circle(0.0, 2.0, 32), cfg, 64);
  rec.iterations = 7;
  const std::string text = io::dump(io::record_to_json(rec));
  const auto back = io::record_from_json(io::parse(text));
  CHECK(back.z == rec.z);
  CHECK(back.breakdown.total == rec.breakdown.total);
  CHECK(back.C == rec.C);
  CHECK(back.q.samples == rec.q.samples);
  CHECK(back.winding == rec.winding);
  CHECK(io::dump(io::record_to_json(back)) == text);

  const auto collision = make_record(test::circle(0.0, 1.0, 32), cfg, 64);
  const Json j = io::record_to_json(collision);
  CHECK(j["diagnostics"]["winding"].is_null());
  CHECK(j["q"]["collision_times"].size() == 2);
  CHECK_FALSE(io::record_from_json(j).winding_defined);
}

TEST_CASE("strict run configuration schema") {
  const Json good = io::parse(R"({"fields": {"mu": 0.2, "magnetic": {"kind": "constant", "b": 1.0}},
                                 "grid": {"n": 64, "m": 256}, "solver": {"g_tol": 1e-10},
                                 "seed": "kepler:-1,0.3",
                                 "continuation": {"parameter": "mu", "from": 0, "to": 0.2, "steps": 4}})");
  const auto rc = io::run_config_from_json(good);
  CHECK(rc.fields.mu == 0.2);
  CHECK(rc.fields.magnetic.b == 1.0);
  CHECK(rc.n == 64);
  CHECK(rc.m == 256);
  CHECK(rc.solver.g_tol == 1e-10);
  CHECK(rc.solver.m == 256);
  REQUIRE(rc.continuation);
  CHECK(io::run_config_to_json(io::run_config_from_json(io::run_config_to_json(rc))) == io::run_config_to_json(rc));

  const auto path = io::continuation_path(rc.fields, *rc.continuation);
  REQUIRE(path.size() == 4);
  CHECK(path[0].mu == doctest::Approx(0.05));
  CHECK(path[3].mu == doctest::Approx(0.2));
  CHECK(path[3].magnetic.b == 1.0);

  CHECK(validation_message([] { io::run_config_from_json(io::parse(R"({"grid": {"n": 64, "nn": 3}})")); }) ==
        "unknown key 'grid.nn'");
  CHECK(validation_message([] { io::run_config_from_json(io::parse(R"({"solvr": {}})")); }) ==
        "unknown key 'solvr'");
  CHECK(validation_message([] { io::run_config_from_json(io::parse(R"({"fields": {"mu": "x"}})")); }) ==
        "key 'fields.mu' must be a number");
  CHECK(validation_message([] { io::run_config_from_json(io::parse(R"({"grid": {"n": 15}})")); })
            .find("grid.n") != std::string::npos);
  CHECK(validation_message([] {
          io::run_config_from_json(io::parse(R"({"fields": {"mu": 0.5, "electric": {"kind": "laser"}}})"));
        }).find("fields.electric.kind") != std::string::npos);
  CHECK_THROWS_AS(io::run_config_from_json(io::parse(R"({"fields": {"mu": 1.5}})")), ValidationError);
}

TEST_CASE("malformed JSON reports line and column") {
  const std::string msg = validation_message([] { io::parse("{\n  \"grid\": {\"n\": 64,,}\n}", "cfg.json"); });
  CHECK(msg.find("cfg.json:2:") == 0);
  CHECK(msg.find("\"grid\"") != std::string::npos);
}

TEST_CASE("seed specifications") {
  CHECK(io::make_seed("circle:0,0,2", 32) == seeds::circle(0.0, 2.0, 32));
  CHECK(io::make_seed("kepler:-1,0.3", 32).twisted());
  CHECK(io::make_seed("radial:-1,0.5,0", 32) == seeds::radial(-1.0, 0.5, 32));
  CHECK_THROWS_AS(io::make_seed("circle:0,0", 32), ValidationError);
  CHECK_THROWS_AS(io::make_seed("spiral:1", 32), ValidationError);
  CHECK_THROWS_AS(io::make_seed("circle:a,0,1", 32), ValidationError);

  const auto z = seeds::kepler_guess(1.0, 0.25, 32);
  const auto path = scratch("loop.json");
  io::write_file(path, io::dump(io::loop_to_json(z)));
  CHECK(io::make_seed("file:" + path.string(), 32) == z);
  CHECK_THROWS_AS(io::make_seed("file:/nonexistent/loop.json", 32), io::IoError);
}

TEST_CASE("CSV and SVG output") {
  const auto rec = make_record(seeds::kepler_guess(-1.0, 0.3, 32), make_config(0.0, {}, {}), 64);
  const std::string csv = io::physical_csv(rec.q);
  CHECK(csv.rfind("t,q_re,q_im,v_re,v_im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);

  const std::string svg = io::orbit_svg(rec);
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count("<path") == 2);
  CHECK(count("class=\"z-curve\"") == 1);
  CHECK(count("class=\"q-curve\"") == 1);
  CHECK(count("class=\"primary\"") == 2);
  CHECK(count("stroke-dasharray") == 1);
}
