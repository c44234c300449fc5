#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "szbov/cli.hpp"
#include "szbov/io.hpp"

using namespace szbov;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "szbov");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "szbov_cli_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("eval prints the breakdown") {
  const auto r = run({"eval", "--seed", "circle:0,0,2", "--n", "64"});
  CHECK(r.code == 0);
  CHECK(r.out.find("F = 1.0625\n") != std::string::npos);
  CHECK(r.out.find("G = 19.7392") != std::string::npos);

  const std::string loop = scratch("const.json");
  io::write_file(loop, R"({"n": 16, "twisted": false, "samples": [)" + [] {
    std::string s;
    for (int j = 0; j < 16; ++j) s += std::string(j ? "," : "") + "[0,1]";
    return s;
  }() + "]}");
  for (const char* mu : {"0", "0.3", "1"}) {
    const auto c = run({"eval", "--in", loop, "--mu", mu});
    CHECK(c.code == 0);
    CHECK(c.out.find("total = 1\n") != std::string::npos);
  }
}

TEST_CASE("invalid input exits with code 2 and names the problem") {
  const std::string cfg = scratch("bad.json");
  io::write_file(cfg, R"({"fields": {"mu": 0.5}, "grid": {"n": 64, "bogus": 1}})");
  auto r = run({"eval", "--config", cfg, "--seed", "circle:0,0,2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("grid.bogus") != std::string::npos);

  io::write_file(cfg, "{\"fields\": {\"mu\": 0.5,}}");
  r = run({"eval", "--config", cfg, "--seed", "circle:0,0,2"});
  CHECK(r.code == 2);
  CHECK(r.err.find(":1:") != std::string::npos);

  CHECK(run({"solve", "--seed", "circle:0,0,2", "--twisted", "true"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"eval"}).code == 2);
  CHECK(run({"eval", "--in", "/nonexistent/x.json"}).code == 4);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("grad-check passes and detects an injected fault") {
  CHECK(run({"grad-check", "--quiet"}).code == 0);
  CHECK(run({"grad-check", "--n", "16", "--quiet"}).code == 0);
  const auto bad = run({"grad-check", "--inject-fault", "H1", "--count", "1"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("H1") != std::string::npos);
  // The fault must not leak into later evaluations.
  CHECK(run({"grad-check", "--count", "1", "--quiet"}).code == 0);
}

TEST_CASE("solve, verify, plot, integrate and export on the Kepler orbit") {
  const std::string orbit = scratch("kepler.json");
  auto r = run({"solve", "--seed", "kepler:-1,0.3", "--mu", "0", "--n", "64", "--out", orbit, "--quiet"});
  REQUIRE(r.code == 0);
  const auto rec = io::record_from_json(io::read_json(orbit));
  CHECK(rec.breakdown.total == doctest::Approx(5.1075329).epsilon(1e-7));

  const std::string again = scratch("kepler2.json");
  run({"solve", "--seed", "kepler:-1,0.3", "--mu", "0", "--n", "64", "--out", again, "--quiet"});
  CHECK(io::read_file(orbit) == io::read_file(again));

  r = run({"verify", "--in", orbit});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);

  const std::string svg = scratch("kepler.svg");
  CHECK(run({"plot", "--in", orbit, "--out", svg}).code == 0);
  CHECK(io::read_file(svg).find("class=\"q-curve\"") != std::string::npos);

  r = run({"integrate", "--in", orbit, "--m", "64"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("t,q_re,q_im,v_re,v_im\n", 0) == 0);

  const std::string loop = scratch("kepler_loop.json");
  CHECK(run({"export", "--in", orbit, "--out", loop}).code == 0);
  CHECK(io::make_seed("file:" + loop, 64) == rec.z);
  CHECK(run({"export", "--in", orbit, "--format", "csv", "--m", "32"}).out.rfind("t,", 0) == 0);
}

TEST_CASE("solve reports non-convergence with exit code 3") {
  const std::string cfg = scratch("short.json");
  io::write_file(cfg, R"({"fields": {"mu": 0.5}, "grid": {"n": 32}, "solver": {"max_iterations": 1}})");
  const std::string out = scratch("best.json");
  const auto r = run({"solve", "--config", cfg, "--seed", "circle:0,0,2", "--out", out, "--quiet"});
  CHECK(r.code == 3);
  CHECK_FALSE(io::record_from_json(io::read_json(out)).converged);
}

TEST_CASE("integrate from a configuration block and continue a short family") {
  const std::string cfg = scratch("integrate.json");
  io::write_file(cfg, R"({"fields": {"mu": 0.0},
    "integrate": {"q0": [-0.7063161345030, 0], "v0": [0, 1.845277], "t0": 0, "t1": 1, "samples": 8}})");
  auto r = run({"integrate", "--config", cfg});
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 10);

  const std::string cont = scratch("continue.json");
  io::write_file(cont, R"({"fields": {"mu": 0.0}, "grid": {"n": 32}, "seed": "radial:-1,0.5,0",
    "continuation": {"parameter": "mu", "from": 0, "to": 0.02, "steps": 2}})");
  const std::string fam = scratch("family.json");
  r = run({"continue", "--config", cont, "--out", fam, "--quiet"});
  CHECK(r.code == 0);
  CHECK(io::read_json(fam)["orbits"].size() == 3);
}
