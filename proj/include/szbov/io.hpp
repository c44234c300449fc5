#pragma once

// JSON exchange formats (loops, field blocks, orbit records, run
// configurations), trajectory CSV, and SVG figures.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "szbov/dynamics.hpp"
#include "szbov/orbit.hpp"
#include "szbov/solver.hpp"

namespace szbov::io {

using Json = nlohmann::ordered_json;

/// Raised for unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json loop_to_json(const DiscreteLoop& loop);
DiscreteLoop loop_from_json(const Json& j);

Json fields_to_json(const FieldConfig& cfg);
FieldConfig fields_from_json(const Json& j);

Json record_to_json(const OrbitRecord& rec);
OrbitRecord record_from_json(const Json& j);

/// Parse JSON text; syntax errors become ValidationError with line and column.
Json parse(const std::string& text, const std::string& source = "input");
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);
/// Two-space indentation, trailing newline.
std::string dump(const Json& j);

struct ContinuationSpec {
  std::string parameter;  // "mu", "b", "eps", "mu_s"
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
};

struct IntegrateSpec {
  ComplexPoint q0{};
  ComplexPoint v0{};
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t samples = 0;
};

struct RunConfig {
  FieldConfig fields = make_config(0.5, presets::zero_magnetic(), presets::zero_electric());
  std::size_t n = 128;
  std::size_t m = 512;
  SolveOptions solver;
  std::optional<std::string> seed;
  std::optional<std::string> output;
  std::optional<ContinuationSpec> continuation;
  std::optional<IntegrateSpec> integrate;
};

/// Strict schema: unknown keys are rejected with their dotted path.
RunConfig run_config_from_json(const Json& j);
Json run_config_to_json(const RunConfig& cfg);

/// Path of configurations from `base` with one parameter varied in `steps` equal steps.
std::vector<FieldConfig> continuation_path(const FieldConfig& base, const ContinuationSpec& spec);

/// Seed specification: circle:CX,CY,R | ellipse:A,B | kepler:SIDE,R |
/// radial:SIDE,KRE,KIM | file:PATH (loop JSON or orbit record JSON).
DiscreteLoop make_seed(const std::string& spec, std::size_t n);

/// Trajectory CSV with header t,q_re,q_im,v_re,v_im.
std::string trajectory_csv(const Trajectory& traj);
/// Physical loop CSV with the same columns (t_j = j/M).
std::string physical_csv(const PhysicalLoop& q);

/// Two-panel SVG: blown-up plane (with the dashed unit circle) and physical plane
/// (with markers at the primaries).
std::string orbit_svg(const OrbitRecord& rec);

}  // namespace szbov::io
