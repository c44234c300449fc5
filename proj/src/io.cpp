#include "szbov/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace szbov::io {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError("'" + (path.empty() ? std::string("document") : path) + "' must be an object");
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ValidationError("unknown key '" + join(path, key) + "'");
    }
  }
}

const Json& member(const Json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError("missing key '" + join(path, key) + "'");
  return *it;
}

double number(const Json& j, const char* key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number()) throw ValidationError("key '" + join(path, key) + "' must be a number");
  return v.get<double>();
}

double number_or(const Json& j, const char* key, const std::string& path, double fallback) {
  return j.contains(key) ? number(j, key, path) : fallback;
}

long integer(const Json& j, const char* key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number_integer()) throw ValidationError("key '" + join(path, key) + "' must be an integer");
  return v.get<long>();
}

bool boolean(const Json& j, const char* key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_boolean()) throw ValidationError("key '" + join(path, key) + "' must be a boolean");
  return v.get<bool>();
}

std::string string_value(const Json& j, const char* key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_string()) throw ValidationError("key '" + join(path, key) + "' must be a string");
  return v.get<std::string>();
}

ComplexPoint point(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ValidationError("'" + path + "' must be a [re, im] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Json point_json(ComplexPoint p) { return Json::array({p.real(), p.imag()}); }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_or_nan(const Json& j, const char* key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw ValidationError("key '" + join(path, key) + "' must be a number");
  return v.get<double>();
}

ComplexSeq samples_from(const Json& arr, const std::string& path) {
  if (!arr.is_array()) throw ValidationError("'" + path + "' must be an array");
  ComplexSeq s;
  s.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) s.push_back(point(arr[i], path + "[" + std::to_string(i) + "]"));
  return s;
}

std::vector<double> split_numbers(const std::string& text, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("seed '" + spec + "': '" + item + "' is not a number");
    }
  }
  return out;
}

}  // namespace

Json loop_to_json(const DiscreteLoop& loop) {
  Json j;
  j["n"] = loop.size();
  j["twisted"] = loop.twisted();
  Json samples = Json::array();
  for (auto s : loop.samples()) samples.push_back(point_json(s));
  j["samples"] = std::move(samples);
  return j;
}

DiscreteLoop loop_from_json(const Json& j) {
  check_keys(j, {"n", "twisted", "samples"}, "loop");
  const long n = integer(j, "n", "loop");
  const bool twisted = boolean(j, "twisted", "loop");
  ComplexSeq samples = samples_from(member(j, "samples", "loop"), "loop.samples");
  if (static_cast<long>(samples.size()) != n) {
    throw ValidationError("loop: 'n' is " + std::to_string(n) + " but " + std::to_string(samples.size()) +
                          " samples were given");
  }
  return DiscreteLoop(std::move(samples), twisted);
}

Json fields_to_json(const FieldConfig& cfg) {
  Json j;
  j["mu"] = cfg.mu;
  Json mag;
  switch (cfg.magnetic.kind) {
    case MagneticSpec::Kind::zero: mag["kind"] = "zero"; break;
    case MagneticSpec::Kind::constant:
      mag["kind"] = "constant";
      mag["b"] = cfg.magnetic.b;
      break;
    case MagneticSpec::Kind::custom: throw ValidationError("custom magnetic fields cannot be serialized");
  }
  j["magnetic"] = mag;
  Json el;
  const auto& e = cfg.electric;
  switch (e.kind) {
    case ElectricSpec::Kind::zero: el["kind"] = "zero"; break;
    case ElectricSpec::Kind::uniform_oscillating:
      el["kind"] = "uniform_oscillating";
      el["eps"] = e.eps;
      el["d"] = point_json(e.direction);
      break;
    case ElectricSpec::Kind::rotating_charge:
      el["kind"] = "rotating_charge";
      el["mu_s"] = e.mu_s;
      el["r_s"] = e.r_s;
      el["k"] = e.k;
      el["theta0"] = e.theta0;
      break;
    case ElectricSpec::Kind::custom: throw ValidationError("custom electric fields cannot be serialized");
  }
  j["electric"] = el;
  return j;
}

FieldConfig fields_from_json(const Json& j) {
  const std::string path = "fields";
  check_keys(j, {"mu", "magnetic", "electric"}, path);
  const double mu = number(j, "mu", path);
  MagneticSpec mag;
  if (j.contains("magnetic")) {
    const Json& m = j["magnetic"];
    const std::string mp = path + ".magnetic";
    require_object(m, mp);
    const std::string kind = string_value(m, "kind", mp);
    if (kind == "zero") {
      check_keys(m, {"kind"}, mp);
    } else if (kind == "constant") {
      check_keys(m, {"kind", "b"}, mp);
      mag = presets::constant_magnetic(number(m, "b", mp));
    } else {
      throw ValidationError("key '" + mp + ".kind' has unknown value '" + kind + "'");
    }
  }
  ElectricSpec el;
  if (j.contains("electric")) {
    const Json& e = j["electric"];
    const std::string ep = path + ".electric";
    require_object(e, ep);
    const std::string kind = string_value(e, "kind", ep);
    if (kind == "zero") {
      check_keys(e, {"kind"}, ep);
    } else if (kind == "uniform_oscillating") {
      check_keys(e, {"kind", "eps", "d"}, ep);
      const ComplexPoint d = e.contains("d") ? point(e["d"], ep + ".d") : ComplexPoint{1.0, 0.0};
      el = presets::uniform_oscillating(number(e, "eps", ep), d);
    } else if (kind == "rotating_charge") {
      check_keys(e, {"kind", "mu_s", "r_s", "k", "theta0"}, ep);
      const long k = e.contains("k") ? integer(e, "k", ep) : 1;
      el = presets::rotating_charge(number(e, "mu_s", ep), number(e, "r_s", ep), static_cast<int>(k),
                                    number_or(e, "theta0", ep, 0.0));
    } else {
      throw ValidationError("key '" + ep + ".kind' has unknown value '" + kind + "'");
    }
  }
  return make_config(mu, std::move(mag), std::move(el));
}

Json record_to_json(const OrbitRecord& rec) {
  Json j;
  j["z"] = loop_to_json(rec.z);
  j["twisted"] = rec.twisted;
  j["mu"] = rec.cfg.mu;
  j["fields"] = fields_to_json(rec.cfg);
  Json d;
  const auto& b = rec.breakdown;
  d["action"] = b.total;
  d["components"] = Json{{"F", b.F}, {"G", b.G}, {"H1", b.H1}, {"H2", b.H2}, {"M", b.M}, {"E", b.E_val}, {"E1", b.E1}};
  d["C"] = rec.C;
  d["grad_norm"] = rec.grad_norm;
  d["delay_sup"] = rec.delay_sup;
  d["phi_sup"] = rec.phi_sup;
  if (rec.winding_defined) {
    d["winding"] = Json{{"minus", rec.winding.around_minus_one},
                        {"plus", rec.winding.around_plus_one},
                        {"total", rec.winding.total}};
  } else {
    d["winding"] = nullptr;
  }
  d["iterations"] = rec.iterations;
  d["converged"] = rec.converged;
  j["diagnostics"] = std::move(d);
  Json q;
  q["m"] = rec.q.size();
  Json samples = Json::array();
  for (auto s : rec.q.samples) samples.push_back(point_json(s));
  q["samples"] = std::move(samples);
  Json times = Json::array();
  for (double t : rec.q.collision_times) times.push_back(number_or_null(t));
  q["collision_times"] = std::move(times);
  j["q"] = std::move(q);
  return j;
}

OrbitRecord record_from_json(const Json& j) {
  check_keys(j, {"z", "twisted", "mu", "fields", "diagnostics", "q"}, "");
  OrbitRecord rec;
  rec.z = loop_from_json(member(j, "z", ""));
  rec.twisted = boolean(j, "twisted", "");
  if (rec.twisted != rec.z.twisted()) throw ValidationError("key 'twisted' disagrees with 'z.twisted'");
  rec.cfg = fields_from_json(member(j, "fields", ""));
  if (number(j, "mu", "") != rec.cfg.mu) throw ValidationError("key 'mu' disagrees with 'fields.mu'");

  const Json& d = member(j, "diagnostics", "");
  check_keys(d, {"action", "components", "C", "grad_norm", "delay_sup", "phi_sup", "winding", "iterations", "converged"},
             "diagnostics");
  const Json& c = member(d, "components", "diagnostics");
  check_keys(c, {"F", "G", "H1", "H2", "M", "E", "E1"}, "diagnostics.components");
  const std::string cp = "diagnostics.components";
  rec.breakdown.F = number(c, "F", cp);
  rec.breakdown.G = number(c, "G", cp);
  rec.breakdown.H1 = number(c, "H1", cp);
  rec.breakdown.H2 = number(c, "H2", cp);
  rec.breakdown.M = number(c, "M", cp);
  rec.breakdown.E_val = number(c, "E", cp);
  rec.breakdown.E1 = number(c, "E1", cp);
  rec.breakdown.total = number(d, "action", "diagnostics");
  rec.C = number(d, "C", "diagnostics");
  rec.grad_norm = number_or_nan(d, "grad_norm", "diagnostics");
  rec.delay_sup = number_or_nan(d, "delay_sup", "diagnostics");
  rec.phi_sup = number_or_nan(d, "phi_sup", "diagnostics");
  const Json& w = member(d, "winding", "diagnostics");
  if (w.is_null()) {
    rec.winding_defined = false;
  } else {
    check_keys(w, {"minus", "plus", "total"}, "diagnostics.winding");
    rec.winding.around_minus_one = static_cast<int>(integer(w, "minus", "diagnostics.winding"));
    rec.winding.around_plus_one = static_cast<int>(integer(w, "plus", "diagnostics.winding"));
    rec.winding.total = static_cast<int>(integer(w, "total", "diagnostics.winding"));
    rec.winding_defined = true;
  }
  rec.iterations = static_cast<int>(integer(d, "iterations", "diagnostics"));
  rec.converged = d.contains("converged") ? boolean(d, "converged", "diagnostics") : true;

  const Json& q = member(j, "q", "");
  check_keys(q, {"m", "samples", "collision_times"}, "q");
  rec.q.samples = samples_from(member(q, "samples", "q"), "q.samples");
  if (integer(q, "m", "q") != static_cast<long>(rec.q.samples.size())) {
    throw ValidationError("q: 'm' disagrees with the number of samples");
  }
  const Json& times = member(q, "collision_times", "q");
  if (!times.is_array()) throw ValidationError("'q.collision_times' must be an array");
  for (const auto& t : times) {
    if (!t.is_number()) throw ValidationError("'q.collision_times' must contain numbers");
    rec.q.collision_times.push_back(t.get<double>());
  }
  return rec;
}

Json parse(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into line and column.
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    const std::size_t start = text.rfind('\n', pos == 0 ? 0 : pos - 1);
    const std::size_t from = start == std::string::npos ? 0 : start + 1;
    const std::size_t to = text.find('\n', pos);
    std::string context = text.substr(from, (to == std::string::npos ? text.size() : to) - from);
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": malformed JSON near: " + context);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

RunConfig run_config_from_json(const Json& j) {
  check_keys(j, {"fields", "grid", "solver", "seed", "output", "continuation", "integrate"}, "");
  RunConfig rc;
  if (j.contains("fields")) rc.fields = fields_from_json(j["fields"]);
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    check_keys(g, {"n", "m"}, "grid");
    if (g.contains("n")) {
      const long n = integer(g, "n", "grid");
      if (n < static_cast<long>(kMinLoopSize) || n % 2 != 0) {
        throw ValidationError("key 'grid.n' must be even and at least " + std::to_string(kMinLoopSize));
      }
      rc.n = static_cast<std::size_t>(n);
    }
    if (g.contains("m")) {
      const long m = integer(g, "m", "grid");
      if (m < 4) throw ValidationError("key 'grid.m' must be at least 4");
      rc.m = static_cast<std::size_t>(m);
    }
  }
  rc.solver.m = rc.m;
  if (j.contains("solver")) {
    const Json& s = j["solver"];
    const std::string sp = "solver";
    check_keys(s, {"g_tol", "max_iterations", "lambda0", "lambda_increase", "lambda_decrease", "phase_fix",
                   "zhat_floor", "fd_step", "warmup_steps", "warmup_step", "threads"},
               sp);
    auto& o = rc.solver;
    o.g_tol = number_or(s, "g_tol", sp, o.g_tol);
    if (s.contains("max_iterations")) o.max_iterations = static_cast<int>(integer(s, "max_iterations", sp));
    o.lambda0 = number_or(s, "lambda0", sp, o.lambda0);
    o.lambda_increase = number_or(s, "lambda_increase", sp, o.lambda_increase);
    o.lambda_decrease = number_or(s, "lambda_decrease", sp, o.lambda_decrease);
    if (s.contains("phase_fix")) o.phase_fix = boolean(s, "phase_fix", sp);
    o.zhat_floor = number_or(s, "zhat_floor", sp, o.zhat_floor);
    o.fd_step = number_or(s, "fd_step", sp, o.fd_step);
    if (s.contains("warmup_steps")) o.warmup_steps = static_cast<int>(integer(s, "warmup_steps", sp));
    o.warmup_step = number_or(s, "warmup_step", sp, o.warmup_step);
    if (s.contains("threads")) o.threads = static_cast<unsigned>(integer(s, "threads", sp));
    if (!(o.g_tol > 0.0) || o.max_iterations <= 0 || !(o.lambda0 > 0.0) || !(o.fd_step > 0.0) ||
        !(o.zhat_floor > 0.0) || !(o.lambda_increase > 1.0) || !(o.lambda_decrease > 0.0 && o.lambda_decrease < 1.0)) {
      throw ValidationError("solver: tolerances must be positive and damping factors well ordered");
    }
  }
  if (j.contains("seed")) rc.seed = string_value(j, "seed", "");
  if (j.contains("output")) rc.output = string_value(j, "output", "");
  if (j.contains("continuation")) {
    const Json& c = j["continuation"];
    check_keys(c, {"parameter", "from", "to", "steps"}, "continuation");
    ContinuationSpec spec;
    spec.parameter = string_value(c, "parameter", "continuation");
    if (spec.parameter != "mu" && spec.parameter != "b" && spec.parameter != "eps" && spec.parameter != "mu_s") {
      throw ValidationError("key 'continuation.parameter' must be one of mu, b, eps, mu_s");
    }
    spec.from = number(c, "from", "continuation");
    spec.to = number(c, "to", "continuation");
    spec.steps = static_cast<int>(integer(c, "steps", "continuation"));
    if (spec.steps < 0) throw ValidationError("key 'continuation.steps' must be nonnegative");
    rc.continuation = spec;
  }
  if (j.contains("integrate")) {
    const Json& i = j["integrate"];
    check_keys(i, {"q0", "v0", "t0", "t1", "samples"}, "integrate");
    IntegrateSpec spec;
    spec.q0 = point(member(i, "q0", "integrate"), "integrate.q0");
    spec.v0 = point(member(i, "v0", "integrate"), "integrate.v0");
    spec.t0 = number_or(i, "t0", "integrate", 0.0);
    spec.t1 = number_or(i, "t1", "integrate", 1.0);
    if (i.contains("samples")) spec.samples = static_cast<std::size_t>(integer(i, "samples", "integrate"));
    rc.integrate = spec;
  }
  return rc;
}

Json run_config_to_json(const RunConfig& rc) {
  Json j;
  j["fields"] = fields_to_json(rc.fields);
  j["grid"] = Json{{"n", rc.n}, {"m", rc.m}};
  const auto& o = rc.solver;
  j["solver"] = Json{{"g_tol", o.g_tol},
                     {"max_iterations", o.max_iterations},
                     {"lambda0", o.lambda0},
                     {"lambda_increase", o.lambda_increase},
                     {"lambda_decrease", o.lambda_decrease},
                     {"phase_fix", o.phase_fix},
                     {"zhat_floor", o.zhat_floor},
                     {"fd_step", o.fd_step},
                     {"warmup_steps", o.warmup_steps},
                     {"warmup_step", o.warmup_step},
                     {"threads", o.threads}};
  if (rc.seed) j["seed"] = *rc.seed;
  if (rc.output) j["output"] = *rc.output;
  if (rc.continuation) {
    j["continuation"] = Json{{"parameter", rc.continuation->parameter},
                             {"from", rc.continuation->from},
                             {"to", rc.continuation->to},
                             {"steps", rc.continuation->steps}};
  }
  if (rc.integrate) {
    j["integrate"] = Json{{"q0", point_json(rc.integrate->q0)},
                          {"v0", point_json(rc.integrate->v0)},
                          {"t0", rc.integrate->t0},
                          {"t1", rc.integrate->t1},
                          {"samples", rc.integrate->samples}};
  }
  return j;
}

std::vector<FieldConfig> continuation_path(const FieldConfig& base, const ContinuationSpec& spec) {
  std::vector<FieldConfig> path;
  for (int k = 1; k <= spec.steps; ++k) {
    const double value = spec.from + (spec.to - spec.from) * static_cast<double>(k) / static_cast<double>(spec.steps);
    FieldConfig cfg = base;
    if (spec.parameter == "mu") {
      cfg.mu = value;
    } else if (spec.parameter == "b") {
      cfg.magnetic = presets::constant_magnetic(value);
    } else if (spec.parameter == "eps") {
      const ComplexPoint d = base.electric.kind == ElectricSpec::Kind::uniform_oscillating ? base.electric.direction
                                                                                           : ComplexPoint{1.0, 0.0};
      cfg.electric = presets::uniform_oscillating(value, d);
    } else if (spec.parameter == "mu_s") {
      if (base.electric.kind != ElectricSpec::Kind::rotating_charge) {
        throw ValidationError("continuation in mu_s needs a rotating_charge electric field");
      }
      cfg.electric.mu_s = value;
    } else {
      throw ValidationError("unknown continuation parameter '" + spec.parameter + "'");
    }
    path.push_back(make_config(cfg.mu, cfg.magnetic, cfg.electric));
  }
  return path;
}

DiscreteLoop make_seed(const std::string& spec, std::size_t n) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ValidationError("seed '" + spec + "': expected KIND:PARAMS");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "file") {
    const Json j = read_json(rest);
    if (j.is_object() && j.contains("diagnostics")) return record_from_json(j).z;
    return loop_from_json(j);
  }
  const auto p = split_numbers(rest, spec);
  auto expect = [&](std::size_t count) {
    if (p.size() != count) {
      throw ValidationError("seed '" + spec + "': expected " + std::to_string(count) + " parameters");
    }
  };
  if (kind == "circle") {
    expect(3);
    return seeds::circle({p[0], p[1]}, p[2], n);
  }
  if (kind == "ellipse") {
    expect(2);
    return seeds::ellipse_lift(p[0], p[1], n);
  }
  if (kind == "kepler") {
    expect(2);
    return seeds::kepler_guess(p[0], p[1], n);
  }
  if (kind == "radial") {
    expect(3);
    return seeds::radial(p[0], {p[1], p[2]}, n);
  }
  throw ValidationError("seed '" + spec + "': unknown kind '" + kind + "'");
}

namespace {

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t,q_re,q_im,v_re,v_im\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << format(traj.times[i]) << ',' << format(traj.positions[i].real()) << ',' << format(traj.positions[i].imag())
       << ',' << format(traj.velocities[i].real()) << ',' << format(traj.velocities[i].imag()) << '\n';
  }
  return os.str();
}

std::string physical_csv(const PhysicalLoop& q) {
  Trajectory t;
  for (std::size_t j = 0; j < q.size(); ++j) {
    t.times.push_back(q.node(j));
    t.positions.push_back(q.samples[j]);
    t.velocities.push_back(j < q.velocities.size() ? q.velocities[j]
                                                   : ComplexPoint{std::numeric_limits<double>::quiet_NaN(),
                                                                  std::numeric_limits<double>::quiet_NaN()});
  }
  return trajectory_csv(t);
}

namespace {

struct Panel {
  double x0, y0, size;
  double cx, cy, scale;  // data center and pixels per unit

  Panel(double x0_, double y0_, double size_, const ComplexSeq& pts, std::initializer_list<ComplexPoint> extra)
      : x0(x0_), y0(y0_), size(size_) {
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
    auto include = [&](ComplexPoint p) {
      lo_x = std::min(lo_x, p.real());
      hi_x = std::max(hi_x, p.real());
      lo_y = std::min(lo_y, p.imag());
      hi_y = std::max(hi_y, p.imag());
    };
    for (auto p : pts) include(p);
    for (auto p : extra) include(p);
    cx = 0.5 * (lo_x + hi_x);
    cy = 0.5 * (lo_y + hi_y);
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
    scale = 0.85 * size / span;
  }

  std::pair<double, double> map(ComplexPoint p) const {
    return {x0 + 0.5 * size + scale * (p.real() - cx), y0 + 0.5 * size - scale * (p.imag() - cy)};
  }
};

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string polyline_path(const Panel& panel, const ComplexSeq& pts) {
  std::ostringstream d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto [x, y] = panel.map(pts[i]);
    d << (i == 0 ? "M" : " L") << svg_number(x) << ' ' << svg_number(y);
  }
  d << " Z";
  return d.str();
}

}  // namespace

std::string orbit_svg(const OrbitRecord& rec) {
  const double size = 400.0;
  const ComplexSeq zc = rec.z.double_cover();
  const Panel zp(0.0, 0.0, size, zc, {ComplexPoint{-1.0, -1.0}, ComplexPoint{1.0, 1.0}});
  const Panel qp(size, 0.0, size, rec.q.samples, {kMinusPrimary, kPlusPrimary});
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << 2 * size << ' ' << size << "\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"" << 2 * size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  os << "  <g id=\"z-plane\">\n";
  os << "    <text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">z-plane</text>\n";
  {
    auto [ux, uy] = zp.map(0.0);
    os << "    <circle class=\"unit-circle\" cx=\"" << svg_number(ux) << "\" cy=\"" << svg_number(uy) << "\" r=\""
       << svg_number(zp.scale) << "\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  }
  os << "    <path class=\"z-curve\" d=\"" << polyline_path(zp, zc)
     << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
  os << "  </g>\n";
  os << "  <g id=\"q-plane\">\n";
  os << "    <text x=\"" << size + 10 << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">q-plane</text>\n";
  os << "    <path class=\"q-curve\" d=\"" << polyline_path(qp, rec.q.samples)
     << "\" fill=\"none\" stroke=\"firebrick\" stroke-width=\"1.5\"/>\n";
  for (ComplexPoint p : {kMinusPrimary, kPlusPrimary}) {
    auto [x, y] = qp.map(p);
    os << "    <circle class=\"primary\" cx=\"" << svg_number(x) << "\" cy=\"" << svg_number(y)
       << "\" r=\"4\" fill=\"black\"/>\n";
  }
  os << "  </g>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace szbov::io
