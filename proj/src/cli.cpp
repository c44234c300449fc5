#include "szbov/cli.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "szbov/io.hpp"

namespace szbov::cli {

namespace {

using io::Json;

struct Options {
  std::string config;
  std::string seed;
  std::string out;
  std::string in;
  std::string format = "loop";
  std::string fault;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<double> tol;
  std::optional<double> mu;
  std::optional<bool> twisted;
  bool quiet = false;
  int count = 3;
  unsigned long long rng_seed = 1;
};

struct Context {
  const Options& opt;
  std::ostream& out;
  std::ostream& err;
};

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

io::RunConfig load_run_config(const Options& opt) {
  io::RunConfig rc = opt.config.empty() ? io::RunConfig{} : io::run_config_from_json(io::read_json(opt.config));
  if (opt.n) {
    if (*opt.n < kMinLoopSize || *opt.n % 2 != 0) {
      throw ValidationError("--n must be even and at least " + std::to_string(kMinLoopSize));
    }
    rc.n = *opt.n;
  }
  if (opt.m) {
    if (*opt.m < 4) throw ValidationError("--m must be at least 4");
    rc.m = *opt.m;
  }
  rc.solver.m = rc.m;
  if (opt.mu) rc.fields = make_config(*opt.mu, rc.fields.magnetic, rc.fields.electric);
  if (!opt.seed.empty()) rc.seed = opt.seed;
  if (!opt.out.empty()) rc.output = opt.out;
  return rc;
}

struct Input {
  DiscreteLoop z;
  std::optional<OrbitRecord> record;
};

bool is_record(const Json& j) { return j.is_object() && j.contains("diagnostics"); }

Input load_input(const Options& opt, const io::RunConfig& rc) {
  Input in;
  if (!opt.in.empty()) {
    const Json j = io::read_json(opt.in);
    if (is_record(j)) {
      in.record = io::record_from_json(j);
      in.z = in.record->z;
    } else {
      in.z = io::loop_from_json(j);
    }
  } else if (rc.seed) {
    in.z = io::make_seed(*rc.seed, rc.n);
  } else {
    throw ValidationError("no loop given: pass --in FILE or --seed SPEC");
  }
  if (opt.twisted && *opt.twisted != in.z.twisted()) {
    throw ValidationError(std::string("--twisted ") + (*opt.twisted ? "true" : "false") + " but the loop is " +
                          (in.z.twisted() ? "twisted" : "plain"));
  }
  return in;
}

/// Fields from an explicit config take precedence over the ones stored in a record.
FieldConfig fields_for(const Options& opt, const io::RunConfig& rc, const Input& in) {
  if (in.record && opt.config.empty()) {
    return opt.mu ? make_config(*opt.mu, in.record->cfg.magnetic, in.record->cfg.electric) : in.record->cfg;
  }
  return rc.fields;
}

OrbitRecord load_record(const Options& opt) {
  if (opt.in.empty()) throw ValidationError("--in ORBIT.json is required");
  const Json j = io::read_json(opt.in);
  if (!is_record(j)) throw ValidationError("'" + opt.in + "' is not an orbit record");
  return io::record_from_json(j);
}

void emit(const Context& ctx, const std::string& text, const std::optional<std::string>& path) {
  if (path && !path->empty()) {
    io::write_file(*path, text);
  } else {
    ctx.out << text;
  }
}

void print_summary(const Context& ctx, const OrbitRecord& rec) {
  if (ctx.opt.quiet) return;
  ctx.err << "action " << fmt(rec.breakdown.total) << "  C " << fmt(rec.C) << "  grad_norm " << fmt(rec.grad_norm, "%.3e")
          << "  delay_sup " << fmt(rec.delay_sup, "%.3e") << "  phi_sup " << fmt(rec.phi_sup, "%.3e")
          << "  iterations " << rec.iterations << (rec.converged ? "" : "  (not converged)") << '\n';
}

SolveOptions solver_options(const Context& ctx, const io::RunConfig& rc) {
  SolveOptions so = rc.solver;
  if (ctx.opt.tol) so.g_tol = *ctx.opt.tol;
  if (!ctx.opt.quiet) {
    std::ostream& err = ctx.err;
    so.progress = [&err](int it, double g, double a) {
      err << "  iter " << it << "  grad_norm " << fmt(g, "%.3e") << "  action " << fmt(a) << '\n';
    };
  }
  return so;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const Context& ctx) {
  const auto rc = load_run_config(ctx.opt);
  const auto in = load_input(ctx.opt, rc);
  const auto cfg = fields_for(ctx.opt, rc, in);
  const auto b = eval_components(in.z, cfg);
  const double C = delay_constant(b, cfg.mu);
  const std::pair<const char*, double> rows[] = {{"F", b.F},   {"G", b.G},         {"H1", b.H1},
                                                 {"H2", b.H2}, {"M", b.M},         {"E", b.E_val},
                                                 {"E1", b.E1}, {"total", b.total}, {"C", C}};
  Json j;
  j["n"] = in.z.size();
  j["twisted"] = in.z.twisted();
  j["fields"] = io::fields_to_json(cfg);
  j["components"] = Json{{"F", b.F}, {"G", b.G}, {"H1", b.H1}, {"H2", b.H2}, {"M", b.M}, {"E", b.E_val}, {"E1", b.E1}};
  j["action"] = b.total;
  j["C"] = C;
  if (rc.output) {
    io::write_file(*rc.output, io::dump(j));
    if (ctx.opt.quiet) return ok;
  }
  for (const auto& [name, value] : rows) ctx.out << name << " = " << fmt(value) << '\n';
  return ok;
}

// ---------------------------------------------------------------- grad-check

std::vector<FieldConfig> preset_matrix(double mu) {
  std::vector<FieldConfig> cfgs;
  for (double b : {0.0, 2.0}) {
    const auto mag = b == 0.0 ? presets::zero_magnetic() : presets::constant_magnetic(b);
    cfgs.push_back(make_config(mu, mag, presets::zero_electric()));
    cfgs.push_back(make_config(mu, mag, presets::uniform_oscillating(0.1, {0.6, 0.8})));
    cfgs.push_back(make_config(mu, mag, presets::rotating_charge(0.01, 3.0, 1, 0.0)));
  }
  return cfgs;
}

DiscreteLoop random_plain(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexSeq c;
  for (int k = -4; k <= 4; ++k) c.emplace_back(normal(rng) * 0.1 / (1 + std::abs(k)), normal(rng) * 0.1 / (1 + std::abs(k)));
  ComplexSeq s(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double tau = static_cast<double>(j) / static_cast<double>(n);
    s[j] = std::polar(2.0, kTwoPi * tau);
    for (int k = -4; k <= 4; ++k) s[j] += c[k + 4] * std::polar(1.0, kTwoPi * k * tau);
  }
  return DiscreteLoop(std::move(s));
}

DiscreteLoop random_twisted(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::pair<int, ComplexPoint>> c;
  for (int k = -5; k <= 5; k += 2) c.emplace_back(k, ComplexPoint{normal(rng), normal(rng)} * (0.6 / (1 + std::abs(k))));
  ComplexSeq s(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double tau = static_cast<double>(j) / static_cast<double>(n);
    ComplexPoint f{};
    for (auto [k, ck] : c) f += ck * std::polar(1.0, kPi * k * tau);
    s[j] = std::exp(f);
  }
  return DiscreteLoop(std::move(s), true);
}

ComplexSeq random_direction(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexSeq xi(n);
  for (int k = -6; k <= 6; ++k) {
    const ComplexPoint c{normal(rng), normal(rng)};
    for (std::size_t j = 0; j < n; ++j) xi[j] += c * std::polar(1.0, kTwoPi * k * static_cast<double>(j) / static_cast<double>(n));
  }
  double norm = 0.0;
  for (auto v : xi) norm = std::max(norm, std::abs(v));
  for (auto& v : xi) v /= norm;
  return xi;
}

double component_value(const ActionBreakdown& b, const std::string& name) {
  if (name == "F") return b.F;
  if (name == "G") return b.G;
  if (name == "H1") return b.H1;
  if (name == "H2") return b.H2;
  if (name == "M") return b.M;
  if (name == "E") return b.E_val;
  return b.total;
}

const ComplexSeq& component_gradient(const ComponentGradients& g, const std::string& name) {
  if (name == "F") return g.F;
  if (name == "G") return g.G;
  if (name == "H1") return g.H1;
  if (name == "H2") return g.H2;
  if (name == "M") return g.M;
  return g.E;
}

/// Best relative agreement of the analytic directional derivative with central
/// differences over the step sweep.
double fd_error(const DiscreteLoop& z, const FieldConfig& cfg, const ComplexSeq& xi, const std::string& name,
                double analytic) {
  auto shifted = [&](double h) {
    ComplexSeq s = z.samples();
    for (std::size_t j = 0; j < s.size(); ++j) s[j] += h * xi[j];
    return component_value(eval_components(DiscreteLoop(std::move(s), z.twisted()), cfg), name);
  };
  double best = std::numeric_limits<double>::infinity();
  for (double h : {1e-4, 1e-5, 1e-6, 1e-7}) {
    const double fd = (shifted(h) - shifted(-h)) / (2.0 * h);
    best = std::min(best, std::abs(analytic - fd) / (std::abs(fd) + 1e-12));
  }
  return best;
}

int cmd_grad_check(const Context& ctx) {
  const auto rc = load_run_config(ctx.opt);
  const std::size_t n = ctx.opt.n.value_or(64);
  const double tol = ctx.opt.tol.value_or(1e-6);
  if (ctx.opt.count <= 0) throw ValidationError("--count must be positive");
  const auto cfgs = ctx.opt.config.empty() ? preset_matrix(ctx.opt.mu.value_or(0.3)) : std::vector{rc.fields};
  if (!ctx.opt.fault.empty()) testing::inject_gradient_fault(ctx.opt.fault);
  struct Reset {
    ~Reset() { testing::inject_gradient_fault(""); }
  } reset;

  std::mt19937_64 rng(ctx.opt.rng_seed);
  double worst = 0.0;
  std::string worst_name = "none";
  std::size_t checks = 0;
  for (const auto& cfg : cfgs) {
    for (int trial = 0; trial < 2 * ctx.opt.count; ++trial) {
      const auto z = trial % 2 ? random_twisted(rng, n) : random_plain(rng, n);
      const auto grads = component_gradients(z, cfg);
      const auto total = gradient(z, cfg);
      const auto xi = random_direction(rng, n);
      for (const std::string name : {"F", "G", "H1", "H2", "M", "E", "total"}) {
        if (name == "M" && cfg.magnetic.is_zero()) continue;
        if (name == "E" && cfg.electric.is_zero()) continue;
        const ComplexSeq& g = name == "total" ? total : component_gradient(grads, name);
        double analytic = 0.0;
        for (std::size_t j = 0; j < n; ++j) analytic += dot(g[j], xi[j]);
        const double e = fd_error(z, cfg, xi, name, analytic);
        ++checks;
        // Components are reported ahead of the total they feed into.
        if (e > worst && !(name == "total" && worst > tol)) {
          worst = e;
          worst_name = name;
        }
      }
    }
  }
  const bool passed = worst < tol;
  if (!ctx.opt.quiet || !passed) {
    ctx.out << "grad-check: " << checks << " directional derivatives, n = " << n << ", max relative error "
            << fmt(worst, "%.3e") << " (" << worst_name << ")\n";
    ctx.out << (passed ? "PASS" : "FAIL: gradient of " + worst_name + " disagrees with finite differences") << '\n';
  }
  return passed ? ok : check_failed;
}

// ---------------------------------------------------------------- solve / continue

int cmd_solve(const Context& ctx) {
  const auto rc = load_run_config(ctx.opt);
  const auto in = load_input(ctx.opt, rc);
  const auto cfg = fields_for(ctx.opt, rc, in);
  const auto so = solver_options(ctx, rc);
  try {
    const auto rec = solve(in.z, cfg, so);
    print_summary(ctx, rec);
    emit(ctx, io::dump(io::record_to_json(rec)), rc.output);
    return ok;
  } catch (const NoConvergenceError& e) {
    ctx.err << "error: " << e.what() << '\n';
    print_summary(ctx, e.best());
    if (rc.output) io::write_file(*rc.output, io::dump(io::record_to_json(e.best())));
    return no_convergence;
  } catch (const DegeneratedError& e) {
    ctx.err << "error: " << e.what() << '\n';
    return no_convergence;
  }
}

int cmd_continue(const Context& ctx) {
  const auto rc = load_run_config(ctx.opt);
  if (!rc.continuation) throw ValidationError("continue needs a 'continuation' block in the config");
  const auto in = load_input(ctx.opt, rc);
  auto so = solver_options(ctx, rc);
  so.progress = nullptr;

  // The start of the family is the first configuration of the path at 'from'.
  auto start_spec = *rc.continuation;
  start_spec.to = start_spec.from;
  start_spec.steps = 1;
  const FieldConfig base = io::continuation_path(rc.fields, start_spec).front();

  OrbitRecord start;
  try {
    start = solve(in.z, base, so);
  } catch (const NoConvergenceError& e) {
    ctx.err << "error: start orbit: " << e.what() << '\n';
    return no_convergence;
  }
  const auto path = io::continuation_path(base, *rc.continuation);
  std::vector<OrbitRecord> family;
  int code = ok;
  try {
    family = continue_family(start, path, so);
  } catch (const ContinuationError& e) {
    ctx.err << "error: " << e.what() << '\n';
    family = {start};
    code = no_convergence;
  }
  if (family.size() < path.size() + 1) {
    if (code == ok) ctx.err << "error: continuation stopped after " << family.size() - 1 << " of " << path.size() << " steps\n";
    code = no_convergence;
  }
  Json j;
  j["parameter"] = rc.continuation->parameter;
  j["from"] = rc.continuation->from;
  j["to"] = rc.continuation->to;
  j["steps"] = rc.continuation->steps;
  Json orbits = Json::array();
  for (const auto& rec : family) {
    orbits.push_back(io::record_to_json(rec));
    if (!ctx.opt.quiet) {
      ctx.err << "mu " << fmt(rec.cfg.mu, "%.6g") << "  ";
    }
    print_summary(ctx, rec);
  }
  j["orbits"] = std::move(orbits);
  emit(ctx, io::dump(j), rc.output);
  return code;
}

// ---------------------------------------------------------------- integrate / verify

int cmd_integrate(const Context& ctx) {
  const auto rc = load_run_config(ctx.opt);
  ComplexPoint q0, v0;
  double t0 = 0.0, t1 = 1.0;
  std::size_t samples = rc.m;
  FieldConfig cfg = rc.fields;
  if (!ctx.opt.in.empty()) {
    const auto rec = load_record(ctx.opt);
    if (ctx.opt.config.empty()) cfg = rec.cfg;
    // Records carry positions only; velocities come from a fresh reconstruction.
    const auto q = reconstruct(rec.z, rc.m);
    std::size_t j = 0;
    while (j < q.size() && !is_finite(q.velocities[j])) ++j;
    if (j == q.size()) throw ValidationError("reconstruction has no node with a finite velocity");
    q0 = q.samples[j];
    v0 = q.velocities[j];
    t0 = q.node(j);
    t1 = t0 + 1.0;
  } else if (rc.integrate) {
    q0 = rc.integrate->q0;
    v0 = rc.integrate->v0;
    t0 = rc.integrate->t0;
    t1 = rc.integrate->t1;
    if (rc.integrate->samples > 0) samples = rc.integrate->samples;
  } else {
    throw ValidationError("integrate needs --in ORBIT.json or an 'integrate' block in the config");
  }
  IntegrateOptions io_opt;
  if (ctx.opt.tol) io_opt.tol = *ctx.opt.tol;
  for (std::size_t k = 0; k <= samples; ++k) {
    io_opt.sample_times.push_back(t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(samples));
  }
  const auto traj = integrate(q0, v0, t0, t1, cfg, io_opt);
  emit(ctx, io::trajectory_csv(traj), rc.output);
  if (traj.terminated != Termination::completed) {
    ctx.err << "integration stopped at t = " << fmt(traj.final_time) << ": " << to_string(traj.terminated) << '\n';
    return check_failed;
  }
  return ok;
}

int cmd_verify(const Context& ctx) {
  const auto rc = load_run_config(ctx.opt);
  const auto stored = load_record(ctx.opt);
  const FieldConfig cfg = ctx.opt.config.empty() ? stored.cfg : rc.fields;
  VerifyOptions vo;
  vo.m = rc.m;
  if (ctx.opt.tol) vo.tol = *ctx.opt.tol;
  const auto rec = make_record(stored.z, cfg, rc.m);
  const auto report = verify_generalized(rec, cfg, vo);

  Json j;
  j["passed"] = report.passed();
  j["tol"] = vo.tol;
  j["collision_count"] = report.collision_count;
  j["collision_times"] = report.collision_times;
  j["collisions_finite"] = report.collisions_finite;
  j["arc_error"] = report.arc_error;
  j["arcs_ok"] = report.arcs_ok;
  j["energy_jump"] = report.energy_jump;
  j["energy_ok"] = report.energy_ok;
  j["closure_error"] = report.closure_error;
  j["closure_ok"] = report.closure_ok;
  j["diagnostics"] = Json{{"action", rec.breakdown.total},
                          {"C", rec.C},
                          {"grad_norm", rec.grad_norm},
                          {"delay_sup", rec.delay_sup},
                          {"phi_sup", rec.phi_sup}};
  if (rc.output) io::write_file(*rc.output, io::dump(j));
  if (!ctx.opt.quiet || !report.passed()) {
    auto line = [&](const char* name, bool pass, double value) {
      ctx.out << (pass ? "ok   " : "FAIL ") << name << ' ' << fmt(value, "%.3e") << '\n';
    };
    ctx.out << "collisions " << report.collision_count << '\n';
    line("collisions_finite", report.collisions_finite, static_cast<double>(report.collision_count));
    line("arc_error", report.arcs_ok, report.arc_error);
    line("energy_jump", report.energy_ok, report.energy_jump);
    line("closure_error", report.closure_ok, report.closure_error);
    ctx.out << "grad_norm " << fmt(rec.grad_norm, "%.3e") << "  delay_sup " << fmt(rec.delay_sup, "%.3e")
            << "  phi_sup " << fmt(rec.phi_sup, "%.3e") << '\n';
    ctx.out << (report.passed() ? "PASS" : "FAIL") << '\n';
  }
  return report.passed() ? ok : check_failed;
}

// ---------------------------------------------------------------- plot / export

int cmd_plot(const Context& ctx) {
  const auto rc = load_run_config(ctx.opt);
  const auto rec = load_record(ctx.opt);
  emit(ctx, io::orbit_svg(rec), rc.output);
  return ok;
}

int cmd_export(const Context& ctx) {
  const auto rc = load_run_config(ctx.opt);
  const auto in = load_input(ctx.opt, rc);
  const auto& fmt_name = ctx.opt.format;
  if (fmt_name == "loop") {
    emit(ctx, io::dump(io::loop_to_json(in.z)), rc.output);
  } else if (fmt_name == "csv") {
    emit(ctx, io::physical_csv(reconstruct(in.z, rc.m)), rc.output);
  } else if (fmt_name == "record") {
    const auto cfg = fields_for(ctx.opt, rc, in);
    emit(ctx, io::dump(io::record_to_json(in.record && ctx.opt.config.empty() ? *in.record : make_record(in.z, cfg, rc.m))),
         rc.output);
  } else if (fmt_name == "config") {
    emit(ctx, io::dump(io::run_config_to_json(rc)), rc.output);
  } else {
    throw ValidationError("--format must be loop, csv, record or config");
  }
  return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Periodic orbits of two-center Stark-Zeeman systems via the regularized loop-space action", "szbov"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Run configuration (JSON)");
    sub->add_option("--seed", opt.seed,
                    "Seed loop: circle:CX,CY,R | ellipse:A,B | kepler:SIDE,R | radial:SIDE,KRE,KIM | file:PATH");
    sub->add_option("--out", opt.out, "Output path (default: standard output)");
    sub->add_option("--in", opt.in, "Input loop or orbit record (JSON)");
    sub->add_option("--n", opt.n, "Blown-up samples N");
    sub->add_option("--m", opt.m, "Physical samples M");
    sub->add_option("--tol", opt.tol, "Tolerance (solver gradient, verification, or grad-check)");
    sub->add_option("--mu", opt.mu, "Override the mass parameter");
    sub->add_option("--twisted", opt.twisted, "Require the loop to be twisted (true) or plain (false)");
    sub->add_flag("--quiet", opt.quiet, "Suppress progress and summaries");
  };

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
  };
  const Entry entries[] = {
      {"eval", "Evaluate the functional and its components on a loop", cmd_eval},
      {"grad-check", "Compare analytic gradients with central differences", cmd_grad_check},
      {"solve", "Find a critical point from a seed", cmd_solve},
      {"continue", "Natural-parameter continuation of an orbit family", cmd_continue},
      {"integrate", "Integrate the Newtonian equation (CSV trajectory)", cmd_integrate},
      {"verify", "Check that an orbit record is a generalized solution", cmd_verify},
      {"plot", "Two-panel SVG of an orbit record", cmd_plot},
      {"export", "Write a loop, reconstruction CSV, record, or resolved config", cmd_export},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Context&)>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    common(sub);
    subs.emplace_back(sub, e.fn);
    if (std::string(e.name) == "grad-check") {
      sub->add_option("--count", opt.count, "Random loops per sector and field configuration");
      sub->add_option("--rng-seed", opt.rng_seed, "Seed of the loop generator");
      sub->add_option("--inject-fault", opt.fault)->group("");
    }
    if (std::string(e.name) == "export") {
      sub->add_option("--format", opt.format, "loop | csv | record | config");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : invalid;
  }

  const Context ctx{opt, out, err};
  try {
    for (const auto& [sub, fn] : subs) {
      if (sub->parsed()) return fn(ctx);
    }
    return invalid;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << '\n';
    return io_failure;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return invalid;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return check_failed;
  }
}

}  // namespace szbov::cli
