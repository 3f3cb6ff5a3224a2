#include "majorana/cli/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "majorana/correlation.hpp"
#include "majorana/entangle.hpp"
#include "majorana/geometry.hpp"
#include "majorana/stellar.hpp"

namespace majorana::cli {

namespace {

// ---------------------------------------------------------------------------
// Logging and output plumbing
// ---------------------------------------------------------------------------

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
  const char* v = std::getenv("MAJORANA_LOG");
  if (!v) return LogLevel::quiet;
  const std::string s(v);
  if (s == "debug") return LogLevel::debug;
  if (s == "info") return LogLevel::info;
  return LogLevel::quiet;
}

void log(std::ostream& err, LogLevel level, const std::string& msg) {
  if (static_cast<int>(log_level()) >= static_cast<int>(level)) err << "[majorana] " << msg << '\n';
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Files produced by a command, written only once the command has succeeded.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }

  void flush(const RunOptions& opts, std::ostream& out) const {
    if (opts.out.empty()) {
      for (const auto& [name, content] : files) out << content;
      return;
    }
    std::error_code ec;
    std::filesystem::create_directories(opts.out, ec);
    if (ec) throw ConfigError(opts.out.string() + ": cannot create output directory (" + ec.message() + ")");
    for (const auto& [name, content] : files) {
      const auto path = opts.out / name;
      std::ofstream f(path, std::ios::binary);
      if (!f) throw ConfigError(path.string() + ": cannot write");
      f << content;
    }
  }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json require_config(const RunOptions& opts) {
  if (opts.config.empty()) throw ConfigError("--config is required for this command");
  return load_json(opts.config);
}

StarSet stars_from_config(const json& j, double tol) {
  if (j.is_object() && j.contains("amplitudes")) return find_stars(parse_state(j), tol);
  if (j.is_object() && j.contains("stars")) return StarSet(parse_directions(j["stars"]));
  throw ConfigError("config: expected a state {amplitudes} or a constellation {stars}");
}

// Residual of star k, where only finite roots carry one.
double star_residual(const StarSet& s, std::size_t k) {
  const std::size_t finite = s.residuals.size();
  const std::size_t north = s.size() - static_cast<std::size_t>(s.infinity_count) - finite;
  return (k >= north && k < north + finite) ? s.residuals[k - north] : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// stars / state / norm
// ---------------------------------------------------------------------------

int cmd_stars(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const SpinState state = parse_state(require_config(opts));
  const StarSet stars = find_stars(state, opts.tol_or(1e-10));
  log(err, LogLevel::info, "found " + std::to_string(stars.size()) + " stars");

  Outputs o;
  if (opts.format == "json") {
    json rows = json::array();
    for (std::size_t k = 0; k < stars.size(); ++k) {
      const Vec3& v = stars[k].cartesian();
      rows.push_back({{"index", k},
                      {"theta", stars[k].theta()},
                      {"phi", stars[k].phi()},
                      {"x", v.x()},
                      {"y", v.y()},
                      {"z", v.z()},
                      {"residual", star_residual(stars, k)}});
    }
    o.add("stars.json", dump({{"schema_version", kSchemaVersion},
                              {"command", "stars"},
                              {"n", state.n()},
                              {"infinity_count", stars.infinity_count},
                              {"stars", rows}}));
  } else {
    std::ostringstream csv;
    csv << "schema_version,index,theta,phi,x,y,z,residual\n";
    for (std::size_t k = 0; k < stars.size(); ++k) {
      const Vec3& v = stars[k].cartesian();
      csv << kSchemaVersion << ',' << k << ',' << num(stars[k].theta()) << ',' << num(stars[k].phi()) << ','
          << num(v.x()) << ',' << num(v.y()) << ',' << num(v.z()) << ',' << num(star_residual(stars, k)) << '\n';
    }
    o.add("stars.csv", csv.str());
  }
  o.flush(opts, out);
  return kExitOk;
}

int cmd_state(const RunOptions& opts, std::ostream& out, std::ostream&) {
  const json cfg = require_config(opts);
  if (!cfg.is_object() || !cfg.contains("stars")) throw ConfigError("config: missing array 'stars'");
  const SpinState state = state_from_stars(parse_directions(cfg["stars"]));

  Outputs o;
  if (opts.format == "json") {
    json j = state_to_json(state);
    j["schema_version"] = kSchemaVersion;
    o.add("state.json", dump(j));
  } else {
    std::ostringstream csv;
    csv << "schema_version,index,two_m,re,im\n";
    for (int k = 0; k <= state.n(); ++k)
      csv << kSchemaVersion << ',' << k << ',' << 2 * k - state.n() << ',' << num(state.amplitudes[k].real()) << ','
          << num(state.amplitudes[k].imag()) << '\n';
    o.add("state.csv", csv.str());
  }
  o.flush(opts, out);
  return kExitOk;
}

int cmd_norm(const RunOptions& opts, std::ostream& out, std::ostream&) {
  const StarSet stars = stars_from_config(require_config(opts), opts.tol_or(1e-10));
  const int n = static_cast<int>(stars.size());
  const CorrelationTable t = correlation_table(std::span<const Vec3>(stars.cartesian()));
  const double perm = n <= kMaxPermanentN ? normalization_sq_permanent(stars) : std::nan("");

  Outputs o;
  if (opts.format == "json") {
    json pairs = json::array();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        pairs.push_back({{"i", i}, {"j", j}, {"d", t.dist(i, j)}, {"dnorm_sq", t.dnorm(i, j)}, {"beta", t.beta(i, j)}});
    o.add("norm.json", dump({{"schema_version", kSchemaVersion},
                             {"command", "norm"},
                             {"n", n},
                             {"norm_sq", t.norm_sq},
                             {"permanent_norm_sq", num_or_null(perm)},
                             {"ratio", num_or_null(t.norm_sq / perm)},
                             {"pairs", pairs}}));
  } else {
    std::ostringstream csv;
    csv << "schema_version,i,j,d,dnorm_sq,beta,norm_sq,permanent_norm_sq\n";
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        csv << kSchemaVersion << ',' << i << ',' << j << ',' << num(t.dist(i, j)) << ',' << num(t.dnorm(i, j)) << ','
            << num(t.beta(i, j)) << ',' << num(t.norm_sq) << ',' << num(perm) << '\n';
    o.add("norm.csv", csv.str());
  }
  o.flush(opts, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// berry
// ---------------------------------------------------------------------------

int cmd_berry(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const BerryInput in = parse_berry(require_config(opts), opts);
  const LoopTrajectory& loop = in.loop;
  const PhaseBreakdown b = berry_phase(loop, true);

  std::vector<SpinState> states = in.states;
  if (!in.has_states)
    for (const StarSet& s : loop.samples()) states.push_back(state_from_stars(s));
  const double oracle = berry_phase_oracle(states);
  const double diff = std::abs(wrap_pi(b.gamma_total - oracle));
  log(err, LogLevel::info, "gamma = " + num(b.gamma_total_mod) + ", oracle = " + num(oracle));

  Outputs o;
  if (opts.format == "json") {
    json pairs = json::array();
    for (const PairPhase& p : b.per_pair)
      pairs.push_back({{"i", p.i}, {"j", p.j}, {"gamma_c", p.gamma_c}, {"gamma_r", p.gamma_r}, {"gamma_a", p.gamma_a},
                       {"excluded", p.excluded}});
    o.add("berry.json", dump({{"schema_version", kSchemaVersion},
                              {"command", "berry"},
                              {"n", loop.n()},
                              {"steps", loop.steps()},
                              {"gamma_total", b.gamma_total},
                              {"gamma_total_mod", b.gamma_total_mod},
                              {"gamma0", b.gamma_0},
                              {"gammaC", b.gamma_c},
                              {"gammaR", b.gamma_r},
                              {"gammaA", b.gamma_a},
                              {"omega", b.per_star_solid_angles},
                              {"gamma_oracle", oracle},
                              {"oracle_diff", diff},
                              {"closing", loop.closing()},
                              {"pairs", pairs}}));
  } else {
    std::ostringstream csv;
    csv << "schema_version,n,steps,gamma_total,gamma_total_mod,gamma0,gammaC,gammaR,gammaA,gamma_oracle,oracle_diff";
    for (int i = 0; i < loop.n(); ++i) csv << ",omega_" << i;
    csv << '\n'
        << kSchemaVersion << ',' << loop.n() << ',' << loop.steps() << ',' << num(b.gamma_total) << ','
        << num(b.gamma_total_mod) << ',' << num(b.gamma_0) << ',' << num(b.gamma_c) << ',' << num(b.gamma_r) << ','
        << num(b.gamma_a) << ',' << num(oracle) << ',' << num(diff);
    for (double w : b.per_star_solid_angles) csv << ',' << num(w);
    csv << '\n';
    o.add("berry.csv", csv.str());
  }
  if (in.trace && !opts.out.empty()) {
    std::ostringstream tr;
    tr << "schema_version,step,star,theta,phi,x,y,z\n";
    for (std::size_t t = 0; t < loop.samples().size(); ++t)
      for (std::size_t i = 0; i < loop.samples()[t].size(); ++i) {
        const Direction& d = loop.samples()[t][i];
        tr << kSchemaVersion << ',' << t << ',' << i << ',' << num(d.theta()) << ',' << num(d.phi()) << ','
           << num(d.cartesian().x()) << ',' << num(d.cartesian().y()) << ',' << num(d.cartesian().z()) << '\n';
      }
    o.add("trace.csv", tr.str());
  }
  o.flush(opts, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// boson-sweep
// ---------------------------------------------------------------------------

int cmd_boson_sweep(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const json cfg = require_config(opts);
  const SweepConfig c = parse_sweep(cfg, opts);
  const std::vector<SweepRow> rows = sweep_lambda(c.n, c.loop, c.level, c.lambda_over_R, c.options);

  std::size_t valid = 0;
  json errors = json::array();
  for (const SweepRow& r : rows) {
    if (r.valid) {
      ++valid;
    } else {
      errors.push_back({{"lambda_over_R", r.lambda_over_R}, {"error", r.error}});
      log(err, LogLevel::quiet, "row lambda/R = " + num(r.lambda_over_R) + " invalid: " + r.error);
    }
  }

  const double theta0 = c.loop.schedule.front().first;
  json meta = {{"schema_version", kSchemaVersion},
               {"command", "boson-sweep"},
               {"config", cfg},
               {"n", c.n},
               {"level", c.level},
               {"m_u", c.level - 0.5 * c.n},
               {"R", c.R},
               {"loop_steps", c.loop.steps()},
               {"loop_theta_start", theta0},
               {"loop_solid_angle", loop_solid_angle(c.loop.field_directions())},
               {"lambda_zero_reference", lambda_zero_reference(c.n, c.level, c.loop)},
               {"rows", rows.size()},
               {"rows_valid", valid},
               {"invalid_rows", errors}};

  Outputs o;
  if (opts.format == "json") {
    json table = json::array();
    for (const SweepRow& r : rows)
      table.push_back({{"lambda_over_R", r.lambda_over_R},
                       {"gamma_formula", r.gamma_formula},
                       {"gamma_oracle", r.gamma_oracle},
                       {"gamma0", r.gamma0},
                       {"gammaC", r.gammaC},
                       {"gammaR", r.gammaR},
                       {"gammaA", r.gammaA},
                       {"min_gap", r.min_gap},
                       {"valid", r.valid},
                       {"level", r.level},
                       {"m_u", r.m_u}});
    meta["table"] = table;
    o.add("sweep.json", dump(meta));
  } else {
    std::ostringstream csv;
    csv << "schema_version,lambda_over_R,gamma_formula,gamma_oracle,gamma0,gammaC,gammaR,gammaA,min_gap,valid,level,m_u\n";
    for (const SweepRow& r : rows)
      csv << kSchemaVersion << ',' << num(r.lambda_over_R) << ',' << num(r.gamma_formula) << ',' << num(r.gamma_oracle)
          << ',' << num(r.gamma0) << ',' << num(r.gammaC) << ',' << num(r.gammaR) << ',' << num(r.gammaA) << ','
          << num(r.min_gap) << ',' << (r.valid ? 1 : 0) << ',' << r.level << ',' << num(r.m_u) << '\n';
    o.add("sweep.csv", csv.str());
    if (!opts.out.empty()) o.add("sweep_meta.json", dump(meta));
  }
  o.flush(opts, out);
  return valid == 0 ? kExitEmpty : kExitOk;
}

// ---------------------------------------------------------------------------
// entangle
// ---------------------------------------------------------------------------

int cmd_entangle(const RunOptions& opts, std::ostream& out, std::ostream&) {
  const StarSet stars = stars_from_config(require_config(opts), opts.tol_or(1e-10));
  const EntanglementReport r = entanglement_report(stars);

  Outputs o;
  if (opts.format == "json") {
    json measures = json::array();
    for (const auto& m : r.measures) measures.push_back({{"name", m.name}, {"value", m.value}, {"degenerate", m.degenerate}});
    o.add("entangle.json", dump({{"schema_version", kSchemaVersion},
                                 {"command", "entangle"},
                                 {"n", r.n},
                                 {"diversity", r.diversity},
                                 {"classification", r.classification},
                                 {"measures", measures}}));
  } else {
    std::ostringstream csv;
    csv << "schema_version,n,diversity,classification,measure,value,degenerate\n";
    for (const auto& m : r.measures)
      csv << kSchemaVersion << ',' << r.n << ',' << r.diversity << ',' << r.classification << ',' << m.name << ','
          << num(m.value) << ',' << (m.degenerate ? 1 : 0) << '\n';
    o.add("entangle.csv", csv.str());
  }
  o.flush(opts, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

int cmd_selftest(const RunOptions& opts, std::ostream& out, std::ostream&) {
  int failures = 0;
  const auto check = [&](const std::string& name, double value, double target, double tol) {
    const double e = std::abs(value - target);
    const bool ok = e <= tol;
    if (!ok) ++failures;
    out << (ok ? "PASS " : "FAIL ") << name << " value=" << num(value) << " target=" << num(target)
        << " err=" << num(e) << '\n';
  };

  check("bell_concurrence", concurrence_two(StarSet({Direction::north(), Direction::south()})), 1.0, 1e-12);

  const StarSet ghz({Direction(kPi / 2, 0.0), Direction(kPi / 2, kTwoPi / 3), Direction(kPi / 2, 2 * kTwoPi / 3)});
  check("ghz_three_tangle", three_tangle(ghz), 1.0, 1e-12);

  std::mt19937_64 rng(opts.seed.value_or(7));
  std::normal_distribution<double> g;
  Eigen::VectorXcd amps(7);
  for (Eigen::Index k = 0; k < amps.size(); ++k) amps[k] = cplx(g(rng), g(rng));
  const SpinState s = SpinState(amps).normalized();
  check("round_trip_fidelity", fidelity(s, state_from_stars(find_stars(s))), 1.0, 1e-8);

  const std::size_t steps = opts.steps.value_or(2000);
  const double theta0 = kPi / 3;
  const auto schedule = latitude_schedule(theta0, 0.0, kTwoPi, steps);
  std::vector<Direction> base{Direction::north(), Direction::north(), Direction::north(), Direction::south()};
  LoopTrajectory loop = LoopTrajectory::from_star_sets(rigid_rotation_samples(StarSet(base), schedule));
  loop.assume_matched();
  const double omega = kTwoPi * (1 - std::cos(theta0));
  check("dicke_loop_phase", std::abs(wrap_pi(berry_phase(loop, false).gamma_total + 1.0 * omega)), 0.0, 1e-5);

  const SweepRow row = sweep_row(3, ControlLoop::latitude(theta0, steps), 1, 0.3);
  check("boson_formula_vs_oracle", std::abs(wrap_pi(row.gamma_formula - row.gamma_oracle)), 0.0, 1e-3);

  out << (failures == 0 ? "selftest: all checks passed\n" : "selftest: failures\n");
  return failures == 0 ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

int run_command(const std::string& name, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::function<int(const RunOptions&, std::ostream&, std::ostream&)>> table = {
      {"stars", cmd_stars},        {"state", cmd_state},       {"norm", cmd_norm},
      {"berry", cmd_berry},        {"boson-sweep", cmd_boson_sweep}, {"entangle", cmd_entangle},
      {"selftest", cmd_selftest}};
  const auto it = table.find(name);
  if (it == table.end()) {
    err << "error: unknown command '" << name << "'\n";
    return kExitInput;
  }
  try {
    opts.validate();
    return it->second(opts, out, err);
  } catch (const Discontinuity& e) {
    err << "error: " << e.what() << " (step " << e.step() << ")\n";
    return kExitNumerical;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ResourceLimit& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Majorana star representation: stars, normalization, Berry phases, entanglement"};
  app.require_subcommand(1);

  RunOptions opts;
  std::string config, outdir;
  std::size_t steps = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  auto* o_config = app.add_option("--config", config, "JSON config or state file");
  auto* o_out = app.add_option("--out", outdir, "output directory (default: stdout)");
  auto* o_steps = app.add_option("--steps", steps, "loop sample count N");
  auto* o_tol = app.add_option("--tol", tol, "root-finding tolerance");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  app.add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"stars", "state file -> star list"},
      {"state", "star list -> state file"},
      {"norm", "normalization and correlation factors"},
      {"berry", "Berry phase of a closed star loop"},
      {"boson-sweep", "two-mode boson Berry phase versus lambda/R"},
      {"entangle", "star-geometry entanglement measures"},
      {"selftest", "quick internal consistency checks"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  if (o_config->count()) opts.config = config;
  if (o_out->count()) opts.out = outdir;
  if (o_steps->count()) opts.steps = steps;
  if (o_tol->count()) opts.tol = tol;
  if (o_seed->count()) opts.seed = seed;
  return run_command(app.get_subcommands().front()->get_name(), opts, out, err);
}

}  // namespace majorana::cli
