#include "majorana/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "majorana/stellar.hpp"

namespace majorana::cli {

namespace {

constexpr std::size_t kDefaultSteps = 2000;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("field '") + key + "'", e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail("config", std::string("missing field '") + key + "'");
  return get_or<T>(j, key, T{});
}

double as_double(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

}  // namespace

void RunOptions::validate() const {
  if (tol && !(*tol > 0.0)) throw ConfigError("--tol must be positive");
  if (steps && *steps < 16) throw ConfigError("--steps must be at least 16");
  if (format != "csv" && format != "json") throw ConfigError("--format must be csv or json");
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line/column.
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": JSON syntax error (" << e.what() << ")";
    throw ConfigError(os.str());
  }
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

SpinState parse_state(const json& j) {
  if (!j.is_object()) fail("state", "expected an object");
  if (!j.contains("amplitudes") || !j["amplitudes"].is_array()) fail("state", "missing array 'amplitudes'");
  const json& a = j["amplitudes"];
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) {
    const json& e = a[k];
    const std::string where = "amplitudes[" + std::to_string(k) + "]";
    if (e.is_number()) {
      amps[static_cast<Eigen::Index>(k)] = e.get<double>();
    } else if (e.is_array() && e.size() == 2) {
      amps[static_cast<Eigen::Index>(k)] = cplx(as_double(e[0], where), as_double(e[1], where));
    } else {
      fail(where, "expected [re, im]");
    }
  }
  SpinState s(amps);
  if (j.contains("n") && get_or<int>(j, "n", -1) != s.n())
    fail("state", "n does not match the number of amplitudes (expected n + 1)");
  if (s.n() < 1) fail("state", "need at least two amplitudes");
  if (s.is_zero()) fail("state", "all amplitudes are zero");
  return s;
}

json state_to_json(const SpinState& s) {
  json amps = json::array();
  for (Eigen::Index k = 0; k < s.amplitudes.size(); ++k)
    amps.push_back({s.amplitudes[k].real(), s.amplitudes[k].imag()});
  return json{{"n", s.n()}, {"amplitudes", amps}};
}

std::vector<Direction> parse_directions(const json& j) {
  if (!j.is_array()) fail("stars", "expected an array");
  std::vector<Direction> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const json& e = j[k];
    const std::string where = "stars[" + std::to_string(k) + "]";
    if (e.is_array() && e.size() == 2) {
      out.emplace_back(as_double(e[0], where), as_double(e[1], where));
    } else if (e.is_object() && e.contains("theta") && e.contains("phi")) {
      out.emplace_back(as_double(e["theta"], where), as_double(e["phi"], where));
    } else {
      fail(where, "expected [theta, phi]");
    }
  }
  return out;
}

ControlLoop parse_loop(const json& j, std::optional<std::size_t> steps) {
  if (!j.is_object()) fail("loop", "expected an object");
  ControlLoop loop;
  if (j.contains("theta") && j["theta"].is_array()) {
    const json& th = j["theta"];
    const json& ph = j.contains("phi") ? j["phi"] : json();
    if (!ph.is_array() || ph.size() != th.size()) fail("loop", "theta and phi arrays must have equal length");
    for (std::size_t k = 0; k < th.size(); ++k)
      loop.schedule.emplace_back(as_double(th[k], "loop.theta"), as_double(ph[k], "loop.phi"));
  } else {
    const std::size_t n = steps.value_or(get_or<std::size_t>(j, "n_steps", kDefaultSteps));
    const double theta = require<double>(j, "theta");
    const double p0 = get_or<double>(j, "phi_start", 0.0);
    const double p1 = get_or<double>(j, "phi_end", kTwoPi);
    if (n < 16) fail("loop", "n_steps must be at least 16");
    for (std::size_t t = 0; t <= n; ++t)
      loop.schedule.emplace_back(theta, p0 + (p1 - p0) * static_cast<double>(t) / static_cast<double>(n));
  }
  try {
    loop.validate();
  } catch (const InvalidInput& e) {
    fail("loop", e.what());
  }
  return loop;
}

BerryInput parse_berry(const json& j, const RunOptions& opts) {
  if (!j.is_object()) fail("berry config", "expected an object");
  const std::string source = require<std::string>(j, "source");
  BerryInput in;
  in.continuity_bound = get_or<double>(j, "continuity_bound", kDefaultContinuityBound);
  in.trace = get_or<bool>(j, "trace", false);
  const double tol = opts.tol_or(1e-10);

  if (source == "rigid") {
    std::vector<Direction> base;
    const json& b = j.contains("base") ? j["base"] : json();
    if (b.is_object()) {
      // J + m stars at the pole and J - m at the antipode.
      const int n = require<int>(b, "n");
      const int two_m = require<int>(b, "two_m");
      if (n < 1 || std::abs(two_m) > n || (n + two_m) % 2 != 0) fail("base", "need n >= 1 and two_m in {-n, -n+2, .., n}");
      base.assign(static_cast<std::size_t>((n + two_m) / 2), Direction::north());
      base.insert(base.end(), static_cast<std::size_t>((n - two_m) / 2), Direction::south());
    } else {
      base = parse_directions(b);
    }
    if (base.empty()) fail("base", "empty constellation");
    if (!j.contains("loop")) fail("berry config", "missing field 'loop'");
    const std::vector<Direction> schedule = parse_loop(j["loop"], opts.steps).field_directions();
    in.loop = LoopTrajectory::from_star_sets(rigid_rotation_samples(StarSet(base), schedule));
    // Identities are known from the construction.
    in.loop.assume_matched(in.continuity_bound);
    return in;
  }
  if (source == "stars") {
    const json& s = j.contains("samples") ? j["samples"] : json();
    if (!s.is_array()) fail("berry config", "missing array 'samples'");
    std::vector<StarSet> samples;
    for (const json& e : s) samples.emplace_back(parse_directions(e));
    in.loop = LoopTrajectory::from_star_sets(std::move(samples));
  } else if (source == "states") {
    const json& s = j.contains("states") ? j["states"] : json();
    if (!s.is_array()) fail("berry config", "missing array 'states'");
    for (const json& e : s) in.states.push_back(parse_state(e));
    in.has_states = true;
    in.loop = LoopTrajectory::from_states(in.states, tol);
  } else if (source == "boson") {
    const int n = require<int>(j, "n");
    const int level = get_or<int>(j, "level", 0);
    const double R = get_or<double>(j, "R", 1.0);
    const double lam = get_or<double>(j, "lambda_over_R", 0.0) * R;
    const json loop_cfg = j.contains("loop") ? j["loop"] : json{{"theta", kPi / 3.0}};
    const ControlLoop loop = parse_loop(loop_cfg, opts.steps);
    const EigenTrack track = eigensystem_track(n, R, lam, loop, level, get_or<double>(j, "continuity", kDefaultTrackingContinuity));
    in.states = track.states;
    in.has_states = true;
    in.loop = LoopTrajectory::from_states(in.states, tol);
  } else if (source == "random") {
    const int n = require<int>(j, "n");
    const std::uint64_t seed = opts.seed.value_or(get_or<std::uint64_t>(j, "seed", 1));
    const std::size_t steps = opts.steps.value_or(get_or<std::size_t>(j, "n_steps", kDefaultSteps));
    const double amp = get_or<double>(j, "amplitude", 0.5);
    for (StarSet& s : random_smooth_samples(n, steps, seed, amp)) in.states.push_back(state_from_stars(s));
    in.has_states = true;
    in.loop = LoopTrajectory::from_states(in.states, tol);
  } else {
    fail("berry config", "unknown source '" + source + "'");
  }
  in.loop.match(in.continuity_bound);
  return in;
}

SweepConfig parse_sweep(const json& j, const RunOptions& opts) {
  if (!j.is_object()) fail("sweep config", "expected an object");
  SweepConfig c;
  c.n = require<int>(j, "n");
  c.level = get_or<int>(j, "level", 0);
  c.R = get_or<double>(j, "R", 1.0);
  if (c.n < 1) fail("sweep config", "n must be >= 1");
  if (c.level < 0 || c.level > c.n) fail("sweep config", "level must lie in [0, n]");
  if (!(c.R > 0.0)) fail("sweep config", "R must be positive");

  const json lam = j.contains("lambdas") ? j["lambdas"] : json{{"start", 0.0}, {"stop", 0.5}, {"step", 0.05}};
  if (lam.is_array()) {
    for (const json& v : lam) c.lambda_over_R.push_back(as_double(v, "lambdas"));
  } else if (lam.is_object()) {
    const double start = require<double>(lam, "start");
    const double stop = require<double>(lam, "stop");
    const double step = require<double>(lam, "step");
    if (!(step > 0.0) || stop < start) fail("lambdas", "need step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) c.lambda_over_R.push_back(start + step * static_cast<double>(k));
  } else {
    fail("lambdas", "expected an array or {start, stop, step}");
  }
  if (c.lambda_over_R.empty()) fail("lambdas", "empty grid");

  const json loop_cfg = j.contains("loop") ? j["loop"] : json{{"theta", kPi / 3.0}};
  c.loop = parse_loop(loop_cfg, opts.steps);
  c.options.R = c.R;
  c.options.continuity = get_or<double>(j, "continuity", kDefaultTrackingContinuity);
  c.options.star_tol = opts.tol_or(get_or<double>(j, "tol", 1e-10));
  c.options.continuity_bound = get_or<double>(j, "continuity_bound", kDefaultContinuityBound);
  c.options.parallel = get_or<bool>(j, "parallel", true);
  return c;
}

}  // namespace majorana::cli
