// Config and input-file parsing for the command-line tool.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "majorana/berry.hpp"
#include "majorana/boson.hpp"
#include "majorana/types.hpp"

namespace majorana::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitEmpty = 4;

/// Bad config or input file; the message carries line/column when known.
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Flags shared by every subcommand.
struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;  ///< empty: print to stdout
  std::optional<std::size_t> steps;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";

  double tol_or(double fallback) const { return tol.value_or(fallback); }
  /// Throws ConfigError on inconsistent values (tol <= 0, N < 16, unknown format).
  void validate() const;
};

/// Reads and parses a JSON file, reporting syntax errors with line/column.
json load_json(const std::filesystem::path& path);
json parse_json_text(const std::string& text, const std::string& origin);

/// {n, amplitudes: [[re, im], ...]}; n may be omitted.
SpinState parse_state(const json& j);
json state_to_json(const SpinState& s);

/// [[theta, phi], ...] or [{theta, phi}, ...].
std::vector<Direction> parse_directions(const json& j);

/// {n_steps, theta, phi_start, phi_end} or {theta: [...], phi: [...]}.
/// `steps` (from --steps) overrides n_steps.
ControlLoop parse_loop(const json& j, std::optional<std::size_t> steps);

/// Closed star loop described by a berry config; also returns the states
/// when the source provides them (states / boson).
struct BerryInput {
  LoopTrajectory loop;
  std::vector<SpinState> states;
  bool has_states = false;
  double continuity_bound = kDefaultContinuityBound;
  bool trace = false;
};

/// Sources: "rigid" (base constellation carried along a field loop; base is
/// a star list or {n, two_m}), "stars" (explicit samples), "states"
/// (explicit amplitude vectors), "boson" (tracked eigenstate), "random"
/// (smooth random star loops).
BerryInput parse_berry(const json& j, const RunOptions& opts);

struct SweepConfig {
  int n = 2;
  int level = 0;
  double R = 1.0;
  std::vector<double> lambda_over_R;
  ControlLoop loop;
  SweepOptions options;
};

/// {n, level, R, lambdas: [...] | {start, stop, step}, loop: {...},
///  continuity, parallel}.
SweepConfig parse_sweep(const json& j, const RunOptions& opts);

}  // namespace majorana::cli
