// Berry phases of closed star loops: per-star solid angles, weighted pair
// (correlation) terms, their relative/absolute split, the rigid-body pair
// angles, and the discrete overlap-product phase used as an oracle.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "majorana/types.hpp"

namespace majorana {

/// Default bound on the largest single-star chordal displacement per step.
inline constexpr double kDefaultContinuityBound = 0.2;

/// Optimal assignment between two constellations of equal size: returns p
/// with next[p[i]] the partner of prev[i], minimizing the total chordal
/// distance. Among optimal assignments the lexicographically smallest
/// permutation is preferred. Throws Discontinuity (carrying `step`) when a
/// matched pair moves farther than `bound`.
std::vector<int> match_stars(const StarSet& prev, const StarSet& next, double bound = kDefaultContinuityBound,
                             std::size_t step = 0);

/// Time-ordered closed sequence of constellations. Samples run from t = 0
/// to t = N; the last multiset must coincide with the first up to a
/// relabeling (stars may exchange places around the loop).
class LoopTrajectory {
 public:
  LoopTrajectory() = default;

  /// Samples in their given labeling; call match() before evaluating.
  static LoopTrajectory from_star_sets(std::vector<StarSet> samples);
  /// Stars extracted with find_stars; the states are kept for the oracle.
  static LoopTrajectory from_states(std::vector<SpinState> states, double tol = 1e-10);

  /// Aligns star identities across steps and determines the closing
  /// permutation. Throws Discontinuity naming the offending step.
  void match(double continuity_bound = kDefaultContinuityBound);
  /// Declares the given labeling consistent (for loops generated with known
  /// identities); still computes the closing permutation.
  void assume_matched(double continuity_bound = kDefaultContinuityBound);

  bool matched() const { return matched_; }
  int n() const;
  std::size_t steps() const { return samples_.empty() ? 0 : samples_.size() - 1; }
  const std::vector<StarSet>& samples() const { return samples_; }
  const std::vector<SpinState>& states() const { return states_; }
  /// closing()[i]: label at t = 0 of the star that star i reaches at t = N.
  const std::vector<int>& closing() const { return closing_; }

  /// Positions of star i from t = 0 to t = N.
  std::vector<Direction> star_path(int i) const;
  /// Same loop traversed backwards (unmatched).
  LoopTrajectory reversed() const;

 private:
  std::vector<StarSet> samples_;
  std::vector<SpinState> states_;
  std::vector<int> closing_;
  bool matched_ = false;
};

struct PairPhase {
  int i = 0;
  int j = 0;
  double gamma_c = 0.0;
  double gamma_r = 0.0;
  double gamma_a = 0.0;
  bool excluded = false;  ///< coincident at some step; no relative/absolute split
};

struct SolidAnglePhase {
  double gamma = 0.0;                ///< -(1/2) sum_i Omega_i
  std::vector<double> solid_angles;  ///< Omega_i, accumulated
};

struct CorrelationPhase {
  double gamma = 0.0;
  std::vector<PairPhase> pairs;  ///< only gamma_c filled
};

struct RelativeAbsoluteSplit {
  double gamma_r = 0.0;
  double gamma_a = 0.0;
  std::vector<PairPhase> pairs;  ///< gamma_r / gamma_a filled
  std::vector<std::pair<int, int>> excluded;
};

struct PhaseBreakdown {
  double gamma_total = 0.0;
  double gamma_0 = 0.0;
  double gamma_c = 0.0;
  double gamma_r = 0.0;
  double gamma_a = 0.0;
  bool split_computed = false;

  // Representatives in (-pi, pi].
  double gamma_total_mod = 0.0;
  double gamma_0_mod = 0.0;
  double gamma_c_mod = 0.0;

  std::vector<double> per_star_solid_angles;
  std::vector<PairPhase> per_pair;
  std::vector<std::pair<int, int>> excluded_pairs;
};

SolidAnglePhase gamma_zero(const LoopTrajectory& loop);
CorrelationPhase gamma_correlation(const LoopTrajectory& loop);
RelativeAbsoluteSplit gamma_relative_absolute(const LoopTrajectory& loop);

/// gamma_0 + gamma_C, with the relative/absolute split when requested.
PhaseBreakdown berry_phase(const LoopTrajectory& loop, bool with_split = true);

struct RigidPairReport {
  double value = 0.0;           ///< accumulated Omega(u_ij) from the vector form
  double relative_sum = 0.0;    ///< sum of dphi'_{i(j)} + dphi'_{j(i)}
  double absolute_sum = 0.0;    ///< sum of cos(theta_i) dphi_i + cos(theta_j) dphi_j
  double omega_i = 0.0;         ///< accumulated solid angle of star i
  double omega_j = 0.0;
  double relative_solid_angles = 0.0;  ///< Omega'_{i(j)} + Omega'_{j(i)} = (1 - cos t') relative_sum
  double residual_decomposition = 0.0; ///< value - (relative_sum + absolute_sum)
  double residual_minus = 0.0;  ///< value vs form with 1 - u_i.u_j, mod 2pi
  double residual_plus = 0.0;   ///< value vs form with 1 + u_i.u_j, mod 2pi (NaN for antipodal pairs)
};

/// Pair solid angle of a rigidly moving pair and its decomposition into
/// relative and absolute solid angles. Throws InvalidState unless d_ij stays
/// within 1e-8 of its initial value.
RigidPairReport rigid_body_pair_angle(const LoopTrajectory& loop, int i, int j);

/// Discrete overlap-product phase arg prod_t <psi_{t+1}|psi_t> around the
/// closed chain (the wrap-around overlap is always included), in (-pi, pi].
/// Gauge invariant. Throws Discontinuity when a normalized overlap drops
/// below 1e-6.
double berry_phase_oracle(std::span<const SpinState> states);

/// Constellation `base` rigidly carried along the schedule: sample t is
/// base rotated by the rotation that takes the north pole to schedule[t]
/// (theta about y, then phi about z).
std::vector<StarSet> rigid_rotation_samples(const StarSet& base, std::span<const Direction> schedule);

/// Closed latitude schedule at colatitude theta, phi running over
/// [phi_start, phi_end] in `steps` uniform steps (steps + 1 samples).
std::vector<Direction> latitude_schedule(double theta, double phi_start, double phi_end, std::size_t steps);

/// n stars on smooth random closed paths (two Fourier harmonics around a
/// random center), steps + 1 samples with sample N equal to sample 0.
std::vector<StarSet> random_smooth_samples(int n, std::size_t steps, std::uint64_t seed, double amplitude = 0.5);

}  // namespace majorana
