// Two-mode interacting boson benchmark: Hamiltonian, adiabatic eigenstate
// tracking along a control loop, and the Berry phase sweep over lambda/R.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "majorana/berry.hpp"
#include "majorana/types.hpp"

namespace majorana {

struct BosonParams {
  int n = 1;
  double R = 1.0;
  double theta = 0.0;
  double varphi = 0.0;
  double lambda = 0.0;
};

/// Fock-basis matrix over |k, n-k> (k bosons in mode a):
///   <k|H|k>     = (R cos(theta)/4)(2k - n) + (lambda/4)(2k - n)^2
///   <k+1|H|k>   = (R sin(theta)/4) e^{-i varphi} sqrt((k+1)(n-k))
/// i.e. H = (R/2) B.J + lambda J_z^2 with B = (sin cos, sin sin, cos).
/// Throws InvalidInput unless n >= 1 and R > 0.
Eigen::MatrixXcd build_hamiltonian(const BosonParams& p);

/// Closed schedule of field angles (theta, varphi); sample N repeats
/// sample 0 (varphi may differ by multiples of 2pi).
struct ControlLoop {
  std::vector<std::pair<double, double>> schedule;

  /// theta fixed, varphi from 0 to 2pi in `steps` uniform steps.
  static ControlLoop latitude(double theta, std::size_t steps = 2000);

  std::size_t steps() const { return schedule.empty() ? 0 : schedule.size() - 1; }
  std::vector<Direction> field_directions() const;
  /// Throws InvalidInput unless the loop has at least three samples and
  /// closes within 1e-12.
  void validate() const;
};

/// Minimum acceptable |<psi_t|psi_{t+1}>| while tracking.
inline constexpr double kDefaultTrackingContinuity = 0.9;

struct EigenTrack {
  int level = 0;  ///< 0-based energy order at t = 0
  std::vector<SpinState> states;
  std::vector<double> energies;
  double min_gap = 0.0;  ///< smallest distance to a neighboring level
  std::vector<std::string> warnings;
};

/// Diagonalizes H along the loop and follows one eigenstate by maximal
/// overlap. Each state is rephased so its overlap with the previous one is
/// real and positive. Throws Discontinuity (with the step) when the best
/// overlap drops below `continuity`.
EigenTrack eigensystem_track(int n, double R, double lambda, const ControlLoop& loop, int level,
                             double continuity = kDefaultTrackingContinuity);

struct SweepRow {
  double lambda_over_R = 0.0;
  double gamma_formula = 0.0;  ///< gamma_0 + gamma_C, in (-pi, pi]
  double gamma_oracle = 0.0;   ///< overlap-product phase, in (-pi, pi]
  double gamma0 = 0.0;
  double gammaC = 0.0;
  double gammaR = 0.0;
  double gammaA = 0.0;
  double min_gap = 0.0;
  bool valid = false;
  int level = 0;        ///< 0-based energy order
  double m_u = 0.0;     ///< magnetic number along the field, level - n/2
  std::string error;    ///< reason when invalid
};

struct SweepOptions {
  double R = 1.0;
  double continuity = kDefaultTrackingContinuity;
  double star_tol = 1e-10;
  double continuity_bound = kDefaultContinuityBound;
  bool parallel = true;
};

/// One row per entry of `lambda_over_R`, in input order. Rows that fail
/// (tracking, matching, degeneracy with min_gap < 1e-8 R) are marked
/// invalid instead of aborting the sweep.
std::vector<SweepRow> sweep_lambda(int n, const ControlLoop& loop, int level, const std::vector<double>& lambda_over_R,
                                   const SweepOptions& options = {});

/// Single row of the sweep.
SweepRow sweep_row(int n, const ControlLoop& loop, int level, double lambda_over_R, const SweepOptions& options = {});

/// (n - 2m) Omega_u with Omega_u the accumulated solid angle of the field
/// loop.
double lambda_zero_reference(int n, int m, const ControlLoop& loop);

}  // namespace majorana
