// Core value types shared by every module: points on the unit sphere,
// amplitude vectors over the Dicke basis, star constellations, and the
// error hierarchy.
#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace majorana {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical kernel failed; carries the offending residuals.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, std::vector<double> residuals = {})
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Loop continuity broken between two consecutive samples.
class Discontinuity : public Error {
 public:
  Discontinuity(const std::string& what, std::size_t step) : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Request exceeds a documented size limit.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Pair solid angle requested for coincident stars.
class DegeneratePair : public Error {
 public:
  using Error::Error;
};

/// Operation called on an object in the wrong state (e.g. unmatched loop).
class InvalidState : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Direction
// ---------------------------------------------------------------------------

/// A point on the unit sphere. theta in [0, pi], phi canonical in [0, 2pi);
/// phi is forced to 0 at either pole.
class Direction {
 public:
  Direction() = default;
  Direction(double theta, double phi);

  static Direction from_cartesian(const Vec3& v);
  static Direction north() { return Direction(0.0, 0.0); }
  static Direction south() { return Direction(kPi, 0.0); }

  double theta() const { return theta_; }
  double phi() const { return phi_; }
  const Vec3& cartesian() const { return xyz_; }

  /// Point reflected through the origin.
  Direction antipode() const { return from_cartesian(-xyz_); }

  /// Great-circle angle to another direction.
  double angle_to(const Direction& other) const;

 private:
  double theta_ = 0.0;
  double phi_ = 0.0;
  Vec3 xyz_ = Vec3(0.0, 0.0, 1.0);
};

/// Wraps an angle into (-pi, pi].
double wrap_pi(double angle);
/// Wraps an angle into [0, 2pi).
double wrap_two_pi(double angle);

// ---------------------------------------------------------------------------
// SpinState
// ---------------------------------------------------------------------------

/// Amplitudes C_m over |J, m>, stored low-to-high by index J + m, so
/// amplitudes[k] multiplies |k bosons in mode a, n - k in mode b>.
struct SpinState {
  Eigen::VectorXcd amplitudes;

  SpinState() = default;
  explicit SpinState(Eigen::VectorXcd amps) : amplitudes(std::move(amps)) {}
  SpinState(std::initializer_list<cplx> amps);

  /// Particle number n = 2J.
  int n() const { return static_cast<int>(amplitudes.size()) - 1; }
  double norm() const { return amplitudes.norm(); }
  bool is_zero() const { return amplitudes.size() == 0 || amplitudes.cwiseAbs().maxCoeff() == 0.0; }
  SpinState normalized() const;

  /// Amplitude C_m for magnetic number m = two_m / 2.
  cplx amplitude_for(int two_m) const;
};

/// <a|b>; both states must share n.
cplx inner(const SpinState& a, const SpinState& b);
/// |<a|b>| / (|a||b|).
double fidelity(const SpinState& a, const SpinState& b);

// ---------------------------------------------------------------------------
// StarSet
// ---------------------------------------------------------------------------

struct StarSet {
  std::vector<Direction> stars;
  /// Stars produced by degree deficiency of the Majorana polynomial
  /// (placed at the south pole).
  int infinity_count = 0;
  /// Relative polynomial residual of each finite root (empty when the set
  /// was not produced by root finding).
  std::vector<double> residuals;

  StarSet() = default;
  explicit StarSet(std::vector<Direction> s) : stars(std::move(s)) {}

  std::size_t size() const { return stars.size(); }
  const Direction& operator[](std::size_t i) const { return stars[i]; }
  std::vector<Vec3> cartesian() const;
};

}  // namespace majorana
