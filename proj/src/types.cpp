#include "majorana/types.hpp"

#include <algorithm>
#include <cmath>

namespace majorana {

namespace {
constexpr double kPoleEps = 1e-15;
}

double wrap_pi(double angle) {
  double r = std::remainder(angle, kTwoPi);  // in [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

Direction::Direction(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) throw InvalidInput("Direction: non-finite angle");
  // Fold theta into [0, pi] (theta outside the range reflects through the pole).
  double t = wrap_two_pi(theta);
  double p = phi;
  if (t > kPi) {
    t = kTwoPi - t;
    p += kPi;
  }
  theta_ = t;
  phi_ = (t < kPoleEps || kPi - t < kPoleEps) ? 0.0 : wrap_two_pi(p);
  if (t < kPoleEps) theta_ = 0.0;
  if (kPi - t < kPoleEps) theta_ = kPi;
  const double st = std::sin(theta_);
  xyz_ = Vec3(st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_));
}

Direction Direction::from_cartesian(const Vec3& v) {
  const double r = v.norm();
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("Direction: zero or non-finite vector");
  const Vec3 u = v / r;
  const double rho = std::hypot(u.x(), u.y());
  Direction d(std::atan2(rho, u.z()), rho > 0.0 ? std::atan2(u.y(), u.x()) : 0.0);
  return d;
}

double Direction::angle_to(const Direction& other) const {
  // atan2 form stays accurate for nearly coincident and nearly antipodal points.
  return std::atan2(xyz_.cross(other.xyz_).norm(), xyz_.dot(other.xyz_));
}

SpinState::SpinState(std::initializer_list<cplx> amps) : amplitudes(static_cast<Eigen::Index>(amps.size())) {
  Eigen::Index k = 0;
  for (const cplx& a : amps) amplitudes[k++] = a;
}

SpinState SpinState::normalized() const {
  if (is_zero()) throw InvalidInput("SpinState: cannot normalize the zero vector");
  return SpinState(amplitudes / amplitudes.norm());
}

cplx SpinState::amplitude_for(int two_m) const {
  const int k = (two_m + n()) / 2;
  if ((two_m + n()) % 2 != 0 || k < 0 || k > n()) throw InvalidInput("SpinState: magnetic number out of range");
  return amplitudes[k];
}

cplx inner(const SpinState& a, const SpinState& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) throw InvalidInput("inner: dimension mismatch");
  return a.amplitudes.dot(b.amplitudes);  // Eigen's dot conjugates the left operand
}

double fidelity(const SpinState& a, const SpinState& b) {
  return std::abs(inner(a, b)) / (a.norm() * b.norm());
}

std::vector<Vec3> StarSet::cartesian() const {
  std::vector<Vec3> out;
  out.reserve(stars.size());
  for (const auto& s : stars) out.push_back(s.cartesian());
  return out;
}

}  // namespace majorana
