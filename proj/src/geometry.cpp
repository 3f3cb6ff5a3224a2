#include "majorana/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace majorana {

SphericalStep::SphericalStep(const Direction& from, const Direction& to)
    : prev(from), next(to), dtheta(to.theta() - from.theta()), dphi(wrap_pi(to.phi() - from.phi())) {}

double diagonal_connection_increment(const SphericalStep& step) {
  return 0.5 * (1.0 - std::cos(step.theta_mid())) * step.dphi;
}

double path_solid_angle(std::span<const Direction> path) {
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < path.size(); ++t) {
    const SphericalStep step(path[t], path[t + 1]);
    total += (1.0 - std::cos(step.theta_mid())) * step.dphi;
  }
  return total;
}

double loop_solid_angle(std::span<const Direction> path) {
  if (path.size() < 3) throw InvalidInput("loop_solid_angle: a closed path needs at least three samples");
  double total = path_solid_angle(path);
  const Direction& first = path.front();
  const Direction& last = path.back();
  if (first.angle_to(last) > 0.0) {
    const SphericalStep closing(last, first);
    total += (1.0 - std::cos(closing.theta_mid())) * closing.dphi;
  }
  return total;
}

double pair_solid_angle_increment(const Vec3& ui, const Vec3& uj, const Vec3& dui, const Vec3& duj) {
  const double d = 1.0 - ui.dot(uj);
  if (d <= kDegenerateDistance) throw DegeneratePair("pair_solid_angle_increment: coincident stars");
  return ui.cross(uj).dot(duj - dui) / d;
}

double relative_azimuth_increment(const Direction& ui, const Direction& uj, double dtheta_i, double dphi_i,
                                  double dtheta_j, double dphi_j) {
  const double ti = ui.theta(), tj = uj.theta();
  const double cos_tp = std::cos(ti) * std::cos(tj) + std::sin(ti) * std::sin(tj) * std::cos(ui.phi() - uj.phi());
  const double denom = 1.0 - cos_tp;
  if (denom <= kDegenerateDistance) throw DegeneratePair("relative_azimuth_increment: coincident stars");
  const double num = (std::cos(ti) - std::cos(tj)) * (dphi_j - dphi_i) +
                     (std::sin(ti) * dtheta_j - std::sin(tj) * dtheta_i) * std::sin(ui.phi() - uj.phi());
  return num / denom;
}

double pair_solid_angle_increment_spherical(const Direction& ui, const Direction& uj, double dtheta_i,
                                            double dphi_i, double dtheta_j, double dphi_j) {
  return relative_azimuth_increment(ui, uj, dtheta_i, dphi_i, dtheta_j, dphi_j) + std::cos(ui.theta()) * dphi_i +
         std::cos(uj.theta()) * dphi_j;
}

double pair_solid_angle_increment_spherical(const Direction& ui, const Direction& uj, const SphericalStep& step_i,
                                            const SphericalStep& step_j) {
  return pair_solid_angle_increment_spherical(ui, uj, step_i.dtheta, step_i.dphi, step_j.dtheta, step_j.dphi);
}

Eigen::Matrix3d rotation_to_pole(const Direction& u) {
  const double ct = std::cos(u.theta()), st = std::sin(u.theta());
  const double cp = std::cos(u.phi()), sp = std::sin(u.phi());
  Eigen::Matrix3d ry;
  ry << ct, 0.0, -st,  //
      0.0, 1.0, 0.0,   //
      st, 0.0, ct;
  Eigen::Matrix3d rz;
  rz << cp, sp, 0.0,  //
      -sp, cp, 0.0,   //
      0.0, 0.0, 1.0;
  return ry * rz;
}

RelativeFrame relative_coordinates(const Direction& anchor, const Direction& companion) {
  const double ti = anchor.theta(), tj = companion.theta();
  const double dphi = anchor.phi() - companion.phi();
  const double x = -std::cos(tj) * std::sin(ti) + std::sin(tj) * std::cos(ti) * std::cos(dphi);
  const double y = -std::sin(tj) * std::sin(dphi);
  const double cos_tp = std::cos(ti) * std::cos(tj) + std::sin(ti) * std::sin(tj) * std::cos(dphi);

  RelativeFrame f;
  f.theta_prime = std::acos(std::clamp(cos_tp, -1.0, 1.0));
  if (std::hypot(x, y) <= kRelativeFrameTol) {
    if (cos_tp > 0.0) {
      f.degenerate = true;
      f.theta_prime = 0.0;
    } else {
      f.antipodal = true;
      f.theta_prime = kPi;
    }
    f.phi_prime = 0.0;
  } else {
    f.phi_prime = std::atan2(y, x);
  }
  return f;
}

double weighted_pair_increment(const Vec3& ui, const Vec3& uj, const Vec3& dui, const Vec3& duj,
                               double beta_over_d) {
  return beta_over_d * ui.cross(uj).dot(duj - dui);
}

}  // namespace majorana
