// Spherical geometry kernel: single-star connection increments and loop
// solid angles, pair solid-angle increments (vector and spherical forms),
// and the rotate-to-pole relative frames.
#pragma once

#include <span>

#include "majorana/types.hpp"

namespace majorana {

/// One discretized step of a star. dphi is unwrapped into (-pi, pi].
struct SphericalStep {
  Direction prev;
  Direction next;
  double dtheta = 0.0;
  double dphi = 0.0;

  SphericalStep() = default;
  SphericalStep(const Direction& from, const Direction& to);

  double theta_mid() const { return 0.5 * (prev.theta() + next.theta()); }
  double phi_mid() const { return prev.phi() + 0.5 * dphi; }
};

/// Im<u|du> = ((1 - cos theta_mid)/2) dphi.
double diagonal_connection_increment(const SphericalStep& step);

/// sum over steps of (1 - cos theta_mid) dphi along an open path (no
/// closing step added).
double path_solid_angle(std::span<const Direction> path);

/// Accumulated solid angle of a closed path (closing step added when the
/// last sample differs from the first). Not reduced mod 4pi. Needs at least
/// three samples.
double loop_solid_angle(std::span<const Direction> path);

/// Pairs closer than this in d_ij are treated as coincident.
inline constexpr double kDegenerateDistance = 1e-14;

/// Omega(du_ij) = u_i x u_j . (du_j - du_i) / d_ij. Throws DegeneratePair
/// when d_ij <= kDegenerateDistance.
double pair_solid_angle_increment(const Vec3& ui, const Vec3& uj, const Vec3& dui, const Vec3& duj);

/// Spherical-coordinate form of the same increment, evaluated at the given
/// positions with the given coordinate steps:
///   [(cos ti - cos tj)(dpj - dpi) + (sin ti dtj - sin tj dti) sin(pi - pj)] / (1 - cos t')
///   + cos ti dpi + cos tj dpj.
/// Throws DegeneratePair when t' == 0.
double pair_solid_angle_increment_spherical(const Direction& ui, const Direction& uj, double dtheta_i,
                                            double dphi_i, double dtheta_j, double dphi_j);
double pair_solid_angle_increment_spherical(const Direction& ui, const Direction& uj, const SphericalStep& step_i,
                                            const SphericalStep& step_j);

/// Only the relative-motion part of the spherical form (the fraction),
/// i.e. dphi'_{i(j)} + dphi'_{j(i)}.
double relative_azimuth_increment(const Direction& ui, const Direction& uj, double dtheta_i, double dphi_i,
                                  double dtheta_j, double dphi_j);

/// Rotation R_y(theta) R_z(phi) (in the form with +sin in the lower-left
/// of R_y and +sin in the upper-right of R_z) that carries u to the north
/// pole.
Eigen::Matrix3d rotation_to_pole(const Direction& u);

/// Companion star seen from the frame where the anchor sits at the pole.
struct RelativeFrame {
  double theta_prime = 0.0;
  double phi_prime = 0.0;
  bool degenerate = false;  ///< coincident stars; phi_prime forced to 0
  bool antipodal = false;   ///< companion at the anchor's antipode; phi_prime forced to 0
};

/// Tolerance on theta' for the degenerate/antipodal flags.
inline constexpr double kRelativeFrameTol = 1e-12;

RelativeFrame relative_coordinates(const Direction& anchor, const Direction& companion);

/// beta_over_d * [u_i x u_j . (du_j - du_i)]; finite for coincident stars.
double weighted_pair_increment(const Vec3& ui, const Vec3& uj, const Vec3& dui, const Vec3& duj,
                               double beta_over_d);

}  // namespace majorana
