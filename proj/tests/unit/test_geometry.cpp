#include <doctest.h>

#include "majorana/berry.hpp"
#include "majorana/geometry.hpp"
#include "test_support.hpp"

using namespace majorana;

namespace {

std::vector<Direction> circle(double theta, std::size_t steps) { return latitude_schedule(theta, 0.0, kTwoPi, steps); }

}  // namespace

TEST_CASE("SphericalStep unwraps the azimuth") {
  const SphericalStep s(Direction(1.0, kTwoPi - 0.1), Direction(1.2, 0.1));
  CHECK(s.dphi == doctest::Approx(0.2));
  CHECK(s.dtheta == doctest::Approx(0.2));
  CHECK(std::abs(s.dphi) <= kPi);
}

TEST_CASE("diagonal_connection_increment") {
  CHECK(diagonal_connection_increment(SphericalStep(Direction(0.5, 1.0), Direction(0.7, 1.0))) == 0.0);
  const double h = 1e-3;
  CHECK(diagonal_connection_increment(SphericalStep(Direction(kPi / 2, 0.0), Direction(kPi / 2, h))) ==
        doctest::Approx(h / 2));
  CHECK(std::abs(diagonal_connection_increment(SphericalStep(Direction(1e-8, 0.0), Direction(1e-8, h)))) < 1e-18);
}

TEST_CASE("loop_solid_angle") {
  for (double th : {0.3, kPi / 3, 1.9}) CHECK(loop_solid_angle(circle(th, 400)) == doctest::Approx(kTwoPi * (1 - std::cos(th))));
  CHECK(loop_solid_angle(circle(kPi / 2, 64)) == doctest::Approx(kTwoPi));
  CHECK(loop_solid_angle(std::vector<Direction>(10, Direction(1.0, 2.0))) == 0.0);
  CHECK_THROWS_AS(loop_solid_angle(std::vector<Direction>(2, Direction())), InvalidInput);

  // Implicit closure: dropping the repeated last sample changes nothing.
  auto open = circle(1.0, 100);
  open.pop_back();
  CHECK(loop_solid_angle(open) == doctest::Approx(kTwoPi * (1 - std::cos(1.0))));

  // Two windings accumulate (not reduced mod 4pi).
  const auto twice = latitude_schedule(2.5, 0.0, 2 * kTwoPi, 800);
  CHECK(loop_solid_angle(twice) == doctest::Approx(2 * kTwoPi * (1 - std::cos(2.5))));

  // Clockwise traversal flips the sign.
  const auto cw = latitude_schedule(1.0, 0.0, -kTwoPi, 200);
  CHECK(loop_solid_angle(cw) == doctest::Approx(-kTwoPi * (1 - std::cos(1.0))));
}

TEST_CASE("solid-angle additivity and rotation invariance") {
  // A spherical rectangle split along a meridian.
  const auto rect = [](double t0, double t1, double p0, double p1, int m) {
    std::vector<Direction> path;
    for (int k = 0; k <= m; ++k) path.emplace_back(t0, p0 + (p1 - p0) * k / m);
    for (int k = 1; k <= m; ++k) path.emplace_back(t0 + (t1 - t0) * k / m, p1);
    for (int k = 1; k <= m; ++k) path.emplace_back(t1, p1 - (p1 - p0) * k / m);
    for (int k = 1; k <= m; ++k) path.emplace_back(t1 - (t1 - t0) * k / m, p0);
    return path;
  };
  const double whole = loop_solid_angle(rect(0.5, 1.5, 0.2, 1.8, 400));
  const double left = loop_solid_angle(rect(0.5, 1.5, 0.2, 1.0, 400));
  const double right = loop_solid_angle(rect(0.5, 1.5, 1.0, 1.8, 400));
  CHECK(whole == doctest::Approx(left + right).epsilon(1e-9));

  // Rigidly rotated small loop (kept away from the poles) keeps its area;
  // the midpoint rule is exact only on latitude circles, hence the fine grid.
  std::mt19937_64 rng(3);
  const auto loop = latitude_schedule(0.2, 0.0, kTwoPi, 40000);
  int checked = 0;
  while (checked < 5) {
    const Eigen::Matrix3d r = fixtures::random_rotation(rng);
    // Keep the rotated cap clear of both poles so it encloses neither.
    const double center_theta = Direction::from_cartesian(r.col(2)).theta();
    if (center_theta < 0.3 || center_theta > kPi - 0.3) continue;
    std::vector<Direction> rotated;
    for (const auto& d : loop) rotated.push_back(Direction::from_cartesian(r * d.cartesian()));
    CHECK(std::abs(loop_solid_angle(rotated) - loop_solid_angle(loop)) < 1e-9);
    ++checked;
  }
}

TEST_CASE("pair_solid_angle_increment") {
  const Vec3 ui = Direction(0.7, 0.3).cartesian(), uj = Direction(2.0, 2.5).cartesian();
  CHECK(pair_solid_angle_increment(ui, uj, Vec3::Zero(), Vec3::Zero()) == 0.0);
  const Vec3 dui(1e-4, -2e-4, 3e-5), duj(-1e-4, 5e-5, 2e-4);
  CHECK(pair_solid_angle_increment(ui, uj, dui, duj) == doctest::Approx(pair_solid_angle_increment(uj, ui, duj, dui)));
  CHECK_THROWS_AS(pair_solid_angle_increment(ui, ui, dui, duj), DegeneratePair);

  // Pole anchor with an equatorial companion moving along the equator.
  const Direction a = Direction::north(), b(kPi / 2, 0.4);
  const double h = 1e-6;
  const Direction b1(kPi / 2, 0.4 + h);
  const double vec = pair_solid_angle_increment(a.cartesian(), b.cartesian(), Vec3::Zero(), b1.cartesian() - b.cartesian());
  const double sph = pair_solid_angle_increment_spherical(a, b, 0.0, 0.0, 0.0, h);
  CHECK(vec == doctest::Approx(sph).epsilon(1e-6));
}

TEST_CASE("vector and spherical forms agree on random small steps") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const Direction a = fixtures::random_direction(rng), b = fixtures::random_direction(rng);
    if (a.theta() < 1e-2 || b.theta() < 1e-2 || a.theta() > kPi - 1e-2 || b.theta() > kPi - 1e-2) continue;
    if (a.angle_to(b) < 1e-2) continue;
    const double h = 1e-5;
    const double dti = h * g(rng), dpi = h * g(rng), dtj = h * g(rng), dpj = h * g(rng);
    const Direction a1(a.theta() + dti, a.phi() + dpi), b1(b.theta() + dtj, b.phi() + dpj);
    const Direction am(a.theta() + dti / 2, a.phi() + dpi / 2), bm(b.theta() + dtj / 2, b.phi() + dpj / 2);
    const Vec3 mi = (a.cartesian() + a1.cartesian()).normalized(), mj = (b.cartesian() + b1.cartesian()).normalized();
    const double vec = pair_solid_angle_increment(mi, mj, a1.cartesian() - a.cartesian(), b1.cartesian() - b.cartesian());
    const double sph = pair_solid_angle_increment_spherical(am, bm, dti, dpi, dtj, dpj);
    CHECK(std::abs(vec - sph) < 1e-9);
    ++checked;
  }
  CHECK(checked > 900);
}

TEST_CASE("spherical form: meridian geometry and static stars") {
  const Direction a(0.6, 1.0), b(2.1, 1.0);
  CHECK(pair_solid_angle_increment_spherical(a, b, 0.0, 0.0, 0.0, 0.0) == 0.0);
  // Same meridian, meridional steps: sin(phi_i - phi_j) = 0 and dphi = 0.
  CHECK(pair_solid_angle_increment_spherical(a, b, 1e-3, 0.0, -2e-3, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(pair_solid_angle_increment_spherical(a, a, 1e-3, 0.0, 0.0, 0.0), DegeneratePair);
  const SphericalStep si(a, Direction(0.61, 1.0)), sj(b, Direction(2.09, 1.0));
  CHECK(pair_solid_angle_increment_spherical(a, b, si, sj) == doctest::Approx(0.0));
}

TEST_CASE("rotation_to_pole") {
  CHECK((rotation_to_pole(Direction::north()) - Eigen::Matrix3d::Identity()).norm() < 1e-15);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const Direction u = fixtures::random_direction(rng);
    const Eigen::Matrix3d r = rotation_to_pole(u);
    CHECK((r * u.cartesian() - Vec3(0, 0, 1)).norm() < 1e-12);
    CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("relative_coordinates") {
  const Direction a(1.0, 2.0);
  const RelativeFrame same = relative_coordinates(a, a);
  CHECK(same.degenerate);
  CHECK(same.theta_prime == 0.0);
  CHECK(same.phi_prime == 0.0);

  const Direction c(0.8, 0.5);
  CHECK(relative_coordinates(Direction::north(), c).theta_prime == doctest::Approx(0.8));

  const RelativeFrame anti = relative_coordinates(a, a.antipode());
  CHECK(anti.antipodal);
  CHECK(anti.theta_prime == doctest::Approx(kPi));

  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    const Direction u = fixtures::random_direction(rng), v = fixtures::random_direction(rng);
    const RelativeFrame f = relative_coordinates(u, v), g = relative_coordinates(v, u);
    CHECK(f.theta_prime == g.theta_prime);
    CHECK(f.theta_prime == doctest::Approx(std::acos(u.cartesian().dot(v.cartesian()))).epsilon(1e-10));
    // phi' is the azimuth of the rotated companion.
    const Vec3 w = rotation_to_pole(u) * v.cartesian();
    CHECK(std::abs(wrap_pi(f.phi_prime - std::atan2(w.y(), w.x()))) < 1e-10);
  }
}

TEST_CASE("weighted_pair_increment") {
  const Vec3 u = Direction(1.0, 1.0).cartesian();
  CHECK(weighted_pair_increment(u, u, Vec3(1e-3, 0, 0), Vec3(0, 1e-3, 0), 0.7) == 0.0);
  const Vec3 v = Direction(2.0, 0.2).cartesian();
  CHECK(weighted_pair_increment(u, v, Vec3::Zero(), Vec3::Zero(), 0.7) == 0.0);
  const Vec3 du(1e-3, 2e-3, -1e-3), dv(-2e-3, 1e-3, 0.0);
  const double d = 1 - u.dot(v);
  const double b = 0.37;
  CHECK(std::abs(weighted_pair_increment(u, v, du, dv, b / d) - b * pair_solid_angle_increment(u, v, du, dv)) < 1e-10);
}
