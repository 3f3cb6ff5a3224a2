#include <doctest.h>

#include <Eigen/SVD>

#include "majorana/correlation.hpp"
#include "majorana/entangle.hpp"
#include "majorana/stellar.hpp"
#include "test_support.hpp"

using namespace majorana;
using fixtures::qubit_amplitudes;
using fixtures::tangle_hyperdeterminant;

namespace {

// Pure two-qubit concurrence 2|a00 a11 - a01 a10|.
double concurrence_pure(const SpinState& s) {
  const Eigen::VectorXcd a = qubit_amplitudes(s);
  return 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]);
}

// Wootters concurrence of the reduced state of qubits 0 and 1 of a 3-qubit
// pure state. The reduced state has rank 2, rho = sum_k |v_k><v_k| over the
// third qubit, so the Wootters roots are the singular values of
// t_kl = v_k^T (sigma_y x sigma_y) v_l; this avoids sqrt of round-off zeros.
double concurrence_reduced(const SpinState& s) {
  const Eigen::VectorXcd a = qubit_amplitudes(s);
  Eigen::Vector4cd v[2];
  for (int k = 0; k < 2; ++k)
    for (int r = 0; r < 4; ++r) v[k][r] = a[2 * r + k];
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = yy(3, 0) = -1.0;
  yy(1, 2) = yy(2, 1) = 1.0;
  Eigen::Matrix2cd t;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) t(k, l) = v[k].transpose() * yy * v[l];
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix2cd>(t).singularValues();
  return std::max(0.0, sv[0] - sv[1]);
}

const StarSet kGhz({Direction(kPi / 2, 0.0), Direction(kPi / 2, kTwoPi / 3), Direction(kPi / 2, 2 * kTwoPi / 3)});
const StarSet kW({Direction::north(), Direction::north(), Direction::south()});
const StarSet kBell({Direction::north(), Direction::south()});

StarSet rotated(const Eigen::Matrix3d& r, const StarSet& s) {
  StarSet out;
  for (const auto& d : s.stars) out.stars.push_back(Direction::from_cartesian(r * d.cartesian()));
  return out;
}

}  // namespace

TEST_CASE("oracle helpers on textbook states") {
  CHECK(concurrence_pure(state_from_stars(kBell)) == doctest::Approx(1.0));
  CHECK(tangle_hyperdeterminant(state_from_stars(kGhz)) == doctest::Approx(1.0));
  CHECK(tangle_hyperdeterminant(state_from_stars(kW)) == doctest::Approx(0.0));
  CHECK(concurrence_reduced(state_from_stars(kW)) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("star clusters and diversity") {
  CHECK(diversity_degree(kGhz) == 3);
  CHECK(diversity_degree(kW) == 2);
  CHECK(diversity_degree(StarSet(std::vector<Direction>(4, Direction(1.0, 1.0)))) == 1);
  CHECK(star_clusters(StarSet({Direction(1.0, 0.0), Direction(2.0, 0.0), Direction(1.0, 0.0)})) ==
        std::vector<int>{0, 1, 0});
  // Chained within the threshold: single linkage joins all three.
  const StarSet chain({Direction(1.0, 0.0), Direction(1.0 + 8e-7, 0.0), Direction(1.0 + 1.6e-6, 0.0)});
  CHECK(diversity_degree(chain) == 1);
  CHECK(diversity_degree(chain, 1e-7) == 3);

  CHECK(diversity_class(3, 1) == "separable");
  CHECK(diversity_class(3, 2) == "W");
  CHECK(diversity_class(3, 3) == "GHZ");
  CHECK(diversity_class(4, 3) == "mixed");
  CHECK(diversity_class(2, 2) == "GHZ");
}

TEST_CASE("two-qubit concurrence") {
  CHECK(concurrence_two(kBell) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(concurrence_two(StarSet({Direction(0.5, 0.5), Direction(0.5, 0.5)})) == 0.0);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const StarSet s = fixtures::random_stars(rng, 2);
    const double c = concurrence_two(s);
    CHECK(c == doctest::Approx(concurrence_pure(state_from_stars(s))).epsilon(1e-10));
    // product measure relation: d / N_2^2 = 2 C
    CHECK(product_measure(s) == doctest::Approx(2 * c).epsilon(1e-12));
  }
  CHECK_THROWS_AS(concurrence_two(kGhz), InvalidInput);
}

TEST_CASE("W-class concurrence against the Wootters formula") {
  CHECK(concurrence_w(kW) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const Direction a = fixtures::random_direction(rng), b = fixtures::random_direction(rng);
    const StarSet s({a, b, a});
    CHECK(concurrence_w(s) == doctest::Approx(concurrence_reduced(state_from_stars(s))).epsilon(1e-8));
  }
  CHECK_THROWS_AS(concurrence_w(kGhz), ClassificationError);
  CHECK_THROWS_AS(concurrence_w(kBell), InvalidInput);
}

TEST_CASE("three-tangle") {
  CHECK(three_tangle(kGhz) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(three_tangle(kW) == 0.0);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const StarSet s = fixtures::random_stars(rng, 3);
    CHECK(std::abs(three_tangle(s) - tangle_hyperdeterminant(state_from_stars(s))) < 1e-8);
  }
  // W-class states have zero tangle exactly, wherever the stars sit.
  for (int t = 0; t < 20; ++t) {
    const Direction a = fixtures::random_direction(rng), b = fixtures::random_direction(rng);
    CHECK(three_tangle(StarSet({b, a, a})) == 0.0);
  }
  CHECK_THROWS_AS(three_tangle(kBell), InvalidInput);
}

TEST_CASE("measures are rotation invariant") {
  std::mt19937_64 rng(4);
  const StarSet g = fixtures::random_stars(rng, 3);
  const StarSet w({g[0], g[1], g[0]});
  const StarSet p = fixtures::random_stars(rng, 2);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Matrix3d r = fixtures::random_rotation(rng);
    CHECK(three_tangle(rotated(r, g)) == doctest::Approx(three_tangle(g)).epsilon(1e-10));
    CHECK(concurrence_w(rotated(r, w)) == doctest::Approx(concurrence_w(w)).epsilon(1e-10));
    CHECK(concurrence_two(rotated(r, p)) == doctest::Approx(concurrence_two(p)).epsilon(1e-10));
  }
}

TEST_CASE("degeneration is continuous") {
  // A star sliding onto another: GHZ-class tangle fades to the W value 0.
  const Direction a(1.0, 0.5), b(2.0, 2.0);
  double prev = 1.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double tau = three_tangle(StarSet({a, Direction(1.0 + eps, 0.5), b}));
    CHECK(tau < prev);
    prev = tau;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("product measure") {
  CHECK(product_measure(StarSet(std::vector<Direction>(3, Direction(0.4, 0.2)))) == 1.0);
  const double dg = 1.5;  // 1 - cos(2 pi / 3) for the GHZ pairs
  CHECK(product_measure(kGhz) == doctest::Approx(dg * dg * dg / std::pow(normalization_sq(kGhz), 2)).epsilon(1e-12));
  // duplicates contribute once
  const StarSet dup({Direction::north(), Direction::north(), Direction::south(), Direction::south()});
  CHECK(product_measure(dup) == doctest::Approx(2.0 / normalization_sq(dup)).epsilon(1e-12));
}

TEST_CASE("entanglement_report") {
  const EntanglementReport bell = entanglement_report(kBell);
  CHECK(bell.diversity == 2);
  CHECK(bell.classification == "GHZ");
  REQUIRE_FALSE(bell.measures.empty());
  CHECK(bell.measures[0].name == "concurrence");
  CHECK(bell.measures[0].value == doctest::Approx(1.0));

  const EntanglementReport w = entanglement_report(kW);
  CHECK(w.classification == "W");
  bool has_wc = false, has_tau = false;
  for (const auto& m : w.measures) {
    has_wc |= m.name == "W-concurrence";
    if (m.name == "three-tangle") {
      has_tau = true;
      CHECK(m.value == 0.0);
    }
  }
  CHECK(has_wc);
  CHECK(has_tau);

  const EntanglementReport sep = entanglement_report(StarSet(std::vector<Direction>(4, Direction(0.3, 0.3))));
  CHECK(sep.classification == "separable");
  bool degenerate = false;
  for (const auto& m : sep.measures) degenerate |= m.name == "product-measure" && m.degenerate && m.value == 1.0;
  CHECK(degenerate);
}
