#include <doctest.h>

#include "majorana/stellar.hpp"
#include "test_support.hpp"

using namespace majorana;
using fixtures::multiset_distance;

namespace {

SpinState basis(int n, int k) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n + 1);
  a[k] = 1.0;
  return SpinState(a);
}

SpinState ghz3() {
  const double r = 1.0 / std::sqrt(2.0);
  return SpinState{r, 0.0, 0.0, r};
}

cplx stereographic(const Direction& d) { return std::tan(0.5 * d.theta()) * std::polar(1.0, d.phi()); }

}  // namespace

TEST_CASE("majorana_polynomial coefficients") {
  SUBCASE("qubit root is tan(theta/2) e^{i phi}") {
    const double th = 1.1, ph = 0.4;
    const SpinState s{std::sin(th / 2) * std::polar(1.0, ph), std::cos(th / 2)};
    const PolynomialCoefficients p = majorana_polynomial(s);
    // c1 x + c0 = 0 with c1 = C_{1/2}, c0 = -C_{-1/2}
    const cplx root = -p.of_power(0) / p.of_power(1);
    CHECK(std::abs(root - std::tan(th / 2) * std::polar(1.0, ph)) < 1e-14);
  }
  SUBCASE("GHZ: x^3 - 1 up to scale") {
    const PolynomialCoefficients p = majorana_polynomial(ghz3());
    const double r = 1.0 / std::sqrt(2.0) / std::sqrt(6.0);
    CHECK(std::abs(p.of_power(3) - r) < 1e-15);
    CHECK(std::abs(p.of_power(0) + r) < 1e-15);
    CHECK(std::abs(p.of_power(1)) == 0.0);
    CHECK(std::abs(p.of_power(2)) == 0.0);
  }
  SUBCASE("highest weight n=2: x^2/sqrt 2") {
    const PolynomialCoefficients p = majorana_polynomial(basis(2, 2));
    CHECK(std::abs(p.of_power(2) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(p.of_power(1)) == 0.0);
    CHECK(std::abs(p.of_power(0)) == 0.0);
  }
  SUBCASE("slot layout and signs") {
    const SpinState s{1.0, 2.0, 3.0, 4.0};
    const PolynomialCoefficients p = majorana_polynomial(s);
    // coeffs[k] = (-1)^k C_{n/2-k} / sqrt((n-k)! k!)
    CHECK(p.coeffs[0].real() == doctest::Approx(4.0 / std::sqrt(6.0)));
    CHECK(p.coeffs[1].real() == doctest::Approx(-3.0 / std::sqrt(2.0)));
    CHECK(p.coeffs[2].real() == doctest::Approx(2.0 / std::sqrt(2.0)));
    CHECK(p.coeffs[3].real() == doctest::Approx(-1.0 / std::sqrt(6.0)));
  }
  CHECK_THROWS_AS(majorana_polynomial(SpinState{0.0, 0.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(majorana_polynomial(SpinState(Eigen::VectorXcd::Ones(62))), ResourceLimit);
}

TEST_CASE("find_stars examples") {
  SUBCASE("highest weight: all stars at the north pole") {
    for (int n = 1; n <= 8; ++n) {
      const StarSet s = find_stars(basis(n, n));
      REQUIRE(s.size() == static_cast<std::size_t>(n));
      for (const auto& d : s.stars) CHECK(d.theta() == 0.0);
    }
  }
  SUBCASE("GHZ: equatorial stars at 0, 2pi/3, 4pi/3") {
    const StarSet s = find_stars(ghz3());
    const StarSet expect({Direction(kPi / 2, 0.0), Direction(kPi / 2, kTwoPi / 3), Direction(kPi / 2, 2 * kTwoPi / 3)});
    CHECK(multiset_distance(s, expect) < 1e-12);
  }
  SUBCASE("W Dicke state: two north, one south") {
    const StarSet s = find_stars(basis(3, 2));
    REQUIRE(s.size() == 3);
    CHECK(s.infinity_count == 1);
    int north = 0, south = 0;
    for (const auto& d : s.stars) {
      north += d.theta() == 0.0;
      south += d.theta() == kPi;
    }
    CHECK(north == 2);
    CHECK(south == 1);
  }
  SUBCASE("both poles: |J=1, m=0>") {
    const StarSet s = find_stars(basis(2, 1));
    CHECK(s.infinity_count == 1);
    CHECK(multiset_distance(s, StarSet({Direction::north(), Direction::south()})) == 0.0);
  }
  SUBCASE("lowest weight: every star at the south pole") {
    const StarSet s = find_stars(basis(5, 0));
    CHECK(s.infinity_count == 5);
    for (const auto& d : s.stars) CHECK(d.theta() == kPi);
  }
  CHECK_THROWS_AS(find_stars(ghz3(), 0.0), InvalidInput);
}

TEST_CASE("find_stars properties on random states") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 12;
    const SpinState s = fixtures::random_state(rng, n);
    const StarSet stars = find_stars(s);
    // degree bookkeeping
    CHECK(stars.size() == static_cast<std::size_t>(n));
    CHECK(stars.residuals.size() + static_cast<std::size_t>(stars.infinity_count) <= stars.size());
    // stereographic consistency: every star is a root of the polynomial
    const PolynomialCoefficients p = majorana_polynomial(s);
    for (std::size_t k = 0; k < stars.size(); ++k) {
      const Direction& d = stars[k];
      cplx v = 0.0;
      double scale = 0.0;
      if (d.theta() <= kPi / 2) {
        const cplx x = stereographic(d);
        for (int j = n; j >= 0; --j) {
          v = v * x + p.of_power(j);
          scale = scale * std::abs(x) + std::abs(p.of_power(j));
        }
      } else {
        const cplx w = 1.0 / stereographic(d);
        for (int j = 0; j <= n; ++j) {
          v = v * w + p.of_power(j);
          scale = scale * std::abs(w) + std::abs(p.of_power(j));
        }
      }
      CHECK(std::abs(v) / scale < 1e-10);
    }
  }
}

TEST_CASE("round trip state -> stars -> state") {
  std::mt19937_64 rng(5);
  double worst = 1.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 10;
    const SpinState s = fixtures::random_state(rng, n);
    worst = std::min(worst, fidelity(s, state_from_stars(find_stars(s))));
  }
  CHECK(worst > 1.0 - 1e-8);
}

TEST_CASE("round trip stars -> state -> stars") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const StarSet s = fixtures::random_stars(rng, 2 + trial % 8);
    CHECK(multiset_distance(s, find_stars(state_from_stars(s))) < 1e-8);
  }
}

TEST_CASE("coincident stars survive the round trip") {
  // k-fold roots scatter by eps^(1/k) in a plain eigenvalue solve; the
  // multiplicity-aware refinement must bring them back together.
  std::mt19937_64 rng(8);
  for (int k = 2; k <= 10; ++k) {
    const Direction a = fixtures::random_direction(rng);
    const Direction b = fixtures::random_direction(rng);
    std::vector<Direction> v(static_cast<std::size_t>(k), a);
    v.push_back(b);
    const StarSet s(v);
    CHECK(multiset_distance(s, find_stars(state_from_stars(s))) < 1e-10);
  }
}

TEST_CASE("nearby distinct roots are not merged") {
  const StarSet s({Direction(1.0, 0.3), Direction(1.0 + 1e-4, 0.3), Direction(2.0, 2.0)});
  const StarSet f = find_stars(state_from_stars(s));
  CHECK(multiset_distance(s, f) < 1e-8);
}

TEST_CASE("simple-root stability under small perturbations") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const SpinState s = fixtures::random_state(rng, 6);
    Eigen::VectorXcd pert(7);
    for (int k = 0; k < 7; ++k) pert[k] = cplx(g(rng), g(rng));
    const SpinState t(s.amplitudes + 1e-10 * pert);
    CHECK(multiset_distance(find_stars(s), find_stars(t)) < 1e-6);
  }
}

TEST_CASE("state_from_stars examples") {
  SUBCASE("one star") {
    const double th = 0.8, ph = 2.2;
    const SpinState s = state_from_stars(StarSet({Direction(th, ph)}));
    // index 1 is m = +1/2 (mode a), index 0 is m = -1/2
    CHECK(std::abs(s.amplitudes[1] - std::cos(th / 2)) < 1e-15);
    CHECK(std::abs(s.amplitudes[0] - std::sin(th / 2) * std::polar(1.0, ph)) < 1e-15);
  }
  SUBCASE("GHZ triple") {
    const SpinState s = state_from_stars(
        StarSet({Direction(kPi / 2, 0.0), Direction(kPi / 2, kTwoPi / 3), Direction(kPi / 2, 2 * kTwoPi / 3)}));
    CHECK(fidelity(s, ghz3()) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("antipodal pair is |1, 0>") {
    const SpinState s = state_from_stars(StarSet({Direction::north(), Direction::south()}));
    CHECK(fidelity(s, basis(2, 1)) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(state_from_stars(StarSet()), InvalidInput);
  CHECK(state_from_stars(StarSet(std::vector<Direction>(60, Direction(0.3, 0.1)))).norm() ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(state_from_stars(StarSet(std::vector<Direction>(61))), ResourceLimit);
}

TEST_CASE("generic_state_stars") {
  SUBCASE("qubit: star equals the Bloch vector") {
    const double th = 0.9, ph = 1.7;
    const std::vector<cplx> c{std::sin(th / 2) * std::polar(1.0, ph), std::cos(th / 2)};
    const StarSet s = generic_state_stars(c);
    REQUIRE(s.size() == 1);
    CHECK(s[0].angle_to(Direction(th, ph)) < 1e-12);
  }
  SUBCASE("basis vector in dimension 4: three coincident stars at a pole") {
    const std::vector<cplx> c{1.0, 0.0, 0.0, 0.0};
    const StarSet s = generic_state_stars(c);
    REQUIRE(s.size() == 3);
    for (const auto& d : s.stars) CHECK(d.theta() == s[0].theta());
    CHECK((s[0].theta() == 0.0 || s[0].theta() == kPi));
  }
  SUBCASE("equal amplitudes in dimension 3") {
    const double r = 1.0 / std::sqrt(3.0);
    const std::vector<cplx> c{r, r, r};
    const StarSet s = generic_state_stars(c);
    REQUIRE(s.size() == 2);
    const SpinState back = state_from_stars(s);
    CHECK(fidelity(back, SpinState{r, r, r}) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(generic_state_stars(std::vector<cplx>{1.0}), InvalidInput);
}

TEST_CASE("sqrt_factorial table") {
  CHECK(sqrt_factorial(0) == 1.0);
  CHECK(sqrt_factorial(5) == doctest::Approx(std::sqrt(120.0)));
  CHECK(sqrt_factorial(60) == doctest::Approx(std::sqrt(std::tgamma(61.0))).epsilon(1e-12));
  CHECK_THROWS_AS(sqrt_factorial(61), ResourceLimit);
}
