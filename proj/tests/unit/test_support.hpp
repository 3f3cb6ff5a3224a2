// Random fixtures and independent oracles shared by the tests.
#pragma once

#include <cmath>
#include <random>

#include "majorana/types.hpp"

namespace fixtures {

using namespace majorana;

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

inline Direction random_direction(std::mt19937_64& rng) { return Direction::from_cartesian(random_unit(rng)); }

inline StarSet random_stars(std::mt19937_64& rng, int n) {
  StarSet s;
  for (int k = 0; k < n; ++k) s.stars.push_back(random_direction(rng));
  return s;
}

inline SpinState random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd a(n + 1);
  for (int k = 0; k <= n; ++k) a[k] = cplx(g(rng), g(rng));
  return SpinState(a).normalized();
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

inline StarSet rotated(const StarSet& s, const Eigen::Matrix3d& r) {
  StarSet out;
  for (const auto& d : s.stars) out.stars.push_back(Direction::from_cartesian(r * d.cartesian()));
  return out;
}

// Angular distance between two star multisets under the best pairing
// (greedy is enough for the well separated configurations used here).
inline double multiset_distance(const StarSet& a, const StarSet& b) {
  std::vector<char> used(b.size(), 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = 1e300;
    std::size_t pick = 0;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!used[j] && a[i].angle_to(b[j]) < best) {
        best = a[i].angle_to(b[j]);
        pick = j;
      }
    used[pick] = 1;
    worst = std::max(worst, best);
  }
  return worst;
}

inline double binom(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

// Symmetric state expanded on the 2^n computational basis; bit 0 of a qubit
// is the "up" mode, so a string with k zeros carries amplitude c_k / sqrt(C(n, k)).
inline Eigen::VectorXcd qubit_amplitudes(const SpinState& s) {
  const int n = s.n();
  const Eigen::VectorXcd c = s.normalized().amplitudes;
  Eigen::VectorXcd out(1 << n);
  for (int b = 0; b < (1 << n); ++b) {
    const int zeros = n - __builtin_popcount(static_cast<unsigned>(b));
    out[b] = c[zeros] / std::sqrt(binom(n, zeros));
  }
  return out;
}

// Cayley hyperdeterminant 3-tangle 4|Det(a)|.
inline double tangle_hyperdeterminant(const SpinState& s) {
  const Eigen::VectorXcd v = qubit_amplitudes(s);
  const auto a = [&](int i, int j, int k) { return v[4 * i + 2 * j + k]; };
  const cplx d1 = a(0, 0, 0) * a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 1) + a(0, 0, 1) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 0) +
                  a(0, 1, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 0, 1) + a(1, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(0, 1, 1);
  const cplx d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0) + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0) +
                  a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1) + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0) +
                  a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1) + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
  const cplx d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1) + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
  return 4.0 * std::abs(d1 - 2.0 * d2 + 4.0 * d3);
}

}  // namespace fixtures
