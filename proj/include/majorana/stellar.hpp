// Majorana stellar representation: amplitude vector <-> star constellation.
#pragma once

#include <span>

#include "majorana/types.hpp"

namespace majorana {

/// Largest particle number accepted by the stellar conversions.
inline constexpr int kMaxStellarN = 60;

/// sqrt(k!) for 0 <= k <= kMaxStellarN, from a precomputed table.
double sqrt_factorial(int k);

/// Coefficients of the Majorana polynomial, slot k holding the coefficient
/// of x^(n-k): (-1)^k C_{n/2-k} / sqrt((n-k)! k!).
struct PolynomialCoefficients {
  Eigen::VectorXcd coeffs;

  int degree_bound() const { return static_cast<int>(coeffs.size()) - 1; }
  /// Coefficient of x^power.
  cplx of_power(int power) const { return coeffs[degree_bound() - power]; }
};

PolynomialCoefficients majorana_polynomial(const SpinState& state);

/// Stars of a spin state. Finite roots x map to theta = 2 atan|x|,
/// phi = arg x; every leading coefficient with |c| < tol * max|c| becomes a
/// star at the south pole, every trailing one a star at the north pole.
/// Throws NumericalFailure if the eigenvalue iteration does not converge.
StarSet find_stars(const SpinState& state, double tol = 1e-10);

/// Normalized state whose constellation is `stars` (global phase fixed by
/// the product expansion of the single-star creation operators).
SpinState state_from_stars(std::span<const Direction> stars);
inline SpinState state_from_stars(const StarSet& stars) { return state_from_stars(stars.stars); }

/// Stars of a generic n-dimensional amplitude vector (C_1..C_n): the n - 1
/// stars of the spin-(n-1)/2 state with the same amplitudes.
StarSet generic_state_stars(std::span<const cplx> amplitudes, double tol = 1e-10);

}  // namespace majorana
