// Pair distances, the symmetric functions D^n_k, the closed-form
// normalization N_n^2 and its derivatives, the correlation factors beta_ij,
// and an independent permanent-based normalization.
#pragma once

#include <span>
#include <vector>

#include "majorana/types.hpp"

namespace majorana {

/// Star count limit of the closed form (subset memo is 2^n entries).
inline constexpr int kMaxClosedFormN = 16;
/// Star count limit of the permanent oracle.
inline constexpr int kMaxPermanentN = 12;

/// d_ij = 1 - u_i . u_j. The matrix may also hold formal values that do not
/// come from actual stars (the closed form is a polynomial in the d_ij).
struct PairDistanceMatrix {
  Eigen::MatrixXd d;

  int n() const { return static_cast<int>(d.rows()); }
  double operator()(int i, int j) const { return d(i, j); }
};

PairDistanceMatrix pair_distances(std::span<const Vec3> stars);
PairDistanceMatrix pair_distances(const StarSet& stars);

/// D^n_k: sum over all sets of k disjoint index pairs of the product of
/// (1 - d_ij) over the chosen pairs. D^n_0 = 1.
double symmetric_function_d(const PairDistanceMatrix& dist, int k);

/// N_n^2 = ((n+1)!/2^n) sum_k D^n_k / (2k+1)!!.
double normalization_sq(const PairDistanceMatrix& dist);
double normalization_sq(const StarSet& stars);

/// n! * permanent of the Gram matrix <u_i|u_j>. Throws ResourceLimit for
/// n > kMaxPermanentN and NumericalFailure if the result is not real.
double normalization_sq_permanent(const StarSet& stars);

struct NormalizationReport {
  double value = 0.0;            ///< closed form
  double permanent_value = 0.0;  ///< n! perm(G)
  double ratio = 0.0;            ///< value / permanent_value
};

NormalizationReport normalization_report(const StarSet& stars);

/// dN_n^2 / dd_ij, with N_n^2 treated as a multilinear polynomial in the
/// formal variables d_pq.
double norm_sq_pair_derivative(const PairDistanceMatrix& dist, int i, int j);
double norm_sq_pair_derivative(const StarSet& stars, int i, int j);

/// beta_ij = -(d_ij / N^2) dN^2/dd_ij; exactly 0 when d_ij == 0.
double beta(const PairDistanceMatrix& dist, int i, int j);
double beta(const StarSet& stars, int i, int j);

/// Star count limit of the formal permanent expansion (n! permutations).
inline constexpr int kMaxFormalPermanentN = 8;

/// n! perm(G) written as a polynomial in formal dot products g_ij = 1 - d_ij:
/// each permutation cycle contributes the trace of a product of
/// (1 + sigma.u)/2 factors, reduced by the signed pairing rule. Agrees with
/// normalization_sq_permanent on actual constellations.
double permanent_polynomial(const PairDistanceMatrix& dist);

/// beta_ij from the permanent polynomial, differentiated in the formal d_ij.
/// Independent of the closed form; used for cross-checks.
double beta_from_permanent(const PairDistanceMatrix& dist, int i, int j);

/// Every pair quantity of one constellation, evaluated with a single
/// subset recursion.
struct CorrelationTable {
  int n = 0;
  double norm_sq = 0.0;
  PairDistanceMatrix dist;
  Eigen::MatrixXd dnorm;        ///< dN^2/dd_ij (symmetric, zero diagonal)
  Eigen::MatrixXd beta;         ///< beta_ij
  Eigen::MatrixXd beta_over_d;  ///< -(dN^2/dd_ij)/N^2, finite at d_ij = 0
};

CorrelationTable correlation_table(std::span<const Vec3> stars);
CorrelationTable correlation_table(const PairDistanceMatrix& dist);

}  // namespace majorana
