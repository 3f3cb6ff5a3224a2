// Entanglement measures of symmetric multiqubit states read off the star
// geometry: diversity degree, two-qubit and W-type concurrences, the
// 3-tangle, and the (experimental) generalized product measure.
#pragma once

#include <string>
#include <vector>

#include "majorana/types.hpp"

namespace majorana {

inline constexpr double kDefaultClusterTol = 1e-6;

/// Raised when a measure is requested for a state outside its class.
class ClassificationError : public Error {
 public:
  using Error::Error;
};

/// Cluster label of each star under single-linkage clustering with the
/// given angular threshold; labels are numbered by first appearance.
std::vector<int> star_clusters(const StarSet& stars, double cluster_tol = kDefaultClusterTol);

/// Number of distinct star positions n_s.
int diversity_degree(const StarSet& stars, double cluster_tol = kDefaultClusterTol);

/// "separable" (n_s = 1), "GHZ" (n_s = n), "W" (n_s = 2), otherwise "mixed";
/// checked in that order.
std::string diversity_class(int n, int n_s);

/// C = d_12 / (2 N_2^2). Throws InvalidInput unless n == 2.
double concurrence_two(const StarSet& stars);

/// C_12 = 2 d_12 / (3 N_3^2) between the two distinct positions of a W-type
/// three-star constellation. Throws InvalidInput unless n == 3 and
/// ClassificationError unless n_s == 2.
double concurrence_w(const StarSet& stars, double cluster_tol = kDefaultClusterTol);

/// tau = (2/3) beta_12 beta_13 beta_23 N_3^2. Throws InvalidInput unless n == 3.
double three_tangle(const StarSet& stars);

/// Product of d over distinct positions divided by N_n^{2(n_s - 1)}. Equal
/// to 1 by convention when n_s == 1.
double product_measure(const StarSet& stars, double cluster_tol = kDefaultClusterTol);

struct EntanglementMeasure {
  std::string name;  ///< concurrence, W-concurrence, three-tangle, product-measure
  double value = 0.0;
  bool degenerate = false;  ///< empty-product convention (n_s == 1)
};

struct EntanglementReport {
  int n = 0;
  int diversity = 0;
  std::string classification;
  std::vector<EntanglementMeasure> measures;
};

/// Every measure applicable to the constellation.
EntanglementReport entanglement_report(const StarSet& stars, double cluster_tol = kDefaultClusterTol);

}  // namespace majorana
