#include "majorana/entangle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "majorana/correlation.hpp"

namespace majorana {

std::vector<int> star_clusters(const StarSet& stars, double cluster_tol) {
  const std::size_t n = stars.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (stars[i].angle_to(stars[j]) <= cluster_tol) parent[find(j)] = find(i);

  std::vector<int> label(n, -1), root_label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (root_label[r] < 0) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

int diversity_degree(const StarSet& stars, double cluster_tol) {
  const auto labels = star_clusters(stars, cluster_tol);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::string diversity_class(int n, int n_s) {
  if (n_s == 1) return "separable";
  // For n = 2 both labels fit; GHZ wins since every entangled pair is Bell-like.
  if (n_s == n) return "GHZ";
  if (n_s == 2) return "W";
  return "mixed";
}

double concurrence_two(const StarSet& stars) {
  if (stars.size() != 2) throw InvalidInput("concurrence_two: needs exactly two stars");
  const PairDistanceMatrix dist = pair_distances(stars);
  return dist(0, 1) / (2.0 * normalization_sq(dist));
}

double concurrence_w(const StarSet& stars, double cluster_tol) {
  if (stars.size() != 3) throw InvalidInput("concurrence_w: needs exactly three stars");
  const auto labels = star_clusters(stars, cluster_tol);
  if (diversity_degree(stars, cluster_tol) != 2)
    throw ClassificationError("concurrence_w: constellation is not of W type (n_s != 2)");
  // First star of each cluster stands for the position.
  std::size_t a = 0, b = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) {
      b = i;
      break;
    }
  const PairDistanceMatrix dist = pair_distances(stars);
  return 2.0 * dist(static_cast<int>(a), static_cast<int>(b)) / (3.0 * normalization_sq(dist));
}

double three_tangle(const StarSet& stars) {
  if (stars.size() != 3) throw InvalidInput("three_tangle: needs exactly three stars");
  const PairDistanceMatrix dist = pair_distances(stars);
  const CorrelationTable t = correlation_table(dist);
  return (2.0 / 3.0) * t.beta(0, 1) * t.beta(0, 2) * t.beta(1, 2) * t.norm_sq;
}

double product_measure(const StarSet& stars, double cluster_tol) {
  if (stars.size() == 0) throw InvalidInput("product_measure: empty constellation");
  const auto labels = star_clusters(stars, cluster_tol);
  const int n_s = *std::max_element(labels.begin(), labels.end()) + 1;
  if (n_s == 1) return 1.0;
  std::vector<Vec3> reps(static_cast<std::size_t>(n_s));
  std::vector<char> seen(static_cast<std::size_t>(n_s), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto l = static_cast<std::size_t>(labels[i]);
    if (!seen[l]) {
      reps[l] = stars[i].cartesian();
      seen[l] = 1;
    }
  }
  double prod = 1.0;
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j) prod *= 1.0 - reps[i].dot(reps[j]);
  return prod / std::pow(normalization_sq(stars), n_s - 1);
}

EntanglementReport entanglement_report(const StarSet& stars, double cluster_tol) {
  EntanglementReport r;
  r.n = static_cast<int>(stars.size());
  r.diversity = diversity_degree(stars, cluster_tol);
  r.classification = diversity_class(r.n, r.diversity);
  if (r.n == 2) r.measures.push_back({"concurrence", concurrence_two(stars), false});
  if (r.n == 3) {
    if (r.diversity == 2) r.measures.push_back({"W-concurrence", concurrence_w(stars, cluster_tol), false});
    r.measures.push_back({"three-tangle", three_tangle(stars), false});
  }
  if (r.n >= 1 && r.n <= kMaxClosedFormN)
    r.measures.push_back({"product-measure", product_measure(stars, cluster_tol), r.diversity == 1});
  return r;
}

}  // namespace majorana
