#include "majorana/correlation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace majorana {

namespace {

void check_pair(int n, int i, int j, const char* who) {
  if (i < 0 || j < 0 || i >= n || j >= n) throw InvalidInput(std::string(who) + ": star index out of range");
  if (i == j) throw InvalidInput(std::string(who) + ": pair indices must differ");
}

void check_closed_form_n(int n, const char* who) {
  if (n < 1) throw InvalidInput(std::string(who) + ": empty constellation");
  if (n > kMaxClosedFormN) {
    std::ostringstream os;
    os << who << ": n = " << n << " exceeds the closed-form limit " << kMaxClosedFormN;
    throw ResourceLimit(os.str());
  }
}

// (n+1)! / 2^n
double closed_form_prefactor(int n) {
  double c = 1.0;
  for (int k = 2; k <= n + 1; ++k) c *= k;
  return std::ldexp(c, -n);
}

// (2k+1)!!
double odd_double_factorial(int k) {
  double f = 1.0;
  for (int m = 3; m <= 2 * k + 1; m += 2) f *= m;
  return f;
}

// Matching polynomials of every index subset: row(mask)[k] is D_k restricted
// to the stars in mask. Filled bottom-up; each mask peels off its lowest
// index i, which is either unpaired or paired with some j in the remainder.
class MatchingTable {
 public:
  explicit MatchingTable(const Eigen::MatrixXd& dist) : n_(static_cast<int>(dist.rows())), kmax_(n_ / 2) {
    const std::size_t masks = std::size_t{1} << n_;
    const std::size_t w = static_cast<std::size_t>(kmax_ + 1);
    data_.assign(masks * w, 0.0);
    data_[0] = 1.0;
    for (std::size_t mask = 1; mask < masks; ++mask) {
      const int i = std::countr_zero(mask);
      const std::size_t rest = mask & ~(std::size_t{1} << i);
      double* out = &data_[mask * w];
      const double* unpaired = &data_[rest * w];
      std::copy(unpaired, unpaired + w, out);
      for (std::size_t bits = rest; bits != 0; bits &= bits - 1) {
        const int j = std::countr_zero(bits);
        const double g = 1.0 - dist(i, j);
        const double* sub = &data_[(rest & ~(std::size_t{1} << j)) * w];
        for (int k = 0; k < kmax_; ++k) out[k + 1] += g * sub[k];
      }
    }
  }

  const double* row(std::size_t mask) const { return &data_[mask * static_cast<std::size_t>(kmax_ + 1)]; }
  std::size_t full() const { return (std::size_t{1} << n_) - 1; }
  int kmax() const { return kmax_; }

 private:
  int n_;
  int kmax_;
  std::vector<double> data_;
};

double closed_form_from_row(const double* row, int n, int kmax) {
  double s = 0.0;
  for (int k = 0; k <= kmax; ++k) s += row[k] / odd_double_factorial(k);
  return closed_form_prefactor(n) * s;
}

// dN^2/dd_ij = -((n+1)!/2^n) sum_k D'_k / (2k+3)!!, D' excluding i and j.
double derivative_from_row(const double* row, int n) {
  double s = 0.0;
  for (int k = 0; k <= (n - 2) / 2; ++k) s += row[k] / odd_double_factorial(k + 1);
  return -closed_form_prefactor(n) * s;
}

// Pfaffian-style signed pairing sum over an ordered list of indices.
double signed_pairing_sum(const std::vector<int>& idx, std::size_t begin, std::vector<char>& used,
                          const Eigen::MatrixXd& g) {
  std::size_t a = begin;
  while (a < idx.size() && used[a]) ++a;
  if (a == idx.size()) return 1.0;
  used[a] = 1;
  double total = 0.0;
  int parity = 0;
  for (std::size_t b = a + 1; b < idx.size(); ++b) {
    if (used[b]) continue;
    used[b] = 1;
    const double term = g(idx[a], idx[b]) * signed_pairing_sum(idx, a + 1, used, g);
    total += (parity % 2 == 0) ? term : -term;
    used[b] = 0;
    ++parity;
  }
  used[a] = 0;
  return total;
}

// Real part of Tr[prod_k (1 + sigma.u_k)/2] around one cycle, as a
// polynomial in the formal dot products: every even ordered sub-selection
// contributes its signed pairing sum; odd selections are imaginary and
// cancel against the reversed cycle.
double cycle_trace(const std::vector<int>& cycle, const Eigen::MatrixXd& g) {
  const int len = static_cast<int>(cycle.size());
  double total = 0.0;
  std::vector<int> chosen;
  for (unsigned sel = 0; sel < (1u << len); ++sel) {
    if (std::popcount(sel) % 2 != 0) continue;
    chosen.clear();
    for (int p = 0; p < len; ++p)
      if (sel & (1u << p)) chosen.push_back(cycle[p]);
    std::vector<char> used(chosen.size(), 0);
    total += signed_pairing_sum(chosen, 0, used, g);
  }
  return std::ldexp(total, 1 - len);
}

}  // namespace

PairDistanceMatrix pair_distances(std::span<const Vec3> stars) {
  const int n = static_cast<int>(stars.size());
  PairDistanceMatrix out;
  out.d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      // Half the squared chord: exact zero for coincident stars, no cancellation nearby.
      const double d = std::clamp(0.5 * (stars[i] - stars[j]).squaredNorm(), 0.0, 2.0);
      out.d(i, j) = out.d(j, i) = d;
    }
  return out;
}

PairDistanceMatrix pair_distances(const StarSet& stars) {
  const auto xyz = stars.cartesian();
  return pair_distances(std::span<const Vec3>(xyz));
}

double symmetric_function_d(const PairDistanceMatrix& dist, int k) {
  const int n = dist.n();
  check_closed_form_n(n, "symmetric_function_d");
  if (k < 0 || k > n / 2) throw InvalidInput("symmetric_function_d: k outside [0, n/2]");
  const MatchingTable table(dist.d);
  return table.row(table.full())[k];
}

double normalization_sq(const PairDistanceMatrix& dist) {
  const int n = dist.n();
  check_closed_form_n(n, "normalization_sq");
  const MatchingTable table(dist.d);
  return closed_form_from_row(table.row(table.full()), n, table.kmax());
}

double normalization_sq(const StarSet& stars) { return normalization_sq(pair_distances(stars)); }

double normalization_sq_permanent(const StarSet& stars) {
  const int n = static_cast<int>(stars.size());
  if (n < 1) throw InvalidInput("normalization_sq_permanent: empty constellation");
  if (n > kMaxPermanentN) throw ResourceLimit("normalization_sq_permanent: n exceeds the permanent limit");

  Eigen::MatrixXcd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Direction& a = stars[static_cast<std::size_t>(i)];
      const Direction& b = stars[static_cast<std::size_t>(j)];
      gram(i, j) = std::cos(0.5 * a.theta()) * std::cos(0.5 * b.theta()) +
                   std::sin(0.5 * a.theta()) * std::sin(0.5 * b.theta()) * std::polar(1.0, b.phi() - a.phi());
    }

  // Ryser's formula, columns toggled in Gray-code order.
  Eigen::VectorXcd row_sums = Eigen::VectorXcd::Zero(n);
  cplx perm = 0.0;
  const unsigned long subsets = 1ul << n;
  unsigned long gray_prev = 0;
  for (unsigned long s = 1; s < subsets; ++s) {
    const unsigned long gray = s ^ (s >> 1);
    const unsigned long changed = gray ^ gray_prev;
    const int col = std::countr_zero(changed);
    if (gray & changed)
      row_sums += gram.col(col);
    else
      row_sums -= gram.col(col);
    gray_prev = gray;
    cplx prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= row_sums[i];
    const int size = std::popcount(gray);
    perm += ((n - size) % 2 == 0) ? prod : -prod;
  }

  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  const cplx value = factorial * perm;
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real())))
    throw NumericalFailure("normalization_sq_permanent: non-real permanent", {value.imag()});
  return value.real();
}

NormalizationReport normalization_report(const StarSet& stars) {
  NormalizationReport r;
  r.value = normalization_sq(stars);
  r.permanent_value = normalization_sq_permanent(stars);
  r.ratio = r.value / r.permanent_value;
  return r;
}

double norm_sq_pair_derivative(const PairDistanceMatrix& dist, int i, int j) {
  const int n = dist.n();
  check_closed_form_n(n, "norm_sq_pair_derivative");
  check_pair(n, i, j, "norm_sq_pair_derivative");
  const MatchingTable table(dist.d);
  const std::size_t mask = table.full() & ~(std::size_t{1} << i) & ~(std::size_t{1} << j);
  return derivative_from_row(table.row(mask), n);
}

double norm_sq_pair_derivative(const StarSet& stars, int i, int j) {
  return norm_sq_pair_derivative(pair_distances(stars), i, j);
}

double beta(const PairDistanceMatrix& dist, int i, int j) {
  check_pair(dist.n(), i, j, "beta");
  const double d = dist(i, j);
  if (d == 0.0) return 0.0;
  return -d * norm_sq_pair_derivative(dist, i, j) / normalization_sq(dist);
}

double beta(const StarSet& stars, int i, int j) { return beta(pair_distances(stars), i, j); }

double permanent_polynomial(const PairDistanceMatrix& dist) {
  const int n = dist.n();
  if (n < 1) throw InvalidInput("permanent_polynomial: empty constellation");
  if (n > kMaxFormalPermanentN) throw ResourceLimit("permanent_polynomial: n exceeds the formal expansion limit");
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(n, n) - dist.d;

  std::map<std::vector<int>, double> cache;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    double prod = 1.0;
    for (int s = 0; s < n && prod != 0.0; ++s) {
      if (seen[static_cast<std::size_t>(s)]) continue;
      std::vector<int> cycle;
      for (int x = s; !seen[static_cast<std::size_t>(x)]; x = perm[static_cast<std::size_t>(x)]) {
        seen[static_cast<std::size_t>(x)] = 1;
        cycle.push_back(x);
      }
      auto it = cache.find(cycle);
      if (it == cache.end()) it = cache.emplace(cycle, cycle_trace(cycle, g)).first;
      prod *= it->second;
    }
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));

  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  return factorial * total;
}

double beta_from_permanent(const PairDistanceMatrix& dist, int i, int j) {
  check_pair(dist.n(), i, j, "beta_from_permanent");
  const double d = dist(i, j);
  if (d == 0.0) return 0.0;
  // The polynomial is affine in each single d_ij, so a unit central
  // difference is exact.
  PairDistanceMatrix up = dist, down = dist;
  up.d(i, j) = up.d(j, i) = d + 1.0;
  down.d(i, j) = down.d(j, i) = d - 1.0;
  const double slope = 0.5 * (permanent_polynomial(up) - permanent_polynomial(down));
  return -d * slope / permanent_polynomial(dist);
}

CorrelationTable correlation_table(const PairDistanceMatrix& dist) {
  const int n = dist.n();
  check_closed_form_n(n, "correlation_table");
  const MatchingTable table(dist.d);
  CorrelationTable out;
  out.n = n;
  out.dist = dist;
  out.norm_sq = closed_form_from_row(table.row(table.full()), n, table.kmax());
  out.dnorm = Eigen::MatrixXd::Zero(n, n);
  out.beta = Eigen::MatrixXd::Zero(n, n);
  out.beta_over_d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::size_t mask = table.full() & ~(std::size_t{1} << i) & ~(std::size_t{1} << j);
      const double dn = derivative_from_row(table.row(mask), n);
      const double bod = -dn / out.norm_sq;
      out.dnorm(i, j) = out.dnorm(j, i) = dn;
      out.beta_over_d(i, j) = out.beta_over_d(j, i) = bod;
      const double b = dist(i, j) == 0.0 ? 0.0 : dist(i, j) * bod;
      out.beta(i, j) = out.beta(j, i) = b;
    }
  return out;
}

CorrelationTable correlation_table(std::span<const Vec3> stars) { return correlation_table(pair_distances(stars)); }

}  // namespace majorana
