#include "majorana/stellar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace majorana {

namespace {

std::array<double, kMaxStellarN + 1> make_sqrt_factorials() {
  std::array<double, kMaxStellarN + 1> t{};
  t[0] = 1.0;
  for (int k = 1; k <= kMaxStellarN; ++k) t[k] = t[k - 1] * std::sqrt(static_cast<double>(k));
  return t;
}

const std::array<double, kMaxStellarN + 1> kSqrtFactorials = make_sqrt_factorials();

void check_n(int n, const char* who) {
  if (n < 1) throw InvalidInput(std::string(who) + ": need at least two amplitudes");
  if (n > kMaxStellarN) {
    std::ostringstream os;
    os << who << ": n = " << n << " exceeds the supported limit " << kMaxStellarN;
    throw ResourceLimit(os.str());
  }
}

// Horner evaluation of p(x) = sum_i c[i] x^i together with p'(x) and the
// magnitude scale sum_i |c[i]| |x|^i.
struct HornerResult {
  cplx value;
  cplx derivative;
  double scale;
};

HornerResult horner(const Eigen::VectorXcd& c, cplx x) {
  cplx p = 0.0, dp = 0.0;
  double s = 0.0;
  const double ax = std::abs(x);
  for (Eigen::Index i = c.size() - 1; i >= 0; --i) {
    dp = dp * x + p;
    p = p * x + c[i];
    s = s * ax + std::abs(c[i]);
  }
  return {p, dp, s};
}

// Relative backward residual of root x; evaluated on the reversed
// polynomial when |x| > 1 so both hemispheres are well conditioned.
double relative_residual(const Eigen::VectorXcd& c, const Eigen::VectorXcd& rev, cplx x) {
  const HornerResult h = std::abs(x) <= 1.0 ? horner(c, x) : horner(rev, 1.0 / x);
  return h.scale > 0.0 ? std::abs(h.value) / h.scale : 0.0;
}

cplx newton_polish(const Eigen::VectorXcd& c, const Eigen::VectorXcd& rev, cplx x) {
  cplx candidate = x;
  if (std::abs(x) <= 1.0) {
    const HornerResult h = horner(c, x);
    if (h.derivative != cplx(0.0)) candidate = x - h.value / h.derivative;
  } else {
    const cplx w = 1.0 / x;
    const HornerResult h = horner(rev, w);
    if (h.derivative != cplx(0.0)) {
      const cplx w1 = w - h.value / h.derivative;
      if (w1 != cplx(0.0)) candidate = 1.0 / w1;
    }
  }
  if (!std::isfinite(candidate.real()) || !std::isfinite(candidate.imag())) return x;
  return relative_residual(c, rev, candidate) <= relative_residual(c, rev, x) ? candidate : x;
}

// Taylor coefficients of p at z0 (ascending), with the matching magnitude
// bounds sum_i binom(i, j) |c_i| |z0|^(i-j), by repeated synthetic division.
void taylor_shift(const Eigen::VectorXcd& c, cplx z0, Eigen::VectorXcd& a, Eigen::VectorXd& bound) {
  const Eigen::Index d = c.size() - 1;
  a = c;
  bound = c.cwiseAbs();
  const double az = std::abs(z0);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = d - 1; i >= j; --i) {
      a[i] += z0 * a[i + 1];
      bound[i] += az * bound[i + 1];
    }
}

// Roots of a k-fold zero scatter by ~eps^(1/k) while their mean stays
// accurate. A cluster is replaced by its mean when p and its first k - 1
// derivatives vanish there to working precision.
constexpr double kMultipleRootTol = 1e-12;
constexpr double kFinestClusterRadius = 1e-6;

Vec3 root_point(cplx x) {
  const double theta = 2.0 * std::atan(std::abs(x));
  const double phi = std::arg(x);
  return Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
}

bool is_multiple_root(const Eigen::VectorXcd& c, const Eigen::VectorXcd& rev, std::span<const cplx> cluster,
                      cplx& merged) {
  cplx mean_x = 0.0, mean_w = 0.0;
  double mean_abs = 0.0;
  for (cplx x : cluster) {
    mean_abs += std::abs(x);
    mean_x += x;
    mean_w += 1.0 / x;
  }
  const double k = static_cast<double>(cluster.size());
  const bool inner_chart = mean_abs / k <= 1.0;
  const cplx z0 = inner_chart ? mean_x / k : mean_w / k;
  Eigen::VectorXcd a;
  Eigen::VectorXd bound;
  taylor_shift(inner_chart ? c : rev, z0, a, bound);
  for (std::size_t j = 0; j < cluster.size(); ++j)
    if (std::abs(a[static_cast<Eigen::Index>(j)]) > kMultipleRootTol * bound[static_cast<Eigen::Index>(j)]) return false;
  if (!inner_chart && z0 == cplx(0.0)) return false;
  merged = inner_chart ? z0 : 1.0 / z0;
  return true;
}

void merge_clusters(const Eigen::VectorXcd& c, const Eigen::VectorXcd& rev, std::vector<cplx>& roots,
                    std::vector<std::size_t> idx, double radius) {
  if (idx.size() < 2 || radius < kFinestClusterRadius) return;
  // Single-linkage components at this radius.
  std::vector<int> comp(idx.size(), -1);
  int ncomp = 0;
  for (std::size_t s = 0; s < idx.size(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = ncomp;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < idx.size(); ++v)
        if (comp[v] < 0 && (root_point(roots[idx[u]]) - root_point(roots[idx[v]])).norm() <= radius) {
          comp[v] = ncomp;
          stack.push_back(v);
        }
    }
    ++ncomp;
  }
  for (int g = 0; g < ncomp; ++g) {
    std::vector<std::size_t> members;
    std::vector<cplx> values;
    for (std::size_t s = 0; s < idx.size(); ++s)
      if (comp[s] == g) {
        members.push_back(idx[s]);
        values.push_back(roots[idx[s]]);
      }
    if (members.size() < 2) continue;
    cplx merged;
    if (is_multiple_root(c, rev, values, merged)) {
      for (std::size_t m : members) roots[m] = merged;
    } else {
      merge_clusters(c, rev, roots, std::move(members), 0.5 * radius);
    }
  }
}

}  // namespace

double sqrt_factorial(int k) {
  if (k < 0 || k > kMaxStellarN) throw ResourceLimit("sqrt_factorial: argument outside the precomputed table");
  return kSqrtFactorials[static_cast<std::size_t>(k)];
}

PolynomialCoefficients majorana_polynomial(const SpinState& state) {
  const int n = state.n();
  check_n(n, "majorana_polynomial");
  if (state.is_zero()) throw InvalidInput("majorana_polynomial: zero state");
  PolynomialCoefficients p;
  p.coeffs.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    // Slot k: coefficient of x^(n-k), built from C_{n/2-k}, stored at index n-k.
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    p.coeffs[k] = sign * state.amplitudes[n - k] / (kSqrtFactorials[n - k] * kSqrtFactorials[k]);
  }
  return p;
}

StarSet find_stars(const SpinState& state, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("find_stars: tolerance must be positive");
  const PolynomialCoefficients poly = majorana_polynomial(state);
  const int n = poly.degree_bound();

  // Ascending-power coefficients.
  Eigen::VectorXcd asc(n + 1);
  for (int j = 0; j <= n; ++j) asc[j] = poly.of_power(j);
  const double cmax = asc.cwiseAbs().maxCoeff();
  const double cut = tol * cmax;

  int hi = n, lo = 0;
  int at_infinity = 0, at_zero = 0;
  while (hi > 0 && std::abs(asc[hi]) < cut) {
    --hi;
    ++at_infinity;
  }
  while (lo < hi && std::abs(asc[lo]) < cut) {
    ++lo;
    ++at_zero;
  }
  const int degree = hi - lo;

  StarSet out;
  out.stars.reserve(static_cast<std::size_t>(n));
  out.infinity_count = at_infinity;
  for (int k = 0; k < at_zero; ++k) out.stars.push_back(Direction::north());

  if (degree > 0) {
    const Eigen::VectorXcd c = asc.segment(lo, degree + 1);
    const Eigen::VectorXcd rev = c.reverse();

    // Rescale x = s y so the constant and leading coefficients match in
    // magnitude; the companion matrix is then reasonably balanced.
    const double s = std::pow(std::abs(c[0]) / std::abs(c[degree]), 1.0 / degree);
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    const cplx lead = c[degree] * std::pow(s, degree);
    double sp = 1.0;
    for (int i = 0; i < degree; ++i) {
      companion(i, degree - 1) = -c[i] * sp / lead;
      sp *= s;
      if (i + 1 < degree) companion(i + 1, i) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      std::vector<double> residuals;
      for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        residuals.push_back(relative_residual(c, rev, s * solver.eigenvalues()[i]));
      throw NumericalFailure("find_stars: companion eigenvalue iteration did not converge", residuals);
    }
    std::vector<cplx> roots(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i) roots[static_cast<std::size_t>(i)] = s * solver.eigenvalues()[i];
    std::vector<std::size_t> all(roots.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    merge_clusters(c, rev, roots, all, 0.5);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      // Merged roots are left alone: Newton is unstable at a multiple zero.
      const bool shared = std::count(roots.begin(), roots.end(), roots[i]) > 1;
      const cplx root = shared ? roots[i] : newton_polish(c, rev, roots[i]);
      out.residuals.push_back(relative_residual(c, rev, root));
      const double theta = 2.0 * std::atan(std::abs(root));
      out.stars.emplace_back(theta, std::arg(root));
    }
  }
  for (int k = 0; k < at_infinity; ++k) out.stars.push_back(Direction::south());
  return out;
}

SpinState state_from_stars(std::span<const Direction> stars) {
  const int n = static_cast<int>(stars.size());
  if (n == 0) throw InvalidInput("state_from_stars: empty constellation");
  check_n(n, "state_from_stars");

  // poly[j] multiplies a^j b^(n-j) in the product of creation operators.
  Eigen::VectorXcd poly = Eigen::VectorXcd::Zero(n + 1);
  poly[0] = 1.0;
  int deg = 0;
  for (const Direction& d : stars) {
    const double ca = std::cos(0.5 * d.theta());
    const cplx cb = std::sin(0.5 * d.theta()) * std::polar(1.0, d.phi());
    for (int j = deg + 1; j >= 0; --j) {
      cplx v = (j <= deg) ? cb * poly[j] : cplx(0.0);
      if (j > 0) v += ca * poly[j - 1];
      poly[j] = v;
    }
    ++deg;
  }
  Eigen::VectorXcd amps(n + 1);
  for (int j = 0; j <= n; ++j) amps[j] = poly[j] * kSqrtFactorials[j] * kSqrtFactorials[n - j];
  return SpinState(amps).normalized();
}

StarSet generic_state_stars(std::span<const cplx> amplitudes, double tol) {
  if (amplitudes.size() < 2) throw InvalidInput("generic_state_stars: need dimension >= 2");
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(amplitudes.size()));
  for (std::size_t i = 0; i < amplitudes.size(); ++i) amps[static_cast<Eigen::Index>(i)] = amplitudes[i];
  // Basis |m>, m = 1..n, maps onto |J, J+m'> of spin (n-1)/2 with stored
  // index m - 1, which reproduces the generic-state polynomial exactly.
  return find_stars(SpinState(std::move(amps)), tol);
}

}  // namespace majorana
