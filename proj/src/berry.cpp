#include "majorana/berry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "majorana/correlation.hpp"
#include "majorana/geometry.hpp"
#include "majorana/stellar.hpp"

namespace majorana {

namespace {

// Pairs this close to coincidence (or antipodality) in theta' have no
// usable relative azimuth.
constexpr double kSplitPoleTol = 1e-6;
constexpr double kRigidTol = 1e-8;

// Hungarian algorithm (shortest augmenting paths with potentials) on a
// square cost matrix; returns assignment row -> column.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return assignment;
}

// One step of a loop, with star identities already aligned.
struct StepView {
  std::vector<Direction> from;
  std::vector<Direction> to;
};

// Steps 0..N-1 plus the closing step from sample N back to sample 0
// through the closing permutation.
std::vector<StepView> loop_steps(const LoopTrajectory& loop) {
  if (!loop.matched()) throw InvalidState("loop trajectory has not been matched");
  const auto& s = loop.samples();
  const std::size_t n = static_cast<std::size_t>(loop.n());
  std::vector<StepView> steps;
  steps.reserve(s.size());
  for (std::size_t t = 0; t + 1 < s.size(); ++t) steps.push_back({s[t].stars, s[t + 1].stars});
  StepView closing;
  closing.from = s.back().stars;
  closing.to.resize(n);
  for (std::size_t i = 0; i < n; ++i) closing.to[i] = s.front().stars[static_cast<std::size_t>(loop.closing()[i])];
  steps.push_back(std::move(closing));
  return steps;
}

Vec3 midpoint(const Direction& a, const Direction& b) {
  const Vec3 m = a.cartesian() + b.cartesian();
  const double r = m.norm();
  return r > 0.0 ? Vec3(m / r) : a.cartesian();
}

// dphi'_{i(j)} + dphi'_{j(i)} across one step. Returns nullopt when the pair
// is (nearly) coincident at either end.
std::optional<double> relative_step(const Direction& ai, const Direction& aj, const Direction& bi,
                                    const Direction& bj) {
  const RelativeFrame fa = relative_coordinates(ai, aj);
  const RelativeFrame fb = relative_coordinates(bi, bj);
  if (fa.theta_prime < kSplitPoleTol || fb.theta_prime < kSplitPoleTol) return std::nullopt;
  if (kPi - fa.theta_prime < kSplitPoleTol || kPi - fb.theta_prime < kSplitPoleTol) {
    // Relative azimuth undefined at the antipode; use the closed form of
    // its increment at the step midpoint.
    const SphericalStep si(ai, bi), sj(aj, bj);
    const Direction mi(si.theta_mid(), si.phi_mid()), mj(sj.theta_mid(), sj.phi_mid());
    return relative_azimuth_increment(mi, mj, si.dtheta, si.dphi, sj.dtheta, sj.dphi);
  }
  const RelativeFrame ga = relative_coordinates(aj, ai);
  const RelativeFrame gb = relative_coordinates(bj, bi);
  return wrap_pi(fb.phi_prime - fa.phi_prime) + wrap_pi(gb.phi_prime - ga.phi_prime);
}

double absolute_step(const Direction& ai, const Direction& aj, const Direction& bi, const Direction& bj) {
  const SphericalStep si(ai, bi), sj(aj, bj);
  return std::cos(si.theta_mid()) * si.dphi + std::cos(sj.theta_mid()) * sj.dphi;
}

std::vector<PairPhase> empty_pairs(int n) {
  std::vector<PairPhase> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back(PairPhase{i, j});
  return pairs;
}

Eigen::Matrix3d rotation_from_pole(const Direction& target) { return rotation_to_pole(target).transpose(); }

}  // namespace

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

std::vector<int> match_stars(const StarSet& prev, const StarSet& next, double bound, std::size_t step) {
  const int n = static_cast<int>(prev.size());
  if (static_cast<int>(next.size()) != n) throw InvalidInput("match_stars: constellations differ in size");
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost(i, j) = (prev[static_cast<std::size_t>(i)].cartesian() - next[static_cast<std::size_t>(j)].cartesian()).norm();

  std::vector<int> p = n > 0 ? hungarian(cost) : std::vector<int>{};

  // Prefer the lexicographically smallest optimal permutation: undo
  // inversions whose swap does not raise the cost.
  const double eps = 1e-14;
  for (bool changed = true; changed;) {
    changed = false;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const int pa = p[static_cast<std::size_t>(a)], pb = p[static_cast<std::size_t>(b)];
        if (pa > pb && cost(a, pb) + cost(b, pa) <= cost(a, pa) + cost(b, pb) + eps) {
          std::swap(p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(b)]);
          changed = true;
        }
      }
  }

  for (int i = 0; i < n; ++i) {
    const double c = cost(i, p[static_cast<std::size_t>(i)]);
    if (c > bound) {
      std::ostringstream os;
      os << "match_stars: star " << i << " moves " << c << " (chordal) at step " << step
         << ", above the continuity bound " << bound;
      throw Discontinuity(os.str(), step);
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// LoopTrajectory
// ---------------------------------------------------------------------------

LoopTrajectory LoopTrajectory::from_star_sets(std::vector<StarSet> samples) {
  if (samples.size() < 3) throw InvalidInput("LoopTrajectory: need at least three samples");
  const std::size_t n = samples.front().size();
  if (n == 0) throw InvalidInput("LoopTrajectory: empty constellation");
  for (const auto& s : samples)
    if (s.size() != n) throw InvalidInput("LoopTrajectory: star count changes along the loop");
  LoopTrajectory loop;
  loop.samples_ = std::move(samples);
  return loop;
}

LoopTrajectory LoopTrajectory::from_states(std::vector<SpinState> states, double tol) {
  std::vector<StarSet> samples;
  samples.reserve(states.size());
  for (const auto& s : states) samples.push_back(find_stars(s, tol));
  LoopTrajectory loop = from_star_sets(std::move(samples));
  loop.states_ = std::move(states);
  return loop;
}

int LoopTrajectory::n() const { return samples_.empty() ? 0 : static_cast<int>(samples_.front().size()); }

void LoopTrajectory::match(double continuity_bound) {
  for (std::size_t t = 1; t < samples_.size(); ++t) {
    const std::vector<int> p = match_stars(samples_[t - 1], samples_[t], continuity_bound, t);
    StarSet aligned = samples_[t];
    for (std::size_t i = 0; i < p.size(); ++i) aligned.stars[i] = samples_[t].stars[static_cast<std::size_t>(p[i])];
    samples_[t].stars = std::move(aligned.stars);
  }
  assume_matched(continuity_bound);
}

void LoopTrajectory::assume_matched(double continuity_bound) {
  if (samples_.size() < 3) throw InvalidInput("LoopTrajectory: need at least three samples");
  closing_ = match_stars(samples_.back(), samples_.front(), continuity_bound, samples_.size() - 1);
  matched_ = true;
}

std::vector<Direction> LoopTrajectory::star_path(int i) const {
  std::vector<Direction> path;
  path.reserve(samples_.size());
  for (const auto& s : samples_) path.push_back(s.stars.at(static_cast<std::size_t>(i)));
  return path;
}

LoopTrajectory LoopTrajectory::reversed() const {
  LoopTrajectory r;
  r.samples_.assign(samples_.rbegin(), samples_.rend());
  r.states_.assign(states_.rbegin(), states_.rend());
  return r;
}

// ---------------------------------------------------------------------------
// Phase components
// ---------------------------------------------------------------------------

SolidAnglePhase gamma_zero(const LoopTrajectory& loop) {
  const auto steps = loop_steps(loop);
  const std::size_t n = static_cast<std::size_t>(loop.n());
  SolidAnglePhase out;
  out.solid_angles.assign(n, 0.0);
  for (const auto& st : steps)
    for (std::size_t i = 0; i < n; ++i) {
      const SphericalStep s(st.from[i], st.to[i]);
      out.solid_angles[i] += (1.0 - std::cos(s.theta_mid())) * s.dphi;
    }
  for (double omega : out.solid_angles) out.gamma -= 0.5 * omega;
  return out;
}

CorrelationPhase gamma_correlation(const LoopTrajectory& loop) {
  const auto steps = loop_steps(loop);
  const int n = loop.n();
  CorrelationPhase out;
  out.pairs = empty_pairs(n);
  if (n < 2) return out;
  std::vector<Vec3> mid(static_cast<std::size_t>(n)), du(static_cast<std::size_t>(n));
  for (const auto& st : steps) {
    for (std::size_t i = 0; i < mid.size(); ++i) {
      mid[i] = midpoint(st.from[i], st.to[i]);
      du[i] = st.to[i].cartesian() - st.from[i].cartesian();
    }
    const CorrelationTable table = correlation_table(std::span<const Vec3>(mid));
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++k) {
        const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
        out.pairs[k].gamma_c += 0.5 * weighted_pair_increment(mid[ui], mid[uj], du[ui], du[uj], table.beta_over_d(i, j));
      }
  }
  for (const auto& p : out.pairs) out.gamma += p.gamma_c;
  return out;
}

RelativeAbsoluteSplit gamma_relative_absolute(const LoopTrajectory& loop) {
  const auto steps = loop_steps(loop);
  const int n = loop.n();
  RelativeAbsoluteSplit out;
  out.pairs = empty_pairs(n);
  if (n < 2) return out;
  std::vector<Vec3> mid(static_cast<std::size_t>(n));
  for (const auto& st : steps) {
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = midpoint(st.from[i], st.to[i]);
    const CorrelationTable table = correlation_table(std::span<const Vec3>(mid));
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++k) {
        PairPhase& pp = out.pairs[k];
        if (pp.excluded) continue;
        const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
        const auto rel = relative_step(st.from[ui], st.from[uj], st.to[ui], st.to[uj]);
        if (!rel) {
          pp.excluded = true;
          pp.gamma_r = pp.gamma_a = 0.0;
          continue;
        }
        const double b = table.beta(i, j);
        pp.gamma_r += 0.5 * b * *rel;
        pp.gamma_a += 0.5 * b * absolute_step(st.from[ui], st.from[uj], st.to[ui], st.to[uj]);
      }
  }
  for (const auto& p : out.pairs) {
    if (p.excluded) {
      out.excluded.emplace_back(p.i, p.j);
      continue;
    }
    out.gamma_r += p.gamma_r;
    out.gamma_a += p.gamma_a;
  }
  return out;
}

PhaseBreakdown berry_phase(const LoopTrajectory& loop, bool with_split) {
  PhaseBreakdown out;
  const SolidAnglePhase g0 = gamma_zero(loop);
  const CorrelationPhase gc = gamma_correlation(loop);
  out.gamma_0 = g0.gamma;
  out.gamma_c = gc.gamma;
  out.gamma_total = out.gamma_0 + out.gamma_c;
  out.per_star_solid_angles = g0.solid_angles;
  out.per_pair = gc.pairs;
  if (with_split) {
    const RelativeAbsoluteSplit split = gamma_relative_absolute(loop);
    out.split_computed = true;
    out.gamma_r = split.gamma_r;
    out.gamma_a = split.gamma_a;
    out.excluded_pairs = split.excluded;
    for (std::size_t k = 0; k < out.per_pair.size(); ++k) {
      out.per_pair[k].gamma_r = split.pairs[k].gamma_r;
      out.per_pair[k].gamma_a = split.pairs[k].gamma_a;
      out.per_pair[k].excluded = split.pairs[k].excluded;
    }
  }
  out.gamma_total_mod = wrap_pi(out.gamma_total);
  out.gamma_0_mod = wrap_pi(out.gamma_0);
  out.gamma_c_mod = wrap_pi(out.gamma_c);
  return out;
}

RigidPairReport rigid_body_pair_angle(const LoopTrajectory& loop, int i, int j) {
  const int n = loop.n();
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw InvalidInput("rigid_body_pair_angle: bad pair indices");
  const auto steps = loop_steps(loop);
  const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);

  const auto distance = [&](const std::vector<Direction>& s) {
    return 1.0 - s[ui].cartesian().dot(s[uj].cartesian());
  };
  const double d0 = distance(loop.samples().front().stars);
  for (std::size_t t = 0; t < loop.samples().size(); ++t)
    if (std::abs(distance(loop.samples()[t].stars) - d0) > kRigidTol) {
      std::ostringstream os;
      os << "rigid_body_pair_angle: pair distance changes at step " << t;
      throw InvalidState(os.str());
    }

  RigidPairReport r;
  if (d0 <= kDegenerateDistance) return r;

  for (const auto& st : steps) {
    const Vec3 mi = midpoint(st.from[ui], st.to[ui]);
    const Vec3 mj = midpoint(st.from[uj], st.to[uj]);
    r.value += pair_solid_angle_increment(mi, mj, st.to[ui].cartesian() - st.from[ui].cartesian(),
                                          st.to[uj].cartesian() - st.from[uj].cartesian());
    const auto rel = relative_step(st.from[ui], st.from[uj], st.to[ui], st.to[uj]);
    r.relative_sum += rel.value_or(0.0);
    r.absolute_sum += absolute_step(st.from[ui], st.from[uj], st.to[ui], st.to[uj]);
    const SphericalStep si(st.from[ui], st.to[ui]), sj(st.from[uj], st.to[uj]);
    r.omega_i += (1.0 - std::cos(si.theta_mid())) * si.dphi;
    r.omega_j += (1.0 - std::cos(sj.theta_mid())) * sj.dphi;
  }
  const double cos_tp = 1.0 - d0;
  r.relative_solid_angles = (1.0 - cos_tp) * r.relative_sum;
  r.residual_decomposition = r.value - (r.relative_sum + r.absolute_sum);
  r.residual_minus = wrap_pi(r.value - (r.relative_solid_angles / (1.0 - cos_tp) - (r.omega_i + r.omega_j)));
  const double plus_denominator = 1.0 + cos_tp;
  r.residual_plus = plus_denominator <= kDegenerateDistance
                        ? std::numeric_limits<double>::quiet_NaN()
                        : wrap_pi(r.value - (r.relative_solid_angles / plus_denominator - (r.omega_i + r.omega_j)));
  return r;
}

double berry_phase_oracle(std::span<const SpinState> states) {
  if (states.size() < 3) throw InvalidInput("berry_phase_oracle: need at least three states");
  cplx product = 1.0;
  for (std::size_t t = 0; t < states.size(); ++t) {
    const SpinState& a = states[t];
    const SpinState& b = states[(t + 1) % states.size()];
    const cplx overlap = inner(b, a) / (a.norm() * b.norm());
    if (std::abs(overlap) < 1e-6) {
      std::ostringstream os;
      os << "berry_phase_oracle: vanishing overlap between states " << t << " and " << (t + 1) % states.size();
      throw Discontinuity(os.str(), t);
    }
    product *= overlap / std::abs(overlap);
  }
  return wrap_pi(std::arg(product));
}

// ---------------------------------------------------------------------------
// Loop generators
// ---------------------------------------------------------------------------

std::vector<StarSet> rigid_rotation_samples(const StarSet& base, std::span<const Direction> schedule) {
  std::vector<StarSet> out;
  out.reserve(schedule.size());
  for (const Direction& target : schedule) {
    const Eigen::Matrix3d rot = rotation_from_pole(target);
    StarSet s;
    s.stars.reserve(base.size());
    for (const Direction& d : base.stars) s.stars.push_back(Direction::from_cartesian(rot * d.cartesian()));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Direction> latitude_schedule(double theta, double phi_start, double phi_end, std::size_t steps) {
  if (steps == 0) throw InvalidInput("latitude_schedule: need at least one step");
  std::vector<Direction> out;
  out.reserve(steps + 1);
  for (std::size_t t = 0; t <= steps; ++t) {
    const double f = static_cast<double>(t) / static_cast<double>(steps);
    out.emplace_back(theta, phi_start + f * (phi_end - phi_start));
  }
  return out;
}

std::vector<StarSet> random_smooth_samples(int n, std::size_t steps, std::uint64_t seed, double amplitude) {
  if (n < 1 || steps < 3) throw InvalidInput("random_smooth_samples: need n >= 1 and at least three steps");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto random_vec = [&] { return Vec3(gauss(rng), gauss(rng), gauss(rng)); };

  struct Path {
    Vec3 center, a1, b1, a2, b2;
  };
  std::vector<Path> paths;
  for (int k = 0; k < n; ++k) {
    Path p;
    p.center = random_vec().normalized();
    // Keep the perturbation strictly shorter than the unit center so the
    // path never passes through the origin.
    const double s = amplitude / 4.0;
    p.a1 = s * random_vec().normalized();
    p.b1 = s * random_vec().normalized();
    p.a2 = s * random_vec().normalized();
    p.b2 = s * random_vec().normalized();
    paths.push_back(p);
  }
  std::vector<StarSet> out;
  out.reserve(steps + 1);
  for (std::size_t t = 0; t <= steps; ++t) {
    const double phase = kTwoPi * static_cast<double>(t % steps) / static_cast<double>(steps);
    StarSet s;
    for (const Path& p : paths) {
      const Vec3 v = p.center + p.a1 * std::cos(phase) + p.b1 * std::sin(phase) + p.a2 * std::cos(2.0 * phase) +
                     p.b2 * std::sin(2.0 * phase);
      s.stars.push_back(Direction::from_cartesian(v));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace majorana
