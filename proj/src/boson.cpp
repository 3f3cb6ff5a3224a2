#include "majorana/boson.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "majorana/geometry.hpp"

namespace majorana {

Eigen::MatrixXcd build_hamiltonian(const BosonParams& p) {
  if (p.n < 1) throw InvalidInput("build_hamiltonian: n must be >= 1");
  if (!(p.R > 0.0)) throw InvalidInput("build_hamiltonian: R must be > 0");
  const int n = p.n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  const cplx hop = (p.R * std::sin(p.theta) / 4.0) * std::polar(1.0, -p.varphi);
  for (int k = 0; k <= n; ++k) {
    const double jz2 = 2.0 * k - n;
    h(k, k) = p.R * std::cos(p.theta) / 4.0 * jz2 + p.lambda / 4.0 * jz2 * jz2;
    if (k < n) {
      const cplx v = hop * std::sqrt(static_cast<double>((k + 1) * (n - k)));
      h(k + 1, k) = v;
      h(k, k + 1) = std::conj(v);
    }
  }
  return h;
}

ControlLoop ControlLoop::latitude(double theta, std::size_t steps) {
  if (steps < 2) throw InvalidInput("ControlLoop::latitude: need at least two steps");
  ControlLoop loop;
  loop.schedule.reserve(steps + 1);
  for (std::size_t t = 0; t <= steps; ++t)
    loop.schedule.emplace_back(theta, kTwoPi * static_cast<double>(t) / static_cast<double>(steps));
  return loop;
}

std::vector<Direction> ControlLoop::field_directions() const {
  std::vector<Direction> out;
  out.reserve(schedule.size());
  for (const auto& [theta, varphi] : schedule) out.emplace_back(theta, varphi);
  return out;
}

void ControlLoop::validate() const {
  if (schedule.size() < 3) throw InvalidInput("ControlLoop: need at least three samples");
  const auto& [t0, p0] = schedule.front();
  const auto& [t1, p1] = schedule.back();
  if (std::abs(t1 - t0) > 1e-12 || std::abs(wrap_pi(p1 - p0)) > 1e-12)
    throw InvalidInput("ControlLoop: schedule is not closed");
}

EigenTrack eigensystem_track(int n, double R, double lambda, const ControlLoop& loop, int level, double continuity) {
  loop.validate();
  if (level < 0 || level > n) throw InvalidInput("eigensystem_track: level out of range");
  EigenTrack track;
  track.level = level;
  track.min_gap = std::numeric_limits<double>::infinity();
  track.states.reserve(loop.schedule.size());
  track.energies.reserve(loop.schedule.size());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
  Eigen::VectorXcd prev;
  for (std::size_t t = 0; t < loop.schedule.size(); ++t) {
    const auto& [theta, varphi] = loop.schedule[t];
    solver.compute(build_hamiltonian(BosonParams{n, R, theta, varphi, lambda}));
    if (solver.info() != Eigen::Success) {
      std::ostringstream os;
      os << "eigensystem_track: diagonalization failed at step " << t;
      throw Discontinuity(os.str(), t);
    }
    const Eigen::VectorXd& e = solver.eigenvalues();
    const Eigen::MatrixXcd& v = solver.eigenvectors();

    int pick = level;
    Eigen::VectorXcd psi;
    if (t == 0) {
      psi = v.col(pick);
    } else {
      double best = -1.0;
      for (int k = 0; k <= n; ++k) {
        const double ov = std::abs(v.col(k).dot(prev));
        if (ov > best) {
          best = ov;
          pick = k;
        }
      }
      if (best < continuity) {
        std::ostringstream os;
        os << "eigensystem_track: overlap " << best << " below " << continuity << " at step " << t;
        throw Discontinuity(os.str(), t);
      }
      psi = v.col(pick);
      const cplx ov = psi.dot(prev);  // <psi|prev>
      psi *= ov / std::abs(ov);
    }

    double gap = std::numeric_limits<double>::infinity();
    if (pick > 0) gap = std::min(gap, e[pick] - e[pick - 1]);
    if (pick < n) gap = std::min(gap, e[pick + 1] - e[pick]);
    track.min_gap = std::min(track.min_gap, gap);

    track.energies.push_back(e[pick]);
    track.states.emplace_back(psi);
    prev = std::move(psi);
  }
  if (track.min_gap < 1e-6 * R) {
    std::ostringstream os;
    os << "small gap " << track.min_gap << " along the loop";
    track.warnings.push_back(os.str());
  }
  return track;
}

SweepRow sweep_row(int n, const ControlLoop& loop, int level, double lambda_over_R, const SweepOptions& options) {
  SweepRow row;
  row.lambda_over_R = lambda_over_R;
  row.level = level;
  row.m_u = level - 0.5 * n;
  try {
    const EigenTrack track =
        eigensystem_track(n, options.R, lambda_over_R * options.R, loop, level, options.continuity);
    row.min_gap = track.min_gap;
    row.gamma_oracle = berry_phase_oracle(track.states);

    LoopTrajectory traj = LoopTrajectory::from_states(track.states, options.star_tol);
    traj.match(options.continuity_bound);
    const PhaseBreakdown b = berry_phase(traj, true);
    row.gamma_formula = b.gamma_total_mod;
    row.gamma0 = b.gamma_0;
    row.gammaC = b.gamma_c;
    row.gammaR = b.gamma_r;
    row.gammaA = b.gamma_a;
    row.valid = track.min_gap >= 1e-8 * options.R;
    if (!row.valid) row.error = "degenerate levels along the loop";
  } catch (const Error& e) {
    row.valid = false;
    row.error = e.what();
  }
  return row;
}

std::vector<SweepRow> sweep_lambda(int n, const ControlLoop& loop, int level, const std::vector<double>& lambda_over_R,
                                   const SweepOptions& options) {
  loop.validate();
  if (n < 1) throw InvalidInput("sweep_lambda: n must be >= 1");
  std::vector<SweepRow> rows;
  rows.reserve(lambda_over_R.size());
  if (!options.parallel) {
    for (double l : lambda_over_R) rows.push_back(sweep_row(n, loop, level, l, options));
    return rows;
  }
  std::vector<std::future<SweepRow>> jobs;
  jobs.reserve(lambda_over_R.size());
  for (double l : lambda_over_R)
    jobs.push_back(std::async(std::launch::async, [=, &loop] { return sweep_row(n, loop, level, l, options); }));
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

double lambda_zero_reference(int n, int m, const ControlLoop& loop) {
  const std::vector<Direction> dirs = loop.field_directions();
  return (n - 2.0 * m) * loop_solid_angle(dirs);
}

}  // namespace majorana
