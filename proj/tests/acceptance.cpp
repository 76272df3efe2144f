// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ncps/algebra.hpp"
#include "ncps/analytic.hpp"
#include "ncps/composite.hpp"
#include "ncps/dynamics.hpp"

using namespace ncps;

namespace {

std::mt19937_64 rng(314159);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::vector<Particle> random_particles(std::size_t n) {
  std::vector<Particle> out;
  for (std::size_t a = 0; a < n; ++a) out.push_back({uniform(0.1, 10.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0)});
  return out;
}

std::vector<Particle> conditioned_particles(std::size_t n, double alpha, double gamma) {
  std::vector<Particle> out;
  for (std::size_t a = 0; a < n; ++a) {
    const double m = uniform(0.1, 10.0);
    out.push_back({m, gamma / m, alpha * m});
  }
  return out;
}

SystemState random_state(std::size_t n) {
  SystemState s = SystemState::zeros(n);
  for (Eigen::Index i = 0; i < s.z().size(); ++i) s.z()[i] = uniform(-1.0, 1.0);
  return s;
}

// Plain sin/cos form of the free-particle solution (eta != 0).
Vec2 raw_position(double m, double eta, const Vec2& x0, const Vec2& v0, double t) {
  const double r = m / eta, w = eta / m;
  return {v0[0] * r * std::sin(w * t) - v0[1] * r * std::cos(w * t) + v0[1] * r + x0[0],
          v0[1] * r * std::sin(w * t) + v0[0] * r * std::cos(w * t) - v0[0] * r + x0[1]};
}

Vec2 raw_velocity(double m, double eta, const Vec2& v0, double t) {
  const double w = eta / m;
  return {v0[0] * std::cos(w * t) + v0[1] * std::sin(w * t), v0[1] * std::cos(w * t) - v0[0] * std::sin(w * t)};
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] AC%-2d %-34s %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double max_dev(double acc, double v) { return std::max(acc, std::abs(v)); }

// ---------------------------------------------------------------------------

Outcome bracket_algebra() {
  double antisym = 0.0, mismatch = 0.0, jacobi = 0.0;
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    for (int trial = 0; trial < 25; ++trial) {
      const auto ps = random_particles(n);
      const auto omega = build_structure_matrix(ps);
      antisym = std::max(antisym, (omega.dense() + omega.dense().transpose()).cwiseAbs().maxCoeff());
      const auto probes = canonical_probes(n);
      const auto state = random_state(n);
      for (std::size_t i = 0; i < 4 * n; ++i) {
        for (std::size_t j = 0; j < 4 * n; ++j) {
          // Expected bracket of phase variables i, j, written out per block.
          double expected = 0.0;
          if (i / 4 == j / 4) {
            const auto& p = ps[i / 4];
            const std::size_t u = i % 4, v = j % 4;
            if (u == 0 && v == 1) expected = p.theta;
            if (u == 1 && v == 0) expected = -p.theta;
            if (u == 2 && v == 3) expected = p.eta;
            if (u == 3 && v == 2) expected = -p.eta;
            if ((u == 0 && v == 2) || (u == 1 && v == 3)) expected = 1.0;
            if ((u == 2 && v == 0) || (u == 3 && v == 1)) expected = -1.0;
          }
          mismatch = std::max(mismatch, std::abs(poisson_bracket(probes[i], probes[j], state, omega) - expected));
        }
      }
      if (trial < 3) jacobi = std::max(jacobi, check_algebra(omega, probes, state, 1e-12).max_jacobi);
    }
  }
  return {antisym == 0.0 && mismatch == 0.0 && jacobi < 1e-12,
          fmt("antisymmetry=%.1e bracket_mismatch=%.1e jacobi=%.1e", antisym, mismatch, jacobi)};
}

Outcome closed_form() {
  double worst = 0.0;
  const Vec2 x0{0.3, -0.2}, v0{1.0, 0.5};
  for (double m : {0.5, 1.0, 2.0}) {
    for (double eta : {0.0, 1e-6, 0.1, 1.0}) {
      const std::vector<Particle> ps{{m, 0.0, eta}};
      SystemState init = SystemState::zeros(1);
      init.set_particle(0, x0[0], x0[1], m * v0[0], m * v0[1]);
      const auto traj = integrate(Hamiltonian::free_system(ps), init, build_structure_matrix(ps), 1e-3, 10000);
      for (const auto& s : traj.samples) {
        const auto e = free_particle_state({m, eta, x0, v0}, s.time());
        worst = max_dev(worst, s(0, Component::X1) - e.x[0]);
        worst = max_dev(worst, s(0, Component::X2) - e.x[1]);
        worst = max_dev(worst, s(0, Component::P1) / m - e.v[0]);
        worst = max_dev(worst, s(0, Component::P2) / m - e.v[1]);
      }
    }
  }
  double line = 0.0;
  for (double m : {0.5, 1.0, 2.0}) {
    for (int k = 0; k <= 1000; ++k) {
      const double t = 0.01 * k;
      const auto e = free_particle_state({m, 0.0, x0, v0}, t);
      line = max_dev(line, e.x[0] - (x0[0] + v0[0] * t));
      line = max_dev(line, e.x[1] - (x0[1] + v0[1] * t));
      line = max_dev(line, e.v[0] - v0[0]);
      line = max_dev(line, e.v[1] - v0[1]);
    }
  }
  return {worst < 1e-6 && line < 1e-12, fmt("rk4_vs_closed_form=%.2e straight_line=%.2e", worst, line)};
}

Outcome fly_apart() {
  const std::vector<Particle> ps{{1.0, 0.0, 0.1}, {2.0, 0.0, 0.1}};
  const Vec2 v0{1.0, 0.0};
  double min_metric = 1e300, mismatch = 0.0;
  for (int k = 1; k <= 500; ++k) {
    const double t = 0.01 * k;
    const double metric = fly_apart_metric(ps, v0, t);
    const double oracle = (raw_velocity(1.0, 0.1, v0, t) - raw_velocity(2.0, 0.1, v0, t)).norm();
    min_metric = std::min(min_metric, metric);
    mismatch = std::max(mismatch, std::abs(metric - oracle));
  }
  return {min_metric > 0.0 && mismatch <= 1e-12, fmt("min_gap_on_(0,5]=%.3e oracle_mismatch=%.1e", min_metric, mismatch)};
}

Outcome common_motion() {
  const double alpha = 0.1;
  const std::vector<Particle> ps{{1.0, 0.0, alpha * 1.0}, {2.0, 0.0, alpha * 2.0}, {3.5, 0.0, alpha * 3.5}};
  const std::vector<Vec2> x0{{0.0, 0.0}, {1.0, 2.0}, {-1.0, 0.5}};
  const Vec2 v0{1.0, -0.5};
  double gap = 0.0, rel_drift = 0.0, path_gap = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double t = 0.05 * k;
    gap = std::max(gap, fly_apart_metric(ps, v0, t));
    for (std::size_t a = 0; a < ps.size(); ++a) {
      rel_drift = std::max(rel_drift, (relative_trajectory(ps, v0, x0, a, t) - relative_trajectory(ps, v0, x0, a, 0.0))
                                          .cwiseAbs()
                                          .maxCoeff());
      const Vec2 xa = free_particle_state({ps[a].mass, ps[a].eta, {0, 0}, v0}, t).x;
      const Vec2 x_ref = free_particle_state({ps[0].mass, ps[0].eta, {0, 0}, v0}, t).x;
      path_gap = std::max(path_gap, (xa - x_ref).cwiseAbs().maxCoeff());
    }
  }
  return {gap <= 1e-12 && rel_drift <= 1e-12 && path_gap <= 1e-12,
          fmt("velocity_gap=%.1e relative_drift=%.1e path_gap=%.1e", gap, rel_drift, path_gap)};
}

double find(const BracketReport& r, const std::string& lhs, const std::string& rhs) {
  for (const auto& row : r.rows) {
    if (row.lhs == lhs && row.rhs == rhs) return row.computed;
  }
  throw std::runtime_error("missing bracket row " + lhs + "," + rhs);
}

Outcome bracket_table_check() {
  double table = 0.0, printed = 0.0, cross = 0.0;
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto ps = random_particles(n);
      const auto report = bracket_table(ps, 1e-10);
      table = std::max(table, report.max_abs_diff);

      // Printed relations, recomputed from scratch.
      double M = 0, msq_theta = 0, eta_sum = 0;
      for (const auto& p : ps) {
        M += p.mass;
        msq_theta += p.mass * p.mass * p.theta;
        eta_sum += p.eta;
      }
      const double theta_t = msq_theta / (M * M);
      printed = max_dev(printed, find(report, "Xcm1", "Xcm2") - theta_t);
      printed = max_dev(printed, find(report, "Pcm1", "Pcm2") - eta_sum);
      printed = max_dev(printed, find(report, "Xcm1", "Pcm1") - 1.0);
      for (std::size_t a = 0; a < n; ++a) {
        const std::string sa = "[" + std::to_string(a) + "]";
        const double mu_a = ps[a].mass / M;
        printed = max_dev(printed, find(report, "Xcm1", "dX2" + sa) - (mu_a * ps[a].theta - theta_t));
        printed = max_dev(printed, find(report, "Xcm2", "dX1" + sa) + (mu_a * ps[a].theta - theta_t));
        printed = max_dev(printed, find(report, "Pcm1", "dP2" + sa) - (ps[a].eta - mu_a * eta_sum));
        printed = max_dev(printed, find(report, "Pcm2", "dP1" + sa) + (ps[a].eta - mu_a * eta_sum));
        for (std::size_t b = 0; b < n; ++b) {
          const std::string sb = "[" + std::to_string(b) + "]";
          const double mu_b = ps[b].mass / M;
          const double d = a == b ? 1.0 : 0.0;
          const double xx = d * ps[a].theta - mu_a * ps[a].theta - mu_b * ps[b].theta + theta_t;
          const double pp = d * ps[a].eta - mu_b * ps[a].eta - mu_a * ps[b].eta + mu_a * mu_b * eta_sum;
          printed = max_dev(printed, find(report, "dX1" + sa, "dX2" + sb) - xx);
          printed = max_dev(printed, find(report, "dX2" + sa, "dX1" + sb) + xx);
          printed = max_dev(printed, find(report, "dP1" + sa, "dP2" + sb) - pp);
          printed = max_dev(printed, find(report, "dP2" + sa, "dP1" + sb) + pp);
        }
      }

      const auto cond = bracket_table(conditioned_particles(n, uniform(-1, 1), uniform(-1, 1)), 1e-10);
      table = std::max(table, cond.max_abs_diff);
      cross = std::max(cross, cond.max_cross_magnitude);
    }
  }
  return {table <= 1e-10 && printed <= 1e-10 && cross <= 1e-12,
          fmt("table_max_diff=%.1e printed_formulas=%.1e cross_under_conditions=%.1e", table, printed, cross)};
}

Outcome conservation() {
  // Traditional momentum along a free trajectory without the conditions.
  const std::vector<Particle> ps{{1.0, 0.3, 0.2}, {2.0, 0.1, 0.5}, {0.7, -0.4, -0.1}};
  const auto omega = build_structure_matrix(ps);
  const auto h = Hamiltonian::free_system(ps);
  const auto traj = integrate(h, random_state(3), omega, 1e-3, 3000);
  double formula_vs_bracket = 0.0;
  for (const auto& s : traj.samples) {
    formula_vs_bracket = std::max(formula_vs_bracket, traditional_momentum_drift(s, ps, h).max_abs_diff());
  }
  // Integrated drift of the traditional momentum against its rate, sum eta_a * (x2_a, -x1_a) displacement.
  const auto& first = traj.samples.front();
  for (const auto& s : traj.samples) {
    double p1 = 0, p2 = 0, pred1 = 0, pred2 = 0;
    for (std::size_t a = 0; a < ps.size(); ++a) {
      p1 += s(a, Component::P1) - first(a, Component::P1);
      p2 += s(a, Component::P2) - first(a, Component::P2);
      pred1 += ps[a].eta * (s(a, Component::X2) - first(a, Component::X2));
      pred2 -= ps[a].eta * (s(a, Component::X1) - first(a, Component::X1));
    }
    formula_vs_bracket = std::max({formula_vs_bracket, std::abs(p1 - pred1), std::abs(p2 - pred2)});
  }
  const double ptilde_drift = std::max(
      monitor_observable(traj, composite_observable({CompositeKind::CmMomentum, 0, 1}, ps)).max_drift,
      monitor_observable(traj, composite_observable({CompositeKind::CmMomentum, 0, 2}, ps)).max_drift);

  // Primed momenta under both conditions.
  double primed_drift = 0.0, primed_bracket = 0.0;
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    const auto cps = conditioned_particles(n, uniform(-1, 1), uniform(-1, 1));
    const auto comega = build_structure_matrix(cps);
    const auto ch = Hamiltonian::free_system(cps);
    for (auto method : {Method::Rk4, Method::ImplicitMidpoint}) {
      const auto ctraj = integrate(ch, random_state(n), comega, 1e-3, 3000, method);
      primed_drift = std::max({primed_drift,
                               monitor_observable(ctraj, composite_observable({CompositeKind::PrimedMomentum, 0, 1}, cps)).max_drift,
                               monitor_observable(ctraj, composite_observable({CompositeKind::PrimedMomentum, 0, 2}, cps)).max_drift});
    }
    for (int k = 0; k < 20; ++k) {
      const auto s = random_state(n);
      for (int i : {1, 2}) {
        primed_bracket = max_dev(primed_bracket, poisson_bracket(composite_observable({CompositeKind::PrimedMomentum, 0, i}, cps),
                                                                 ch.observable(), s, comega));
      }
    }
  }
  return {formula_vs_bracket <= 1e-10 && ptilde_drift > 1e-6 && primed_drift < 1e-8 && primed_bracket <= 1e-10,
          fmt("formula_vs_bracket=%.1e traditional_drift=%.2e ", formula_vs_bracket, ptilde_drift) +
              fmt("primed_drift=%.1e primed_bracket=%.1e", primed_drift, primed_bracket)};
}

Outcome conjugate_coordinates() {
  double worst = 0.0;
  int cases = 0;
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    while (cases < static_cast<int>(n) * 40) {
      const auto ps = random_particles(n);
      const auto eff = effective_params(ps);
      const double te = eff.theta_tilde * eff.eta_tilde;
      if (std::abs(te) > 0.5) continue;
      ++cases;
      const auto omega = build_structure_matrix(ps);
      const auto s = random_state(n);
      auto br = [&](CompositeKind k1, int i, CompositeKind k2, int j) {
        return poisson_bracket(composite_observable({k1, 0, i}, ps), composite_observable({k2, 0, j}, ps), s, omega);
      };
      const auto X = CompositeKind::ConjugateCoordinate;
      const auto P = CompositeKind::PrimedMomentum;
      for (int i : {1, 2}) {
        for (int j : {1, 2}) worst = max_dev(worst, br(X, i, P, j) - (i == j ? 1.0 : 0.0));
      }
      worst = max_dev(worst, br(X, 1, X, 2) - eff.theta_tilde / ((1 - te) * (1 - te)));
      worst = max_dev(worst, br(P, 1, P, 2) - eff.eta_tilde * (te - 1));
      worst = std::max(worst, primed_bracket_table(ps, 1e-10).max_abs_diff);
    }
  }
  return {worst <= 1e-10, fmt("cases=%.0f max_diff=%.1e", cases, worst)};
}

Outcome magnetic() {
  double worst = 0.0;
  int grids = 0;
  for (double theta : {-1.0, -0.3, 0.0, 0.3, 1.0, 2.0}) {
    for (double eta : {-1.0, -0.2, 0.0, 0.2, 0.5, 1.0}) {
      if (eta * theta == 1.0) continue;
      ++grids;
      const double m = uniform(0.1, 10.0);
      const auto hm = magnetic_hamiltonian(m, theta, eta);
      const auto hf = Hamiltonian::free_single(m);
      for (int k = 0; k < 1000; ++k) {
        const auto s = random_state(1);
        worst = max_dev(worst, hm.value(to_primed_variables(s, theta, eta)) - hf.value(s));
      }
    }
  }
  return {worst <= 1e-12, fmt("grid_points=%.0f states_each=1000 max_diff=%.1e", grids, worst)};
}

Outcome limits() {
  double worst = 0.0;
  for (double scale : {1e-14, 1e-15, 0.0}) {
    for (std::size_t n : {1u, 2u, 3u, 5u}) {
      std::vector<Particle> ps;
      for (std::size_t a = 0; a < n; ++a) ps.push_back({uniform(0.1, 10.0), scale * uniform(-1, 1), scale * uniform(-1, 1)});
      const auto omega = build_structure_matrix(ps);
      const auto s = random_state(n);
      const auto d = cm_decompose(s, ps);
      worst = std::max(worst, (conjugate_cm_coords(s, ps) - d.cm_x).cwiseAbs().maxCoeff());
      worst = std::max(worst, (primed_momenta(s, ps) - d.cm_p).cwiseAbs().maxCoeff());
      const auto X = CompositeKind::ConjugateCoordinate;
      const auto P = CompositeKind::PrimedMomentum;
      for (auto k1 : {X, P}) {
        for (auto k2 : {X, P}) {
          for (int i : {1, 2}) {
            for (int j : {1, 2}) {
              const double canonical = (k1 == X && k2 == P && i == j) ? 1.0 : (k1 == P && k2 == X && i == j) ? -1.0 : 0.0;
              const double b = poisson_bracket(composite_observable({k1, 0, i}, ps), composite_observable({k2, 0, j}, ps), s, omega);
              worst = max_dev(worst, b - canonical);
            }
          }
        }
      }
    }
  }
  return {worst <= 1e-12, fmt("max_deviation_from_traditional=%.1e", worst)};
}

Outcome integrator_order() {
  const std::vector<Particle> ps{{1.0, 0.0, 1.0}};
  const auto omega = build_structure_matrix(ps);
  SystemState init = SystemState::zeros(1);
  init.set_particle(0, 0.0, 0.0, 1.0, 0.0);
  auto error = [&](double step, std::size_t n) {
    const auto traj = integrate(Hamiltonian::free_system(ps), init, omega, step, n);
    double worst = 0.0;
    for (const auto& s : traj.samples) {
      // Independent oracle: plain sin/cos solution.
      const Vec2 x = raw_position(1.0, 1.0, {0, 0}, {1, 0}, s.time());
      worst = max_dev(worst, s(0, Component::X1) - x[0]);
      worst = max_dev(worst, s(0, Component::X2) - x[1]);
    }
    return worst;
  };
  const double coarse = error(0.1, 100);
  const double fine = error(0.05, 200);
  const double ratio = coarse / fine;
  return {ratio >= 14.0 && ratio <= 18.0, fmt("err(0.1)=%.3e err(0.05)=%.3e ratio=%.3f", coarse, fine, ratio)};
}

}  // namespace

int main() {
  run(1, "bracket algebra", bracket_algebra);
  run(2, "closed-form correctness", closed_form);
  run(3, "mass dependence / fly-apart", fly_apart);
  run(4, "conditions restore common motion", common_motion);
  run(5, "bracket table", bracket_table_check);
  run(6, "conservation", conservation);
  run(7, "conjugate coordinates", conjugate_coordinates);
  run(8, "magnetic equivalence", magnetic);
  run(9, "limits", limits);
  run(10, "integrator order", integrator_order);
  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
