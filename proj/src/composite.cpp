#include "ncps/composite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncps/errors.hpp"

namespace ncps {

EffectiveParams effective_params(std::span<const Particle> particles) {
  validate_particles(particles);
  EffectiveParams eff;
  for (const auto& p : particles) eff.total_mass += p.mass;
  eff.mu.reserve(particles.size());
  double weighted_theta = 0.0;
  for (const auto& p : particles) {
    eff.mu.push_back(p.mass / eff.total_mass);
    weighted_theta += p.mass * p.mass * p.theta;
    eff.eta_tilde += p.eta;
  }
  eff.theta_tilde = weighted_theta / (eff.total_mass * eff.total_mass);
  return eff;
}

namespace {

void require_matching(const SystemState& state, std::span<const Particle> particles) {
  validate_particles(particles);
  if (state.particle_count() != particles.size()) {
    throw ConfigError("state has " + std::to_string(state.particle_count()) + " particles, parameter list has " +
                      std::to_string(particles.size()));
  }
}

Vec2 position(const SystemState& s, std::size_t a) { return {s(a, Component::X1), s(a, Component::X2)}; }
Vec2 momentum(const SystemState& s, std::size_t a) { return {s(a, Component::P1), s(a, Component::P2)}; }

}  // namespace

CMDecomposition cm_decompose(const SystemState& state, std::span<const Particle> particles) {
  require_matching(state, particles);
  const auto eff = effective_params(particles);
  const std::size_t n = particles.size();
  CMDecomposition d;
  d.time = state.time();
  for (std::size_t a = 0; a < n; ++a) {
    d.cm_x += eff.mu[a] * position(state, a);
    d.cm_p += momentum(state, a);
  }
  d.rel_x.reserve(n);
  d.rel_p.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    d.rel_x.push_back(position(state, a) - d.cm_x);
    d.rel_p.push_back(momentum(state, a) - eff.mu[a] * d.cm_p);
  }
  return d;
}

SystemState cm_recompose(const CMDecomposition& d, std::span<const Particle> particles) {
  validate_particles(particles);
  if (d.rel_x.size() != particles.size() || d.rel_p.size() != particles.size()) {
    throw ConfigError("decomposition particle count does not match parameter list");
  }
  const auto eff = effective_params(particles);
  SystemState s = SystemState::zeros(particles.size(), d.time);
  for (std::size_t a = 0; a < particles.size(); ++a) {
    const Vec2 x = d.rel_x[a] + d.cm_x;
    const Vec2 p = d.rel_p[a] + eff.mu[a] * d.cm_p;
    s.set_particle(a, x[0], x[1], p[0], p[1]);
  }
  return s;
}

std::string CompositeVariable::name() const {
  const std::string i = std::to_string(component);
  const std::string a = "[" + std::to_string(particle) + "]";
  switch (kind) {
    case CompositeKind::CmCoordinate:
      return "Xcm" + i;
    case CompositeKind::CmMomentum:
      return "Pcm" + i;
    case CompositeKind::RelativeCoordinate:
      return "dX" + i + a;
    case CompositeKind::RelativeMomentum:
      return "dP" + i + a;
    case CompositeKind::PrimedMomentum:
      return "Pprime" + i;
    case CompositeKind::ConjugateCoordinate:
      return "Xprime" + i;
  }
  return "?";
}

namespace {

double conjugate_scale(const EffectiveParams& eff) {
  const double product = eff.eta_tilde * eff.theta_tilde;
  if (std::abs(1.0 - product) < kSingularTolerance) throw SingularParametersError(product);
  return 1.0 / (1.0 - product);
}

Eigen::Index idx(std::size_t particle, Component c) { return static_cast<Eigen::Index>(phase_index(particle, c)); }

}  // namespace

Observable composite_observable(const CompositeVariable& var, std::span<const Particle> particles) {
  if (var.component != 1 && var.component != 2) throw ConfigError("component must be 1 or 2", "component");
  const auto eff = effective_params(particles);
  const std::size_t n = particles.size();
  const Component xi = var.component == 1 ? Component::X1 : Component::X2;
  const Component pi = var.component == 1 ? Component::P1 : Component::P2;
  Vector c = Vector::Zero(static_cast<Eigen::Index>(kPhaseDim * n));

  switch (var.kind) {
    case CompositeKind::CmCoordinate:
      for (std::size_t b = 0; b < n; ++b) c[idx(b, xi)] = eff.mu[b];
      break;
    case CompositeKind::CmMomentum:
      for (std::size_t b = 0; b < n; ++b) c[idx(b, pi)] = 1.0;
      break;
    case CompositeKind::RelativeCoordinate:
      if (var.particle >= n) throw ConfigError("particle index out of range", "particle");
      for (std::size_t b = 0; b < n; ++b) c[idx(b, xi)] = -eff.mu[b];
      c[idx(var.particle, xi)] += 1.0;
      break;
    case CompositeKind::RelativeMomentum:
      if (var.particle >= n) throw ConfigError("particle index out of range", "particle");
      for (std::size_t b = 0; b < n; ++b) c[idx(b, pi)] = -eff.mu[var.particle];
      c[idx(var.particle, pi)] += 1.0;
      break;
    case CompositeKind::PrimedMomentum: {
      // P~'_1 = P~_1 - eta~ X~_2,  P~'_2 = P~_2 + eta~ X~_1
      const Component other = var.component == 1 ? Component::X2 : Component::X1;
      const double sign = var.component == 1 ? -1.0 : 1.0;
      for (std::size_t b = 0; b < n; ++b) {
        c[idx(b, pi)] = 1.0;
        c[idx(b, other)] = sign * eff.eta_tilde * eff.mu[b];
      }
      break;
    }
    case CompositeKind::ConjugateCoordinate: {
      const double scale = conjugate_scale(eff);
      for (std::size_t b = 0; b < n; ++b) c[idx(b, xi)] = eff.mu[b] * scale;
      break;
    }
  }
  return Observable::linear(var.name(), std::move(c));
}

namespace {

bool is_cm(CompositeKind k) { return k == CompositeKind::CmCoordinate || k == CompositeKind::CmMomentum; }
bool is_coordinate(CompositeKind k) {
  return k == CompositeKind::CmCoordinate || k == CompositeKind::RelativeCoordinate;
}

// Levi-Civita symbol on components {1, 2}.
double epsilon(int i, int j) { return i == j ? 0.0 : (i == 1 ? 1.0 : -1.0); }
double kronecker(std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; }

}  // namespace

double predicted_bracket(const CompositeVariable& u, const CompositeVariable& v, std::span<const Particle> particles) {
  for (const auto* w : {&u, &v}) {
    if (w->kind == CompositeKind::PrimedMomentum || w->kind == CompositeKind::ConjugateCoordinate) {
      throw ConfigError("predicted_bracket covers only the traditional center-of-mass and relative variables");
    }
  }
  const auto eff = effective_params(particles);
  const auto& mu = eff.mu;
  const std::size_t a = u.particle;
  const std::size_t b = v.particle;

  const bool u_coord = is_coordinate(u.kind);
  const bool v_coord = is_coordinate(v.kind);

  if (u_coord && v_coord) {
    // {A_i, B_j} = eps_ij * c(A, B)
    double c = 0.0;
    if (is_cm(u.kind) && is_cm(v.kind)) {
      c = eff.theta_tilde;
    } else if (is_cm(u.kind)) {
      c = mu[b] * particles[b].theta - eff.theta_tilde;
    } else if (is_cm(v.kind)) {
      c = mu[a] * particles[a].theta - eff.theta_tilde;
    } else {
      c = kronecker(a, b) * particles[a].theta - mu[a] * particles[a].theta - mu[b] * particles[b].theta +
          eff.theta_tilde;
    }
    return epsilon(u.component, v.component) * c;
  }

  if (!u_coord && !v_coord) {
    // {A_i, B_j} = eps_ij * d(A, B)
    double d = 0.0;
    if (is_cm(u.kind) && is_cm(v.kind)) {
      d = eff.eta_tilde;
    } else if (is_cm(u.kind)) {
      d = particles[b].eta - mu[b] * eff.eta_tilde;
    } else if (is_cm(v.kind)) {
      d = particles[a].eta - mu[a] * eff.eta_tilde;
    } else {
      d = kronecker(a, b) * particles[a].eta - mu[b] * particles[a].eta - mu[a] * particles[b].eta +
          mu[a] * mu[b] * eff.eta_tilde;
    }
    return epsilon(u.component, v.component) * d;
  }

  // Coordinate against momentum: {A_i, B_j} = delta_ij * e(A, B).
  const auto& coord = u_coord ? u : v;
  const auto& mom = u_coord ? v : u;
  double e = 0.0;
  if (is_cm(coord.kind) && is_cm(mom.kind)) {
    e = 1.0;
  } else if (!is_cm(coord.kind) && !is_cm(mom.kind)) {
    e = kronecker(coord.particle, mom.particle) - mu[mom.particle];
  }
  const double value = (u.component == v.component ? 1.0 : 0.0) * e;
  return u_coord ? value : -value;
}

namespace {

std::vector<CompositeVariable> traditional_variables(std::size_t n) {
  std::vector<CompositeVariable> vars;
  for (int i : {1, 2}) vars.push_back({CompositeKind::CmCoordinate, 0, i});
  for (int i : {1, 2}) vars.push_back({CompositeKind::CmMomentum, 0, i});
  for (std::size_t a = 0; a < n; ++a) {
    for (int i : {1, 2}) vars.push_back({CompositeKind::RelativeCoordinate, a, i});
    for (int i : {1, 2}) vars.push_back({CompositeKind::RelativeMomentum, a, i});
  }
  return vars;
}

void add_row(BracketReport& report, std::string lhs, std::string rhs, double computed, double predicted, bool cross) {
  BracketRow row{std::move(lhs), std::move(rhs), computed, predicted, std::abs(computed - predicted), cross, false};
  row.pass = row.abs_diff <= report.tolerance;
  report.max_abs_diff = std::max(report.max_abs_diff, row.abs_diff);
  if (cross) report.max_cross_magnitude = std::max(report.max_cross_magnitude, std::abs(computed));
  report.rows.push_back(std::move(row));
}

}  // namespace

BracketReport bracket_table(std::span<const Particle> particles, double tol) {
  const auto omega = build_structure_matrix(particles);
  // Linear observables have constant gradients, so any phase point will do.
  const SystemState state = SystemState::zeros(particles.size());
  const auto vars = traditional_variables(particles.size());
  std::vector<Observable> obs;
  obs.reserve(vars.size());
  for (const auto& v : vars) obs.push_back(composite_observable(v, particles));

  BracketReport report;
  report.tolerance = tol;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (i == j) continue;
      const double computed = poisson_bracket(obs[i], obs[j], state, omega);
      const double predicted = predicted_bracket(vars[i], vars[j], particles);
      add_row(report, vars[i].name(), vars[j].name(), computed, predicted, is_cm(vars[i].kind) != is_cm(vars[j].kind));
    }
  }
  return report;
}

BracketReport primed_bracket_table(std::span<const Particle> particles, double tol) {
  const auto eff = effective_params(particles);
  const auto omega = build_structure_matrix(particles);
  const SystemState state = SystemState::zeros(particles.size());
  const double one_minus = 1.0 - eff.theta_tilde * eff.eta_tilde;

  const CompositeVariable x1{CompositeKind::ConjugateCoordinate, 0, 1};
  const CompositeVariable x2{CompositeKind::ConjugateCoordinate, 0, 2};
  const CompositeVariable p1{CompositeKind::PrimedMomentum, 0, 1};
  const CompositeVariable p2{CompositeKind::PrimedMomentum, 0, 2};

  struct Expected {
    CompositeVariable lhs;
    CompositeVariable rhs;
    double value;
  };
  const double xx = eff.theta_tilde / (one_minus * one_minus);
  const double pp = eff.eta_tilde * (eff.theta_tilde * eff.eta_tilde - 1.0);
  const Expected expected[] = {
      {x1, p1, 1.0}, {x1, p2, 0.0}, {x2, p1, 0.0}, {x2, p2, 1.0},
      {x1, x2, xx},  {x2, x1, -xx}, {p1, p2, pp},  {p2, p1, -pp},
  };

  BracketReport report;
  report.tolerance = tol;
  for (const auto& e : expected) {
    const double computed = poisson_bracket(composite_observable(e.lhs, particles),
                                            composite_observable(e.rhs, particles), state, omega);
    add_row(report, e.lhs.name(), e.rhs.name(), computed, e.value, false);
  }
  return report;
}

ConditionReport check_conditions(std::span<const Particle> particles, double tol) {
  validate_particles(particles);
  ConditionReport report;
  report.tolerance = tol;
  for (const auto& p : particles) {
    report.alpha_values.push_back(p.eta / p.mass);
    report.gamma_values.push_back(p.theta * p.mass);
  }
  auto evaluate = [tol](const std::vector<double>& values, std::optional<double>& constant) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    const bool ok = (*hi - *lo) <= tol * std::abs(mean);
    if (ok) constant = mean;
    return ok;
  };
  report.eta_condition = evaluate(report.alpha_values, report.alpha);
  report.theta_condition = evaluate(report.gamma_values, report.gamma);
  return report;
}

Vec2 primed_momenta(const SystemState& state, std::span<const Particle> particles) {
  const auto d = cm_decompose(state, particles);
  const double eta_tilde = effective_params(particles).eta_tilde;
  return {d.cm_p[0] - eta_tilde * d.cm_x[1], d.cm_p[1] + eta_tilde * d.cm_x[0]};
}

Vec2 conjugate_cm_coords(const SystemState& state, std::span<const Particle> particles) {
  const auto eff = effective_params(particles);
  const double scale = conjugate_scale(eff);
  return cm_decompose(state, particles).cm_x * scale;
}

double magnetic_field_strength(double theta, double eta) { return eta * (1.0 - eta * theta); }

namespace {

double single_particle_scale(double theta, double eta) {
  const double product = eta * theta;
  if (std::abs(1.0 - product) < kSingularTolerance) throw SingularParametersError(product);
  return 1.0 / (1.0 - product);
}

}  // namespace

Hamiltonian magnetic_hamiltonian(double mass, double theta, double eta) {
  Particle{mass, theta, eta}.validate();
  single_particle_scale(theta, eta);
  return Hamiltonian::magnetic_equivalent(mass, magnetic_field_strength(theta, eta));
}

SystemState to_primed_variables(const SystemState& state, double theta, double eta) {
  if (state.particle_count() != 1) throw ConfigError("primed single-particle variables need exactly one particle");
  const double scale = single_particle_scale(theta, eta);
  const double x1 = state(0, Component::X1);
  const double x2 = state(0, Component::X2);
  SystemState out = SystemState::zeros(1, state.time());
  out.set_particle(0, x1 * scale, x2 * scale, state(0, Component::P1) - eta * x2, state(0, Component::P2) + eta * x1);
  return out;
}

MomentumDrift traditional_momentum_drift(const SystemState& state, std::span<const Particle> particles,
                                         const Hamiltonian& h) {
  require_matching(state, particles);
  if (!h.is_free()) throw ConfigError("traditional momentum drift formula needs the free-system Hamiltonian");
  if (h.masses().size() != particles.size()) throw ConfigError("Hamiltonian particle count does not match");

  const auto eff = effective_params(particles);
  const auto d = cm_decompose(state, particles);
  MomentumDrift drift;
  drift.predicted[0] = eff.eta_tilde * d.cm_p[1] / eff.total_mass;
  drift.predicted[1] = -eff.eta_tilde * d.cm_p[0] / eff.total_mass;
  for (std::size_t a = 0; a < particles.size(); ++a) {
    const double coupling = (particles[a].eta - eff.mu[a] * eff.eta_tilde) / particles[a].mass;
    drift.predicted[0] += d.rel_p[a][1] * coupling;
    drift.predicted[1] -= d.rel_p[a][0] * coupling;
  }

  const auto omega = build_structure_matrix(particles);
  const auto energy = h.observable();
  for (int i : {1, 2}) {
    drift.bracket[i - 1] =
        poisson_bracket(composite_observable({CompositeKind::CmMomentum, 0, i}, particles), energy, state, omega);
  }
  return drift;
}

double fly_apart_metric(std::span<const Particle> particles, const Vec2& v0, double t) {
  const auto v = system_velocities(particles, v0, t);
  double worst = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) {
    for (std::size_t b = a + 1; b < v.size(); ++b) worst = std::max(worst, (v[a] - v[b]).norm());
  }
  return worst;
}

}  // namespace ncps
