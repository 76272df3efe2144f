#include "ncps/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ncps/composite.hpp"
#include "ncps/errors.hpp"

namespace ncps {

PairPotential PairPotential::harmonic(double strength) { return {Kind::Harmonic, strength, 2.0}; }

PairPotential PairPotential::power_law(double strength, double exponent) {
  return {Kind::PowerLaw, strength, exponent};
}

double PairPotential::value(double r) const {
  switch (kind) {
    case Kind::Harmonic:
      return 0.5 * strength * r * r;
    case Kind::PowerLaw:
      return strength * std::pow(r, exponent);
  }
  return 0.0;
}

double PairPotential::derivative(double r) const {
  switch (kind) {
    case Kind::Harmonic:
      return strength * r;
    case Kind::PowerLaw:
      return strength * exponent * std::pow(r, exponent - 1.0);
  }
  return 0.0;
}

std::string_view to_string(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::FreeSingle:
      return "free_single";
    case HamiltonianKind::FreeSystem:
      return "free_system";
    case HamiltonianKind::PairwisePotential:
      return "pairwise_potential";
    case HamiltonianKind::MagneticEquivalent:
      return "magnetic_equivalent";
  }
  return "unknown";
}

namespace {

std::vector<double> masses_of(std::span<const Particle> particles) {
  validate_particles(particles);
  std::vector<double> masses;
  masses.reserve(particles.size());
  for (const auto& p : particles) masses.push_back(p.mass);
  return masses;
}

}  // namespace

Hamiltonian Hamiltonian::free_single(double mass) {
  Particle{mass, 0.0, 0.0}.validate();
  return Hamiltonian(HamiltonianKind::FreeSingle, {mass});
}

Hamiltonian Hamiltonian::free_system(std::span<const Particle> particles) {
  return Hamiltonian(HamiltonianKind::FreeSystem, masses_of(particles));
}

Hamiltonian Hamiltonian::pairwise(std::span<const Particle> particles, PairPotential potential) {
  if (!std::isfinite(potential.strength) || !std::isfinite(potential.exponent)) {
    throw ConfigError("potential parameters must be finite", "potential");
  }
  Hamiltonian h(HamiltonianKind::PairwisePotential, masses_of(particles));
  h.potential_ = potential;
  return h;
}

Hamiltonian Hamiltonian::magnetic_equivalent(double mass, double field) {
  Particle{mass, 0.0, 0.0}.validate();
  if (!std::isfinite(field)) throw ConfigError("field strength must be finite", "field");
  Hamiltonian h(HamiltonianKind::MagneticEquivalent, {mass});
  h.field_ = field;
  return h;
}

void Hamiltonian::check_dimension(const SystemState& state) const {
  if (state.dimension() != dimension()) {
    throw ConfigError("state dimension " + std::to_string(state.dimension()) +
                      " does not match Hamiltonian dimension " + std::to_string(dimension()));
  }
}

double Hamiltonian::value(const SystemState& state) const {
  check_dimension(state);
  const std::size_t n = masses_.size();
  if (kind_ == HamiltonianKind::MagneticEquivalent) {
    const double u = state(0, Component::P1) + field_ * state(0, Component::X2);
    const double w = state(0, Component::P2) - field_ * state(0, Component::X1);
    return (u * u + w * w) / (2.0 * masses_[0]);
  }
  double energy = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double p1 = state(a, Component::P1);
    const double p2 = state(a, Component::P2);
    energy += (p1 * p1 + p2 * p2) / (2.0 * masses_[a]);
  }
  if (potential_) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double d1 = state(a, Component::X1) - state(b, Component::X1);
        const double d2 = state(a, Component::X2) - state(b, Component::X2);
        energy += potential_->value(std::hypot(d1, d2));
      }
    }
  }
  return energy;
}

Vector Hamiltonian::gradient(const SystemState& state) const {
  check_dimension(state);
  const std::size_t n = masses_.size();
  Vector grad = Vector::Zero(static_cast<Eigen::Index>(dimension()));
  if (kind_ == HamiltonianKind::MagneticEquivalent) {
    const double m = masses_[0];
    const double u = state(0, Component::P1) + field_ * state(0, Component::X2);
    const double w = state(0, Component::P2) - field_ * state(0, Component::X1);
    grad[0] = -field_ * w / m;
    grad[1] = field_ * u / m;
    grad[2] = u / m;
    grad[3] = w / m;
    return grad;
  }
  for (std::size_t a = 0; a < n; ++a) {
    grad[static_cast<Eigen::Index>(phase_index(a, Component::P1))] = state(a, Component::P1) / masses_[a];
    grad[static_cast<Eigen::Index>(phase_index(a, Component::P2))] = state(a, Component::P2) / masses_[a];
  }
  if (potential_) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double d1 = state(a, Component::X1) - state(b, Component::X1);
        const double d2 = state(a, Component::X2) - state(b, Component::X2);
        double f1 = 0.0;
        double f2 = 0.0;
        if (potential_->kind == PairPotential::Kind::Harmonic) {
          f1 = potential_->strength * d1;
          f2 = potential_->strength * d2;
        } else {
          const double r = std::hypot(d1, d2);
          const double scale = potential_->derivative(r) / r;
          f1 = scale * d1;
          f2 = scale * d2;
        }
        grad[static_cast<Eigen::Index>(phase_index(a, Component::X1))] += f1;
        grad[static_cast<Eigen::Index>(phase_index(a, Component::X2))] += f2;
        grad[static_cast<Eigen::Index>(phase_index(b, Component::X1))] -= f1;
        grad[static_cast<Eigen::Index>(phase_index(b, Component::X2))] -= f2;
      }
    }
  }
  return grad;
}

Observable Hamiltonian::observable() const {
  return Observable(
      "H", [h = *this](const SystemState& s) { return h.value(s); },
      [h = *this](const SystemState& s) { return h.gradient(s); });
}

Vector eom_rhs(const Hamiltonian& h, const SystemState& state, const StructureMatrix& omega) {
  if (h.dimension() != omega.dimension()) {
    throw ConfigError("Hamiltonian and structure matrix dimensions differ");
  }
  Vector rhs = omega.apply(h.gradient(state));
  for (Eigen::Index i = 0; i < rhs.size(); ++i) {
    if (!std::isfinite(rhs[i])) throw NumericError("non-finite equation-of-motion component", static_cast<std::size_t>(i));
  }
  return rhs;
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Rk4:
      return "rk4";
    case Method::ImplicitMidpoint:
      return "implicit_midpoint";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "rk4") return Method::Rk4;
  if (name == "implicit_midpoint") return Method::ImplicitMidpoint;
  throw ConfigError("unknown integration method '" + std::string(name) + "'", "run.method");
}

const MonitorSeries& Trajectory::monitor(std::string_view name) const {
  for (const auto& m : monitors) {
    if (m.name == name) return m;
  }
  throw ConfigError("trajectory has no monitor named '" + std::string(name) + "'");
}

std::vector<Observable> standard_monitors(const Hamiltonian& h, const StructureMatrix& omega) {
  const auto& particles = omega.particles();
  return {h.observable(),
          composite_observable({CompositeKind::CmMomentum, 0, 1}, particles),
          composite_observable({CompositeKind::CmMomentum, 0, 2}, particles),
          composite_observable({CompositeKind::PrimedMomentum, 0, 1}, particles),
          composite_observable({CompositeKind::PrimedMomentum, 0, 2}, particles)};
}

namespace {

Vector rk4_step(const Hamiltonian& h, const SystemState& s, const StructureMatrix& omega, double dt) {
  SystemState stage = s;
  const Vector& z = s.z();
  const Vector k1 = eom_rhs(h, s, omega);
  stage.z() = z + 0.5 * dt * k1;
  const Vector k2 = eom_rhs(h, stage, omega);
  stage.z() = z + 0.5 * dt * k2;
  const Vector k3 = eom_rhs(h, stage, omega);
  stage.z() = z + dt * k3;
  const Vector k4 = eom_rhs(h, stage, omega);
  return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Solves z1 = z0 + dt * f((z0 + z1) / 2) by fixed-point iteration.
Vector implicit_midpoint_step(const Hamiltonian& h, const SystemState& s, const StructureMatrix& omega, double dt,
                              std::size_t step_index) {
  const Vector& z0 = s.z();
  SystemState mid = s;
  Vector z1 = z0 + dt * eom_rhs(h, s, omega);
  for (int it = 0; it < kImplicitMaxIterations; ++it) {
    mid.z() = 0.5 * (z0 + z1);
    const Vector next = z0 + dt * eom_rhs(h, mid, omega);
    const double residual = (next - z1).lpNorm<Eigen::Infinity>();
    z1 = next;
    // Residual is scaled by max(1, |z|) so large coordinates do not stall on round-off.
    if (residual < kImplicitResidualTol * std::max(1.0, z1.lpNorm<Eigen::Infinity>())) return z1;
  }
  throw IntegrationError("implicit midpoint iteration did not converge in " +
                             std::to_string(kImplicitMaxIterations) + " iterations",
                         step_index);
}

}  // namespace

Trajectory integrate(const Hamiltonian& h, const SystemState& initial, const StructureMatrix& omega, double step,
                     std::size_t n_steps, Method method, std::span<const Observable> extra_monitors) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step must be positive and finite", "run.step");
  if (n_steps < 1) throw ConfigError("n_steps must be at least 1", "run.n_steps");
  if (initial.dimension() != omega.dimension()) {
    throw ConfigError("initial state dimension does not match structure matrix");
  }
  initial.require_finite();

  std::vector<Observable> monitors = standard_monitors(h, omega);
  monitors.insert(monitors.end(), extra_monitors.begin(), extra_monitors.end());

  Trajectory traj;
  traj.method = method;
  traj.step = step;
  traj.samples.reserve(n_steps + 1);
  traj.monitors.reserve(monitors.size());
  for (const auto& m : monitors) {
    traj.monitors.push_back({m.name(), {}});
    traj.monitors.back().values.reserve(n_steps + 1);
  }

  auto record = [&](const SystemState& s) {
    traj.samples.push_back(s);
    for (std::size_t k = 0; k < monitors.size(); ++k) traj.monitors[k].values.push_back(monitors[k](s));
  };

  record(initial);
  SystemState current = initial;
  const double t0 = initial.time();
  for (std::size_t n = 1; n <= n_steps; ++n) {
    Vector next = method == Method::Rk4 ? rk4_step(h, current, omega, step)
                                        : implicit_midpoint_step(h, current, omega, step, n);
    current = SystemState(t0 + static_cast<double>(n) * step, std::move(next));
    for (Eigen::Index i = 0; i < current.z().size(); ++i) {
      if (!std::isfinite(current.z()[i])) {
        throw NumericError("non-finite state after step " + std::to_string(n), static_cast<std::size_t>(i));
      }
    }
    record(current);
  }
  return traj;
}

MonitorResult monitor_observable(const Trajectory& trajectory, const Observable& f) {
  MonitorResult result;
  if (trajectory.samples.empty()) throw ConfigError("trajectory is empty");
  result.series.reserve(trajectory.samples.size());
  for (const auto& s : trajectory.samples) result.series.push_back(f(s));
  const double f0 = result.series.front();
  for (double v : result.series) result.max_drift = std::max(result.max_drift, std::abs(v - f0));
  return result;
}

}  // namespace ncps
