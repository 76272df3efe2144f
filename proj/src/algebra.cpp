#include "ncps/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ncps/errors.hpp"

namespace ncps {

void Particle::validate() const {
  if (!std::isfinite(mass) || mass <= 0.0) {
    throw ConfigError("particle mass must be finite and positive, got " + std::to_string(mass), "mass");
  }
  if (!std::isfinite(theta)) throw ConfigError("particle theta must be finite", "theta");
  if (!std::isfinite(eta)) throw ConfigError("particle eta must be finite", "eta");
}

void validate_particles(std::span<const Particle> particles) {
  if (particles.empty()) throw ConfigError("particle list is empty", "particles");
  for (const auto& p : particles) p.validate();
}

SystemState::SystemState(double time, Vector z) : time_(time), z_(std::move(z)) {
  if (z_.size() == 0 || z_.size() % static_cast<Eigen::Index>(kPhaseDim) != 0) {
    throw ConfigError("phase vector length must be a positive multiple of 4, got " +
                      std::to_string(z_.size()));
  }
}

SystemState SystemState::zeros(std::size_t particle_count, double time) {
  return SystemState(time, Vector::Zero(static_cast<Eigen::Index>(kPhaseDim * particle_count)));
}

void SystemState::set_particle(std::size_t particle, double x1, double x2, double p1, double p2) {
  (*this)(particle, Component::X1) = x1;
  (*this)(particle, Component::X2) = x2;
  (*this)(particle, Component::P1) = p1;
  (*this)(particle, Component::P2) = p2;
}

void SystemState::require_finite() const {
  for (Eigen::Index i = 0; i < z_.size(); ++i) {
    if (!std::isfinite(z_[i])) throw NumericError("non-finite phase-space entry", static_cast<std::size_t>(i));
  }
  if (!std::isfinite(time_)) throw NumericError("non-finite time", 0);
}

StructureMatrix::StructureMatrix(std::vector<Particle> particles) : particles_(std::move(particles)) {
  validate_particles(particles_);
  const auto n = static_cast<Eigen::Index>(dimension());
  omega_ = Matrix::Zero(n, n);
  for (std::size_t a = 0; a < particles_.size(); ++a) {
    const auto x1 = static_cast<Eigen::Index>(phase_index(a, Component::X1));
    const auto x2 = static_cast<Eigen::Index>(phase_index(a, Component::X2));
    const auto p1 = static_cast<Eigen::Index>(phase_index(a, Component::P1));
    const auto p2 = static_cast<Eigen::Index>(phase_index(a, Component::P2));
    const auto& part = particles_[a];
    omega_(x1, x2) = part.theta;
    omega_(x2, x1) = -part.theta;
    omega_(x1, p1) = 1.0;
    omega_(p1, x1) = -1.0;
    omega_(x2, p2) = 1.0;
    omega_(p2, x2) = -1.0;
    omega_(p1, p2) = part.eta;
    omega_(p2, p1) = -part.eta;
  }
}

Vector StructureMatrix::apply(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != dimension()) {
    throw ConfigError("vector length " + std::to_string(v.size()) + " does not match structure matrix dimension " +
                      std::to_string(dimension()));
  }
  Vector out(v.size());
  for (std::size_t a = 0; a < particles_.size(); ++a) {
    const auto o = static_cast<Eigen::Index>(kPhaseDim * a);
    out.segment<4>(o) = omega_.block<4, 4>(o, o) * v.segment<4>(o);
  }
  return out;
}

StructureMatrix build_structure_matrix(std::span<const Particle> particles) {
  return StructureMatrix(std::vector<Particle>(particles.begin(), particles.end()));
}

Observable::Observable(std::string name, ValueFn value, GradientFn gradient, bool linear)
    : name_(std::move(name)), value_(std::move(value)), gradient_(std::move(gradient)), linear_(linear) {}

Observable Observable::linear(std::string name, Vector coefficients, double offset) {
  auto value = [c = coefficients, offset](const SystemState& s) { return c.dot(s.z()) + offset; };
  auto gradient = [c = std::move(coefficients)](const SystemState&) { return c; };
  return Observable(std::move(name), std::move(value), std::move(gradient), true);
}

Observable Observable::coordinate(std::size_t dimension, std::size_t index) {
  static constexpr const char* kNames[] = {"x1", "x2", "p1", "p2"};
  Vector c = Vector::Zero(static_cast<Eigen::Index>(dimension));
  c[static_cast<Eigen::Index>(index)] = 1.0;
  return linear(std::string(kNames[index % kPhaseDim]) + "[" + std::to_string(index / kPhaseDim) + "]", std::move(c));
}

Observable Observable::coordinate(std::size_t particle_count, std::size_t particle, Component c) {
  return coordinate(kPhaseDim * particle_count, phase_index(particle, c));
}

Vector Observable::gradient(const SystemState& state) const {
  if (gradient_) return gradient_(state);
  return finite_difference_gradient(value_, state);
}

Vector finite_difference_gradient(const Observable::ValueFn& f, const SystemState& state) {
  static const double kStepScale = std::cbrt(std::numeric_limits<double>::epsilon());
  SystemState probe = state;
  Vector grad(state.z().size());
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    const double zi = state.z()[i];
    const double h = kStepScale * std::max(1.0, std::abs(zi));
    probe.z()[i] = zi + h;
    const double forward = f(probe);
    probe.z()[i] = zi - h;
    const double backward = f(probe);
    probe.z()[i] = zi;
    // (zi + h) - (zi - h) is the step actually taken after rounding.
    grad[i] = (forward - backward) / ((zi + h) - (zi - h));
  }
  return grad;
}

Observable product(const Observable& f, const Observable& g) {
  auto value = [f, g](const SystemState& s) { return f(s) * g(s); };
  Observable::GradientFn gradient;
  if (f.has_analytic_gradient() && g.has_analytic_gradient()) {
    gradient = [f, g](const SystemState& s) -> Vector { return g(s) * f.gradient(s) + f(s) * g.gradient(s); };
  }
  return Observable("(" + f.name() + ")*(" + g.name() + ")", std::move(value), std::move(gradient));
}

namespace {

void require_finite_gradient(const Vector& grad, const std::string& name) {
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw NumericError("non-finite gradient entry in observable '" + name + "'", static_cast<std::size_t>(i));
    }
  }
}

}  // namespace

double poisson_bracket(const Observable& f, const Observable& g, const SystemState& state,
                       const StructureMatrix& omega) {
  if (state.dimension() != omega.dimension()) {
    throw ConfigError("state dimension " + std::to_string(state.dimension()) +
                      " does not match structure matrix dimension " + std::to_string(omega.dimension()));
  }
  const Vector gf = f.gradient(state);
  const Vector gg = g.gradient(state);
  if (static_cast<std::size_t>(gf.size()) != omega.dimension() ||
      static_cast<std::size_t>(gg.size()) != omega.dimension()) {
    throw ConfigError("gradient length does not match structure matrix dimension");
  }
  require_finite_gradient(gf, f.name());
  require_finite_gradient(gg, g.name());
  return gf.dot(omega.apply(gg));
}

Observable bracket_observable(const Observable& f, const Observable& g, const StructureMatrix& omega) {
  return Observable("{" + f.name() + "," + g.name() + "}",
                    [f, g, omega](const SystemState& s) { return poisson_bracket(f, g, s, omega); });
}

AlgebraReport check_algebra(const StructureMatrix& omega, std::span<const Observable> probes,
                            const SystemState& state, double tol) {
  if (probes.empty()) throw ConfigError("check_algebra needs at least one probe", "probes");
  AlgebraReport report;
  report.tolerance = tol;
  const std::size_t n = probes.size();

  std::vector<double> bracket(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) bracket[i * n + j] = poisson_bracket(probes[i], probes[j], state, omega);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      report.max_antisymmetry = std::max(report.max_antisymmetry, std::abs(bracket[i * n + j] + bracket[j * n + i]));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j; k < n; ++k) {
        const double lhs = poisson_bracket(probes[i], product(probes[j], probes[k]), state, omega);
        const double rhs = probes[j](state) * bracket[i * n + k] + probes[k](state) * bracket[i * n + j];
        report.max_leibniz = std::max(report.max_leibniz, std::abs(lhs - rhs));
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!probes[i].is_linear()) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!probes[j].is_linear()) continue;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (!probes[k].is_linear()) continue;
        const double cyclic =
            poisson_bracket(probes[i], bracket_observable(probes[j], probes[k], omega), state, omega) +
            poisson_bracket(probes[j], bracket_observable(probes[k], probes[i], omega), state, omega) +
            poisson_bracket(probes[k], bracket_observable(probes[i], probes[j], omega), state, omega);
        report.max_jacobi = std::max(report.max_jacobi, std::abs(cyclic));
        ++report.jacobi_triples;
      }
    }
  }
  return report;
}

std::vector<Observable> canonical_probes(std::size_t particle_count) {
  std::vector<Observable> probes;
  const std::size_t dim = kPhaseDim * particle_count;
  probes.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) probes.push_back(Observable::coordinate(dim, i));
  return probes;
}

}  // namespace ncps
