#include "ncps/analytic.hpp"

#include <cmath>
#include <string>

#include "ncps/errors.hpp"

namespace ncps {

double sinc_kernel(double u) {
  if (std::abs(u) < kKernelTaylorThreshold) {
    const double u2 = u * u;
    return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
  }
  return std::sin(u) / u;
}

double versine_kernel(double u) {
  if (std::abs(u) < kKernelTaylorThreshold) {
    const double u2 = u * u;
    return u * (0.5 - u2 / 24.0);
  }
  return (1.0 - std::cos(u)) / u;
}

void FreeParticleIC::validate() const {
  Particle{mass, 0.0, eta}.validate();
  if (!x0.allFinite()) throw ConfigError("initial position must be finite", "x0");
  if (!v0.allFinite()) throw ConfigError("initial velocity must be finite", "v0");
}

namespace {

// Displacement after time t for a velocity rotating at frequency omega.
Vec2 displacement(const Vec2& v0, double omega, double t) {
  const double u = omega * t;
  const double s = sinc_kernel(u);
  const double q = versine_kernel(u);
  return {t * (v0[0] * s + v0[1] * q), t * (v0[1] * s - v0[0] * q)};
}

Vec2 rotated_velocity(const Vec2& v0, double omega, double t) {
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  return {v0[0] * c + v0[1] * s, v0[1] * c - v0[0] * s};
}

void require_common_scenario(std::span<const Particle> particles, std::span<const Vec2> x0) {
  validate_particles(particles);
  if (x0.size() != particles.size()) {
    throw ConfigError("need one initial position per particle (" + std::to_string(particles.size()) + "), got " +
                          std::to_string(x0.size()),
                      "x0");
  }
}

}  // namespace

PlanarState free_particle_state(const FreeParticleIC& ic, double t) {
  ic.validate();
  const double omega = ic.eta / ic.mass;
  return {ic.x0 + displacement(ic.v0, omega, t), rotated_velocity(ic.v0, omega, t)};
}

std::vector<Vec2> system_velocities(std::span<const Particle> particles, const Vec2& v0, double t) {
  validate_particles(particles);
  std::vector<Vec2> out;
  out.reserve(particles.size());
  for (const auto& p : particles) out.push_back(rotated_velocity(v0, p.eta / p.mass, t));
  return out;
}

Vec2 cm_trajectory(std::span<const Particle> particles, const Vec2& v0, std::span<const Vec2> x0, double t) {
  require_common_scenario(particles, x0);
  double total_mass = 0.0;
  for (const auto& p : particles) total_mass += p.mass;
  Vec2 cm = Vec2::Zero();
  for (std::size_t a = 0; a < particles.size(); ++a) {
    const auto& p = particles[a];
    cm += (p.mass / total_mass) * (x0[a] + displacement(v0, p.eta / p.mass, t));
  }
  return cm;
}

Vec2 relative_trajectory(std::span<const Particle> particles, const Vec2& v0, std::span<const Vec2> x0,
                         std::size_t a, double t) {
  require_common_scenario(particles, x0);
  if (a >= particles.size()) throw ConfigError("particle index out of range", "particle");
  const auto& p = particles[a];
  const Vec2 own = x0[a] + displacement(v0, p.eta / p.mass, t);
  return own - cm_trajectory(particles, v0, x0, t);
}

Vec2 common_motion_trajectory(double alpha, const Vec2& v0, const Vec2& x0, double t) {
  return x0 + displacement(v0, alpha, t);
}

SystemState exact_free_system_state(std::span<const Particle> particles, const SystemState& initial, double t) {
  validate_particles(particles);
  if (initial.particle_count() != particles.size()) {
    throw ConfigError("initial state particle count does not match particle list");
  }
  SystemState out = SystemState::zeros(particles.size(), t);
  const double dt = t - initial.time();
  for (std::size_t a = 0; a < particles.size(); ++a) {
    const auto& p = particles[a];
    const Vec2 x0{initial(a, Component::X1), initial(a, Component::X2)};
    const Vec2 v0 = Vec2{initial(a, Component::P1), initial(a, Component::P2)} / p.mass;
    const auto st = free_particle_state({p.mass, p.eta, x0, v0}, dt);
    out.set_particle(a, st.x[0], st.x[1], p.mass * st.v[0], p.mass * st.v[1]);
  }
  return out;
}

}  // namespace ncps
