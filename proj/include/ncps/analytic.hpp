#pragma once

// Exact solutions for free motion. A free particle's velocity rotates at the
// angular frequency omega = eta / m; positions follow by integrating that
// rotation. All formulas are written with the kernels
//
//   s(u) = sin(u) / u,   q(u) = (1 - cos(u)) / u,
//
// so that x(t) = x0 + t * R(s, q) v0 stays regular at eta = 0, where it
// reduces to straight-line motion.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ncps/algebra.hpp"

namespace ncps {

using Vec2 = Eigen::Vector2d;

/// Below this |u| the kernels switch to their Taylor series.
inline constexpr double kKernelTaylorThreshold = 1e-4;

double sinc_kernel(double u);
double versine_kernel(double u);

struct FreeParticleIC {
  double mass = 1.0;
  double eta = 0.0;
  Vec2 x0 = Vec2::Zero();
  Vec2 v0 = Vec2::Zero();

  void validate() const;
};

struct PlanarState {
  Vec2 x;
  Vec2 v;
};

PlanarState free_particle_state(const FreeParticleIC& ic, double t);

/// Velocities of every particle started with the common velocity v0.
std::vector<Vec2> system_velocities(std::span<const Particle> particles, const Vec2& v0, double t);

/// Mass-weighted center of the closed-form trajectories; all particles share v0.
Vec2 cm_trajectory(std::span<const Particle> particles, const Vec2& v0, std::span<const Vec2> x0, double t);

/// X^(a)(t) - cm_trajectory(t).
Vec2 relative_trajectory(std::span<const Particle> particles, const Vec2& v0, std::span<const Vec2> x0,
                         std::size_t a, double t);

/// Trajectory shared by all particles when eta_a / m_a = alpha for every a.
Vec2 common_motion_trajectory(double alpha, const Vec2& v0, const Vec2& x0, double t);

/// Exact free-system phase point at time t for arbitrary per-particle initial
/// data; particles evolve independently with velocity p / m.
SystemState exact_free_system_state(std::span<const Particle> particles, const SystemState& initial, double t);

}  // namespace ncps
