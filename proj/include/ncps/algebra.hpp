#pragma once

// Noncommutative phase-space algebra of canonical type in two spatial
// dimensions. Every particle a carries its own parameters:
//
//   {x1, x2} = theta_a,   {x_i, p_j} = delta_ij,   {p1, p2} = eta_a,
//
// and brackets between different particles vanish. A system of N particles is
// stored as a flat phase vector z of length 4N ordered (x1, x2, p1, p2) per
// particle, and the bracket of two observables is grad(f)^T * Omega * grad(g).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr std::size_t kPhaseDim = 4;

/// Offsets inside one particle's 4-block.
enum class Component : std::size_t { X1 = 0, X2 = 1, P1 = 2, P2 = 3 };

constexpr std::size_t phase_index(std::size_t particle, Component c) {
  return kPhaseDim * particle + static_cast<std::size_t>(c);
}

struct Particle {
  double mass = 1.0;
  double theta = 0.0;
  double eta = 0.0;

  /// Throws ConfigError unless mass > 0 and all fields are finite.
  void validate() const;
};

void validate_particles(std::span<const Particle> particles);

/// Phase point of an N-particle system at time t.
class SystemState {
 public:
  SystemState() = default;
  SystemState(double time, Vector z);

  /// Zero state for n particles.
  static SystemState zeros(std::size_t particle_count, double time = 0.0);

  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  const Vector& z() const noexcept { return z_; }
  Vector& z() noexcept { return z_; }

  std::size_t particle_count() const noexcept { return static_cast<std::size_t>(z_.size()) / kPhaseDim; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(z_.size()); }

  double operator()(std::size_t particle, Component c) const { return z_[phase_index(particle, c)]; }
  double& operator()(std::size_t particle, Component c) { return z_[phase_index(particle, c)]; }

  void set_particle(std::size_t particle, double x1, double x2, double p1, double p2);

  /// Throws NumericError naming the first non-finite entry.
  void require_finite() const;

 private:
  double time_ = 0.0;
  Vector z_;
};

/// Constant antisymmetric matrix of brackets between phase variables.
class StructureMatrix {
 public:
  explicit StructureMatrix(std::vector<Particle> particles);

  const Matrix& dense() const noexcept { return omega_; }
  double operator()(std::size_t i, std::size_t j) const { return omega_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }

  std::size_t dimension() const noexcept { return kPhaseDim * particles_.size(); }
  std::size_t particle_count() const noexcept { return particles_.size(); }
  const std::vector<Particle>& particles() const noexcept { return particles_; }

  /// Omega * v using the 4x4 block-diagonal layout.
  Vector apply(const Vector& v) const;

 private:
  std::vector<Particle> particles_;
  Matrix omega_;
};

/// Throws ConfigError for an empty or invalid particle list.
StructureMatrix build_structure_matrix(std::span<const Particle> particles);

/// Scalar function of the phase point with an optional analytic gradient.
/// Without one, gradient() falls back to central differences with step
/// h_i = cbrt(eps) * max(1, |z_i|).
class Observable {
 public:
  using ValueFn = std::function<double(const SystemState&)>;
  using GradientFn = std::function<Vector(const SystemState&)>;

  Observable() = default;
  Observable(std::string name, ValueFn value, GradientFn gradient = {}, bool linear = false);

  /// f(z) = c . z + offset, with exact gradient c.
  static Observable linear(std::string name, Vector coefficients, double offset = 0.0);
  /// The single phase variable z_index.
  static Observable coordinate(std::size_t dimension, std::size_t index);
  static Observable coordinate(std::size_t particle_count, std::size_t particle, Component c);

  const std::string& name() const noexcept { return name_; }
  bool is_linear() const noexcept { return linear_; }
  bool has_analytic_gradient() const noexcept { return static_cast<bool>(gradient_); }

  double operator()(const SystemState& state) const { return value_(state); }
  Vector gradient(const SystemState& state) const;

 private:
  std::string name_;
  ValueFn value_;
  GradientFn gradient_;
  bool linear_ = false;
};

Vector finite_difference_gradient(const Observable::ValueFn& f, const SystemState& state);

/// Pointwise product. Product rule when both factors have analytic gradients,
/// finite differences otherwise.
Observable product(const Observable& f, const Observable& g);

/// {f, g} = grad(f)^T Omega grad(g). Throws NumericError on non-finite gradients
/// and ConfigError on dimension mismatch.
double poisson_bracket(const Observable& f, const Observable& g, const SystemState& state,
                       const StructureMatrix& omega);

/// Bracket {f, g} as an observable in its own right (finite-difference gradient).
Observable bracket_observable(const Observable& f, const Observable& g, const StructureMatrix& omega);

struct AlgebraReport {
  double max_antisymmetry = 0.0;
  double max_leibniz = 0.0;
  double max_jacobi = 0.0;
  std::size_t jacobi_triples = 0;
  double tolerance = 0.0;

  bool passed() const noexcept {
    return max_antisymmetry <= tolerance && max_leibniz <= tolerance && max_jacobi <= tolerance;
  }
};

/// Antisymmetry over probe pairs, Leibniz rule over probe triples, and the
/// Jacobi cyclic sum over triples of linear probes.
AlgebraReport check_algebra(const StructureMatrix& omega, std::span<const Observable> probes,
                            const SystemState& state, double tol);

/// One coordinate observable per phase variable, in flat-vector order.
std::vector<Observable> canonical_probes(std::size_t particle_count);

}  // namespace ncps
