#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncps/algebra.hpp"

namespace ncps {

/// Central potential U(r) acting between every pair of particles.
struct PairPotential {
  enum class Kind { Harmonic, PowerLaw };

  Kind kind = Kind::Harmonic;
  double strength = 0.0;
  double exponent = 2.0;

  /// U(r) = strength * r^2 / 2.
  static PairPotential harmonic(double strength);
  /// U(r) = strength * r^exponent.
  static PairPotential power_law(double strength, double exponent);

  double value(double r) const;
  double derivative(double r) const;
};

enum class HamiltonianKind { FreeSingle, FreeSystem, PairwisePotential, MagneticEquivalent };

std::string_view to_string(HamiltonianKind kind);

class Hamiltonian {
 public:
  static Hamiltonian free_single(double mass);
  /// sum_a |P^(a)|^2 / (2 m_a)
  static Hamiltonian free_system(std::span<const Particle> particles);
  /// Free part plus sum over unordered pairs of U(|X^(a) - X^(b)|).
  static Hamiltonian pairwise(std::span<const Particle> particles, PairPotential potential);
  /// One particle of mass m in a uniform field with coupling eB/c = field:
  /// ((p1 + field x2)^2 + (p2 - field x1)^2) / (2m).
  static Hamiltonian magnetic_equivalent(double mass, double field);

  HamiltonianKind kind() const noexcept { return kind_; }
  bool is_free() const noexcept { return kind_ == HamiltonianKind::FreeSingle || kind_ == HamiltonianKind::FreeSystem; }
  const std::vector<double>& masses() const noexcept { return masses_; }
  const std::optional<PairPotential>& potential() const noexcept { return potential_; }
  double field() const noexcept { return field_; }
  std::size_t dimension() const noexcept { return kPhaseDim * masses_.size(); }

  double value(const SystemState& state) const;
  Vector gradient(const SystemState& state) const;
  Observable observable() const;

 private:
  Hamiltonian(HamiltonianKind kind, std::vector<double> masses) : kind_(kind), masses_(std::move(masses)) {}
  void check_dimension(const SystemState& state) const;

  HamiltonianKind kind_;
  std::vector<double> masses_;
  std::optional<PairPotential> potential_;
  double field_ = 0.0;
};

/// dz/dt = Omega * grad H. Throws NumericError on non-finite output.
Vector eom_rhs(const Hamiltonian& h, const SystemState& state, const StructureMatrix& omega);

enum class Method { Rk4, ImplicitMidpoint };

std::string_view to_string(Method method);
/// Accepts "rk4" and "implicit_midpoint"; throws ConfigError otherwise.
Method parse_method(std::string_view name);

struct MonitorSeries {
  std::string name;
  std::vector<double> values;
};

struct Trajectory {
  std::vector<SystemState> samples;
  Method method = Method::Rk4;
  double step = 0.0;
  std::vector<MonitorSeries> monitors;

  std::string_view integrator_id() const { return to_string(method); }
  const MonitorSeries& monitor(std::string_view name) const;
};

/// H, Ptilde1, Ptilde2, Pprime1, Pprime2 for the particles carried by omega.
std::vector<Observable> standard_monitors(const Hamiltonian& h, const StructureMatrix& omega);

inline constexpr double kImplicitResidualTol = 1e-12;
inline constexpr int kImplicitMaxIterations = 50;

/// Fixed-step integration producing n_steps + 1 samples. The standard monitors
/// plus any extra ones are sampled at every step.
Trajectory integrate(const Hamiltonian& h, const SystemState& initial, const StructureMatrix& omega, double step,
                     std::size_t n_steps, Method method = Method::Rk4,
                     std::span<const Observable> extra_monitors = {});

struct MonitorResult {
  std::vector<double> series;
  double max_drift = 0.0;
};

MonitorResult monitor_observable(const Trajectory& trajectory, const Observable& f);

}  // namespace ncps
