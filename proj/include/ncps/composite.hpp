#pragma once

// Center-of-mass machinery for N particles with individual noncommutativity
// parameters. The traditional definitions
//
//   P~ = sum_a P^(a),          X~ = sum_a mu_a X^(a),         mu_a = m_a / M,
//   dP^(a) = P^(a) - mu_a P~,  dX^(a) = X^(a) - X~,
//
// obey a deformed algebra with effective parameters
//
//   theta~ = sum_a m_a^2 theta_a / M^2,   eta~ = sum_a eta_a,
//
// and the center of mass couples to the relative motion unless
// eta_a / m_a and theta_a * m_a are the same for every particle.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncps/algebra.hpp"
#include "ncps/analytic.hpp"
#include "ncps/dynamics.hpp"

namespace ncps {

struct EffectiveParams {
  double theta_tilde = 0.0;
  double eta_tilde = 0.0;
  double total_mass = 0.0;
  std::vector<double> mu;
};

EffectiveParams effective_params(std::span<const Particle> particles);

struct CMDecomposition {
  double time = 0.0;
  Vec2 cm_x = Vec2::Zero();
  Vec2 cm_p = Vec2::Zero();
  std::vector<Vec2> rel_x;
  std::vector<Vec2> rel_p;
};

CMDecomposition cm_decompose(const SystemState& state, std::span<const Particle> particles);
SystemState cm_recompose(const CMDecomposition& d, std::span<const Particle> particles);

/// Linear phase-space functions built from the center-of-mass definitions.
enum class CompositeKind {
  CmCoordinate,         // X~_i
  CmMomentum,           // P~_i
  RelativeCoordinate,   // dX_i^(a)
  RelativeMomentum,     // dP_i^(a)
  PrimedMomentum,       // P~'_i = P~_i -/+ eta~ X~_j
  ConjugateCoordinate,  // X~'_i = X~_i / (1 - eta~ theta~)
};

struct CompositeVariable {
  CompositeKind kind;
  std::size_t particle = 0;  // only meaningful for the relative variables
  int component = 1;         // 1 or 2

  std::string name() const;
};

/// Exact-gradient observable for a composite variable. ConjugateCoordinate
/// throws SingularParametersError when 1 - eta~ theta~ vanishes.
Observable composite_observable(const CompositeVariable& var, std::span<const Particle> particles);

struct BracketRow {
  std::string lhs;
  std::string rhs;
  double computed = 0.0;
  double predicted = 0.0;
  double abs_diff = 0.0;
  bool cross = false;  // center-of-mass variable against a relative variable
  bool pass = false;
};

struct BracketReport {
  std::vector<BracketRow> rows;
  double tolerance = 0.0;
  double max_abs_diff = 0.0;
  /// Largest |computed| over the cross rows.
  double max_cross_magnitude = 0.0;

  bool passed() const noexcept { return max_abs_diff <= tolerance; }
};

inline constexpr double kBracketTolerance = 1e-10;

/// Closed-form value of {u, v} for the traditional center-of-mass and
/// relative variables.
double predicted_bracket(const CompositeVariable& u, const CompositeVariable& v, std::span<const Particle> particles);

/// Every ordered pair of distinct variables among X~, P~, dX^(a), dP^(a),
/// evaluated through the structure matrix and compared with its closed form.
BracketReport bracket_table(std::span<const Particle> particles, double tol = kBracketTolerance);

/// Brackets among X~' and P~' against
///   {X~'_i, P~'_j} = delta_ij,  {X~'_1, X~'_2} = theta~ / (1 - theta~ eta~)^2,
///   {P~'_1, P~'_2} = eta~ (theta~ eta~ - 1).
BracketReport primed_bracket_table(std::span<const Particle> particles, double tol = kBracketTolerance);

struct ConditionReport {
  std::vector<double> alpha_values;  // eta_a / m_a
  std::vector<double> gamma_values;  // theta_a * m_a
  std::optional<double> alpha;
  std::optional<double> gamma;
  bool eta_condition = false;
  bool theta_condition = false;
  double tolerance = 0.0;

  bool both_satisfied() const noexcept { return eta_condition && theta_condition; }
};

inline constexpr double kConditionTolerance = 1e-9;

/// A condition holds when max - min of its ratios is at most tol * |mean|.
ConditionReport check_conditions(std::span<const Particle> particles, double tol = kConditionTolerance);

/// (P~_1 - eta~ X~_2, P~_2 + eta~ X~_1)
Vec2 primed_momenta(const SystemState& state, std::span<const Particle> particles);

inline constexpr double kSingularTolerance = 1e-12;

/// X~ / (1 - eta~ theta~).
Vec2 conjugate_cm_coords(const SystemState& state, std::span<const Particle> particles);

/// eB/c = eta (1 - eta theta).
double magnetic_field_strength(double theta, double eta);

/// Free-particle Hamiltonian written in primed variables
///   X' = X / (1 - eta theta),  P'_1 = P_1 - eta X_2,  P'_2 = P_2 + eta X_1.
Hamiltonian magnetic_hamiltonian(double mass, double theta, double eta);

/// Maps a single-particle state to (X'_1, X'_2, P'_1, P'_2).
SystemState to_primed_variables(const SystemState& state, double theta, double eta);

struct MomentumDrift {
  Vec2 predicted = Vec2::Zero();  // closed-form {P~_i, H}
  Vec2 bracket = Vec2::Zero();    // via the structure matrix

  double max_abs_diff() const { return (predicted - bracket).cwiseAbs().maxCoeff(); }
};

/// d P~ / dt for the free-system Hamiltonian, two ways:
///   {P~_1, H} = eta~ P~_2 / M + sum_a (dP_2^(a) / m_a)(eta_a - mu_a eta~)
/// and its mirror, against grad(P~)^T Omega grad(H).
MomentumDrift traditional_momentum_drift(const SystemState& state, std::span<const Particle> particles,
                                         const Hamiltonian& h);

/// max over pairs of |v^(a)(t) - v^(b)(t)| for particles sharing initial velocity v0.
double fly_apart_metric(std::span<const Particle> particles, const Vec2& v0, double t);

}  // namespace ncps
