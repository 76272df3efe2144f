#pragma once

// Scenario-driven front end shared by the command-line tool and the tests.
// A scenario is a JSON document (schema in docs/config_schema.md) naming the
// particles, one form of initial data, the run parameters and the products to
// write.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncps/algebra.hpp"
#include "ncps/analytic.hpp"
#include "ncps/dynamics.hpp"

namespace ncps {

enum class Product { Trajectory, Monitors, BracketTable, ConditionReport, FlyapartSeries, AnalyticComparison };

std::string_view to_string(Product product);

struct CommonVelocityStart {
  Vec2 v0 = Vec2::Zero();
  std::vector<Vec2> x0;
};

struct ScenarioConfig {
  std::vector<Particle> particles;
  std::optional<SystemState> per_particle;
  std::optional<CommonVelocityStart> common;
  double t_end = 1.0;
  double step = 1e-3;
  Method method = Method::Rk4;
  std::optional<PairPotential> potential;
  std::vector<Product> outputs;
  std::optional<std::uint64_t> seed;
  /// Canonical (sorted-key, compact) echo of the parsed document.
  std::string echo;

  SystemState initial_state() const;
  Hamiltonian hamiltonian() const;
  /// ceil(t_end / step), ignoring a relative excess below 1e-9.
  std::size_t n_steps() const;
};

/// Throws ConfigError naming the offending field.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

enum class Command { Simulate, Analytic, Brackets, Conditions, Flyapart, Compare, MagneticCheck };

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view name);

enum class ExitCode : int { Success = 0, ConfigError = 1, NumericError = 2, VerificationMismatch = 3 };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  double tol = 1e-10;
  std::optional<std::uint64_t> seed;
};

struct CommandResult {
  ExitCode code = ExitCode::Success;
  std::vector<std::filesystem::path> files;
  std::string message;
};

struct ParticleDeviation {
  std::size_t particle = 0;
  double x1 = 0.0, x2 = 0.0, p1 = 0.0, p2 = 0.0;

  double max() const;
};

/// Numerical trajectory against the exact free-particle solution, at the
/// configured step and at half of it.
struct AnalyticComparison {
  double step = 0.0;
  double t_end = 0.0;
  Method method = Method::Rk4;
  std::vector<ParticleDeviation> deviation;
  std::vector<ParticleDeviation> deviation_half_step;
  double max_deviation = 0.0;
  double max_deviation_half_step = 0.0;
  double ratio = 0.0;
  /// False when the half-step error sits at round-off and the ratio means nothing.
  bool order_measurable = false;
  bool order_ok = true;
};

inline constexpr double kOrderNoiseFloor = 1e-11;
inline constexpr double kRk4RatioLow = 14.0;
inline constexpr double kRk4RatioHigh = 18.0;

/// Throws UnsupportedScenarioError when the scenario has a pair potential.
AnalyticComparison compare_analytic(const ScenarioConfig& config);

/// Writes every product requested by the config.
CommandResult run_scenario(const ScenarioConfig& config, const RunOptions& options);

/// Runs one subcommand. Library errors are caught, mapped to an exit code and
/// written as error.json in the output directory.
CommandResult run_command(Command command, const ScenarioConfig& config, const RunOptions& options);
CommandResult run_command(Command command, const std::filesystem::path& config_path, const RunOptions& options);

}  // namespace ncps
