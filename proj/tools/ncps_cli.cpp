// Command-line front end: ncps_cli <subcommand> --config PATH [--out DIR] [--tol REAL] [--seed INT]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ncps/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Classical dynamics of particle systems in noncommutative phase space"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  double tol = 1e-10;
  std::uint64_t seed = 0;

  const char* descriptions[][2] = {
      {"simulate", "integrate the scenario and write the requested products"},
      {"analytic", "write the exact free-motion trajectories"},
      {"brackets", "bracket table of center-of-mass and relative variables"},
      {"conditions", "report on eta_a/m_a and theta_a*m_a being constant"},
      {"flyapart", "velocity gap between particles with a common initial velocity"},
      {"compare", "numerical integration against the exact solution"},
      {"magnetic-check", "free Hamiltonian against its magnetic-field form on random states"},
  };
  for (const auto& [name, text] : descriptions) {
    auto* sub = app.add_subcommand(name, text);
    sub->add_option("--config", config_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--tol", tol, "verification tolerance")->capture_default_str();
    sub->add_option("--seed", seed, "seed for randomized checks");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ncps::ExitCode::ConfigError);
  }

  const auto* sub = app.get_subcommands().front();
  ncps::RunOptions options;
  options.out_dir = out_dir;
  options.tol = tol;
  if (sub->count("--seed") > 0) options.seed = seed;

  const auto command = ncps::parse_command(sub->get_name());
  const auto result = ncps::run_command(*command, std::filesystem::path(config_path), options);
  for (const auto& f : result.files) std::cout << f.string() << '\n';
  if (result.code != ncps::ExitCode::Success) std::cerr << result.message << '\n';
  return static_cast<int>(result.code);
}
