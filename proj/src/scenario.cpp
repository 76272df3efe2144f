#include "ncps/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ncps/composite.hpp"
#include "ncps/errors.hpp"

namespace ncps {

using json = nlohmann::json;

std::string_view to_string(Product product) {
  switch (product) {
    case Product::Trajectory:
      return "trajectory";
    case Product::Monitors:
      return "monitors";
    case Product::BracketTable:
      return "bracket_table";
    case Product::ConditionReport:
      return "condition_report";
    case Product::FlyapartSeries:
      return "flyapart_series";
    case Product::AnalyticComparison:
      return "analytic_comparison";
  }
  return "unknown";
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Simulate:
      return "simulate";
    case Command::Analytic:
      return "analytic";
    case Command::Brackets:
      return "brackets";
    case Command::Conditions:
      return "conditions";
    case Command::Flyapart:
      return "flyapart";
    case Command::Compare:
      return "compare";
    case Command::MagneticCheck:
      return "magnetic-check";
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
  for (auto c : {Command::Simulate, Command::Analytic, Command::Brackets, Command::Conditions, Command::Flyapart,
                 Command::Compare, Command::MagneticCheck}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown field '" + key + "'", where.empty() ? key : where + "." + key);
  }
}

const json& require_object(const json& parent, const std::string& key, const std::string& path) {
  if (!parent.contains(key)) throw ConfigError("missing required field", path);
  const json& v = parent.at(key);
  if (!v.is_object()) throw ConfigError("expected an object", path);
  return v;
}

double number_at(const json& obj, const std::string& key, const std::string& path, std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing required field", path);
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("expected a number", path);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("expected a finite number", path);
  return d;
}

Vec2 pair_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError("expected an array of two numbers", path);
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Product parse_product(const std::string& name, const std::string& path) {
  for (auto p : {Product::Trajectory, Product::Monitors, Product::BracketTable, Product::ConditionReport,
                 Product::FlyapartSeries, Product::AnalyticComparison}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown output product '" + name + "'", path);
}

}  // namespace

ScenarioConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "$");
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object", "$");
  reject_unknown_keys(doc, {"particles", "initial", "run", "potential", "outputs", "seed", "description"}, "");

  ScenarioConfig cfg;
  cfg.echo = doc.dump();

  if (!doc.contains("particles")) throw ConfigError("missing required field", "particles");
  const json& parts = doc.at("particles");
  if (!parts.is_array() || parts.empty()) throw ConfigError("expected a non-empty array", "particles");
  for (std::size_t a = 0; a < parts.size(); ++a) {
    const std::string path = "particles[" + std::to_string(a) + "]";
    const json& p = parts[a];
    if (!p.is_object()) throw ConfigError("expected an object", path);
    reject_unknown_keys(p, {"mass", "theta", "eta"}, path);
    Particle particle{number_at(p, "mass", path + ".mass"), number_at(p, "theta", path + ".theta", 0.0),
                      number_at(p, "eta", path + ".eta", 0.0)};
    if (!(particle.mass > 0.0)) throw ConfigError("mass must be positive", path + ".mass");
    cfg.particles.push_back(particle);
  }
  const std::size_t n = cfg.particles.size();

  const json& initial = require_object(doc, "initial", "initial");
  reject_unknown_keys(initial, {"per_particle", "common_velocity"}, "initial");
  const bool has_pp = initial.contains("per_particle");
  const bool has_cv = initial.contains("common_velocity");
  if (has_pp == has_cv) {
    throw ConfigError("exactly one of per_particle or common_velocity is required", "initial");
  }
  if (has_pp) {
    const json& rows = initial.at("per_particle");
    if (!rows.is_array() || rows.size() != n) {
      throw ConfigError("expected one [x1, x2, p1, p2] row per particle", "initial.per_particle");
    }
    SystemState s = SystemState::zeros(n);
    for (std::size_t a = 0; a < n; ++a) {
      const std::string path = "initial.per_particle[" + std::to_string(a) + "]";
      const json& r = rows[a];
      if (!r.is_array() || r.size() != 4) throw ConfigError("expected [x1, x2, p1, p2]", path);
      for (std::size_t k = 0; k < 4; ++k) {
        if (!r[k].is_number()) throw ConfigError("expected a number", path);
        s.z()[static_cast<Eigen::Index>(kPhaseDim * a + k)] = r[k].get<double>();
      }
    }
    cfg.per_particle = std::move(s);
  } else {
    const json& cv = require_object(initial, "common_velocity", "initial.common_velocity");
    reject_unknown_keys(cv, {"v0", "x0"}, "initial.common_velocity");
    CommonVelocityStart start;
    if (!cv.contains("v0")) throw ConfigError("missing required field", "initial.common_velocity.v0");
    start.v0 = pair_at(cv.at("v0"), "initial.common_velocity.v0");
    if (cv.contains("x0")) {
      const json& xs = cv.at("x0");
      if (!xs.is_array() || xs.size() != n) {
        throw ConfigError("expected one [x1, x2] per particle", "initial.common_velocity.x0");
      }
      for (std::size_t a = 0; a < n; ++a) {
        start.x0.push_back(pair_at(xs[a], "initial.common_velocity.x0[" + std::to_string(a) + "]"));
      }
    } else {
      start.x0.assign(n, Vec2::Zero());
    }
    cfg.common = std::move(start);
  }

  const json& run = require_object(doc, "run", "run");
  reject_unknown_keys(run, {"t_end", "step", "method"}, "run");
  cfg.t_end = number_at(run, "t_end", "run.t_end");
  cfg.step = number_at(run, "step", "run.step");
  if (!(cfg.t_end > 0.0)) throw ConfigError("t_end must be positive", "run.t_end");
  if (!(cfg.step > 0.0)) throw ConfigError("step must be positive", "run.step");
  if (cfg.step > cfg.t_end) throw ConfigError("step must not exceed t_end", "run.step");
  if (run.contains("method")) {
    if (!run.at("method").is_string()) throw ConfigError("expected a string", "run.method");
    cfg.method = parse_method(run.at("method").get<std::string>());
  }

  if (doc.contains("potential") && !doc.at("potential").is_null()) {
    const json& pot = require_object(doc, "potential", "potential");
    reject_unknown_keys(pot, {"kind", "strength", "exponent"}, "potential");
    if (!pot.contains("kind") || !pot.at("kind").is_string()) {
      throw ConfigError("expected \"harmonic\" or \"power_law\"", "potential.kind");
    }
    const auto kind = pot.at("kind").get<std::string>();
    const double strength = number_at(pot, "strength", "potential.strength");
    if (kind == "harmonic") {
      cfg.potential = PairPotential::harmonic(strength);
    } else if (kind == "power_law") {
      cfg.potential = PairPotential::power_law(strength, number_at(pot, "exponent", "potential.exponent"));
    } else {
      throw ConfigError("unknown potential kind '" + kind + "'", "potential.kind");
    }
  }

  if (doc.contains("outputs")) {
    const json& outs = doc.at("outputs");
    if (!outs.is_array()) throw ConfigError("expected an array of product names", "outputs");
    for (std::size_t k = 0; k < outs.size(); ++k) {
      const std::string path = "outputs[" + std::to_string(k) + "]";
      if (!outs[k].is_string()) throw ConfigError("expected a string", path);
      cfg.outputs.push_back(parse_product(outs[k].get<std::string>(), path));
    }
  } else {
    cfg.outputs = {Product::Trajectory, Product::Monitors};
  }

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned()) throw ConfigError("expected a non-negative integer", "seed");
    cfg.seed = s.get<std::uint64_t>();
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", "--config");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

SystemState ScenarioConfig::initial_state() const {
  if (per_particle) return *per_particle;
  SystemState s = SystemState::zeros(particles.size());
  for (std::size_t a = 0; a < particles.size(); ++a) {
    const double m = particles[a].mass;
    s.set_particle(a, common->x0[a][0], common->x0[a][1], m * common->v0[0], m * common->v0[1]);
  }
  return s;
}

Hamiltonian ScenarioConfig::hamiltonian() const {
  if (potential) return Hamiltonian::pairwise(particles, *potential);
  return Hamiltonian::free_system(particles);
}

std::size_t ScenarioConfig::n_steps() const {
  const double ratio = t_end / step;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(ratio * (1.0 - 1e-9))));
}

// ---------------------------------------------------------------------------
// Output helpers

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, Command command, const ScenarioConfig& cfg,
            std::initializer_list<std::string_view> columns)
      : out_(path) {
    if (!out_) throw ConfigError("cannot write output file '" + path.string() + "'", "--out");
    out_ << "# ncps " << to_string(command) << "\n# config: " << cfg.echo << "\n";
    bool first = true;
    for (auto c : columns) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Values>
  void row(const Values&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << format(values), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string format(double v) { return num(v); }
  static std::string format(std::size_t v) { return std::to_string(v); }

  std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'", "--out");
  out << doc.dump(2) << '\n';
}

json report_header(Command command, const ScenarioConfig& cfg) {
  return json{{"command", std::string(to_string(command))}, {"config", json::parse(cfg.echo)}};
}

json rows_to_json(const BracketReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"lhs", r.lhs},
                    {"rhs", r.rhs},
                    {"computed", r.computed},
                    {"predicted", r.predicted},
                    {"abs_diff", r.abs_diff},
                    {"cross", r.cross},
                    {"pass", r.pass}});
  }
  return rows;
}

json deviations_to_json(const std::vector<ParticleDeviation>& devs) {
  json out = json::array();
  for (const auto& d : devs) {
    out.push_back({{"particle", d.particle}, {"x1", d.x1}, {"x2", d.x2}, {"p1", d.p1}, {"p2", d.p2}, {"max", d.max()}});
  }
  return out;
}

const CommonVelocityStart& require_common(const ScenarioConfig& cfg, std::string_view what) {
  if (!cfg.common) {
    throw ConfigError(std::string(what) + " needs the common-velocity initial form", "initial.common_velocity");
  }
  return *cfg.common;
}

void require_free(const ScenarioConfig& cfg, std::string_view what) {
  if (cfg.potential) throw UnsupportedScenarioError(std::string(what) + " is only defined for free systems");
}

struct Writer {
  const ScenarioConfig& cfg;
  const RunOptions& options;
  Command command;
  CommandResult& result;

  std::filesystem::path path(std::string_view name) const { return options.out_dir / name; }

  void trajectory(const Trajectory& traj) {
    const auto p = path("trajectory.csv");
    CsvWriter csv(p, command, cfg, {"t", "particle_index", "x1", "x2", "p1", "p2"});
    for (const auto& s : traj.samples) {
      for (std::size_t a = 0; a < s.particle_count(); ++a) {
        csv.row(s.time(), a, s(a, Component::X1), s(a, Component::X2), s(a, Component::P1), s(a, Component::P2));
      }
    }
    result.files.push_back(p);
  }

  void monitors(const Trajectory& traj) {
    const auto p = path("monitors.csv");
    CsvWriter csv(p, command, cfg, {"t", "H", "Ptilde1", "Ptilde2", "Pprime1", "Pprime2"});
    const auto& h = traj.monitors[0].values;
    const auto& pt1 = traj.monitor("Pcm1").values;
    const auto& pt2 = traj.monitor("Pcm2").values;
    const auto& pp1 = traj.monitor("Pprime1").values;
    const auto& pp2 = traj.monitor("Pprime2").values;
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
      csv.row(traj.samples[k].time(), h[k], pt1[k], pt2[k], pp1[k], pp2[k]);
    }
    result.files.push_back(p);
  }

  bool brackets() {
    const auto eff = effective_params(cfg.particles);
    const auto table = bracket_table(cfg.particles, options.tol);
    json doc = report_header(command, cfg);
    doc["tolerance"] = options.tol;
    doc["effective"] = {{"theta_tilde", eff.theta_tilde},
                        {"eta_tilde", eff.eta_tilde},
                        {"total_mass", eff.total_mass},
                        {"mu", eff.mu}};
    doc["rows"] = rows_to_json(table);
    doc["max_abs_diff"] = table.max_abs_diff;
    doc["max_cross_magnitude"] = table.max_cross_magnitude;
    bool passed = table.passed();
    const double product = eff.eta_tilde * eff.theta_tilde;
    if (std::abs(1.0 - product) >= kSingularTolerance) {
      const auto primed = primed_bracket_table(cfg.particles, options.tol);
      doc["primed_rows"] = rows_to_json(primed);
      doc["primed_max_abs_diff"] = primed.max_abs_diff;
      passed = passed && primed.passed();
    } else {
      doc["primed_rows"] = nullptr;
      doc["primed_note"] = "1 - eta_tilde*theta_tilde vanishes; primed variables undefined";
    }
    doc["passed"] = passed;
    const auto p = path("brackets.json");
    write_json(p, doc);
    result.files.push_back(p);
    return passed;
  }

  void conditions() {
    const auto report = check_conditions(cfg.particles);
    json doc = report_header(command, cfg);
    doc["tolerance"] = report.tolerance;
    doc["alpha_values"] = report.alpha_values;
    doc["gamma_values"] = report.gamma_values;
    doc["alpha"] = report.alpha ? json(*report.alpha) : json(nullptr);
    doc["gamma"] = report.gamma ? json(*report.gamma) : json(nullptr);
    doc["eta_condition_satisfied"] = report.eta_condition;
    doc["theta_condition_satisfied"] = report.theta_condition;
    const auto p = path("conditions.json");
    write_json(p, doc);
    result.files.push_back(p);
  }

  void flyapart() {
    const auto& start = require_common(cfg, "flyapart_series");
    const auto p = path("flyapart.csv");
    CsvWriter csv(p, command, cfg, {"t", "velocity_gap"});
    const std::size_t n = cfg.n_steps();
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) * cfg.step;
      csv.row(t, fly_apart_metric(cfg.particles, start.v0, t));
    }
    result.files.push_back(p);
  }

  bool comparison() {
    const auto cmp = compare_analytic(cfg);
    json doc = report_header(command, cfg);
    doc["method"] = std::string(to_string(cmp.method));
    doc["step"] = cmp.step;
    doc["t_end"] = cmp.t_end;
    doc["deviation"] = deviations_to_json(cmp.deviation);
    doc["deviation_half_step"] = deviations_to_json(cmp.deviation_half_step);
    doc["max_deviation"] = cmp.max_deviation;
    doc["max_deviation_half_step"] = cmp.max_deviation_half_step;
    doc["ratio"] = std::isfinite(cmp.ratio) ? json(cmp.ratio) : json(nullptr);
    doc["order_measurable"] = cmp.order_measurable;
    doc["expected_ratio_range"] = {kRk4RatioLow, kRk4RatioHigh};
    doc["passed"] = cmp.order_ok;
    const auto p = path("analytic_comparison.json");
    write_json(p, doc);
    result.files.push_back(p);
    return cmp.order_ok;
  }

  void analytic() {
    require_free(cfg, "analytic");
    const SystemState initial = cfg.initial_state();
    const std::size_t n = cfg.n_steps();
    const auto p = path("analytic.csv");
    {
      CsvWriter csv(p, command, cfg, {"t", "particle_index", "x1", "x2", "v1", "v2"});
      for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * cfg.step;
        const auto s = exact_free_system_state(cfg.particles, initial, t);
        for (std::size_t a = 0; a < cfg.particles.size(); ++a) {
          const double m = cfg.particles[a].mass;
          csv.row(t, a, s(a, Component::X1), s(a, Component::X2), s(a, Component::P1) / m, s(a, Component::P2) / m);
        }
      }
    }
    result.files.push_back(p);
    if (!cfg.common) return;
    const auto pc = path("analytic_cm.csv");
    CsvWriter csv(pc, command, cfg, {"t", "particle_index", "Xcm1", "Xcm2", "dX1", "dX2"});
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) * cfg.step;
      const Vec2 cm = cm_trajectory(cfg.particles, cfg.common->v0, cfg.common->x0, t);
      for (std::size_t a = 0; a < cfg.particles.size(); ++a) {
        const Vec2 rel = relative_trajectory(cfg.particles, cfg.common->v0, cfg.common->x0, a, t);
        csv.row(t, a, cm[0], cm[1], rel[0], rel[1]);
      }
    }
    result.files.push_back(pc);
  }

  bool magnetic_check() {
    const std::uint64_t seed = options.seed.value_or(cfg.seed.value_or(0));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    constexpr std::size_t kSamples = 1000;
    json doc = report_header(command, cfg);
    doc["seed"] = seed;
    doc["samples_per_particle"] = kSamples;
    doc["tolerance"] = options.tol;
    json rows = json::array();
    bool passed = true;
    for (std::size_t a = 0; a < cfg.particles.size(); ++a) {
      const auto& part = cfg.particles[a];
      const auto hm = magnetic_hamiltonian(part.mass, part.theta, part.eta);
      const auto hf = Hamiltonian::free_single(part.mass);
      double worst = 0.0;
      for (std::size_t k = 0; k < kSamples; ++k) {
        SystemState s = SystemState::zeros(1);
        for (Eigen::Index i = 0; i < 4; ++i) s.z()[i] = uniform(rng);
        worst = std::max(worst, std::abs(hm.value(to_primed_variables(s, part.theta, part.eta)) - hf.value(s)));
      }
      const bool ok = worst <= options.tol;
      passed = passed && ok;
      rows.push_back({{"particle", a},
                      {"mass", part.mass},
                      {"theta", part.theta},
                      {"eta", part.eta},
                      {"field_strength", magnetic_field_strength(part.theta, part.eta)},
                      {"max_abs_diff", worst},
                      {"pass", ok}});
    }
    doc["rows"] = rows;
    doc["passed"] = passed;
    const auto p = path("magnetic_check.json");
    write_json(p, doc);
    result.files.push_back(p);
    return passed;
  }
};

ExitCode verdict(bool ok) { return ok ? ExitCode::Success : ExitCode::VerificationMismatch; }

}  // namespace

double ParticleDeviation::max() const { return std::max({x1, x2, p1, p2}); }

AnalyticComparison compare_analytic(const ScenarioConfig& config) {
  require_free(config, "analytic comparison");
  const SystemState initial = config.initial_state();
  const auto omega = build_structure_matrix(config.particles);
  const auto h = config.hamiltonian();

  auto measure = [&](double step, std::size_t n_steps, std::vector<ParticleDeviation>& out) {
    const auto traj = integrate(h, initial, omega, step, n_steps, config.method);
    out.assign(config.particles.size(), {});
    double worst = 0.0;
    for (std::size_t a = 0; a < out.size(); ++a) out[a].particle = a;
    for (const auto& s : traj.samples) {
      const auto exact = exact_free_system_state(config.particles, initial, s.time());
      for (std::size_t a = 0; a < out.size(); ++a) {
        auto& d = out[a];
        d.x1 = std::max(d.x1, std::abs(s(a, Component::X1) - exact(a, Component::X1)));
        d.x2 = std::max(d.x2, std::abs(s(a, Component::X2) - exact(a, Component::X2)));
        d.p1 = std::max(d.p1, std::abs(s(a, Component::P1) - exact(a, Component::P1)));
        d.p2 = std::max(d.p2, std::abs(s(a, Component::P2) - exact(a, Component::P2)));
        worst = std::max(worst, d.max());
      }
    }
    return worst;
  };

  AnalyticComparison cmp;
  cmp.step = config.step;
  cmp.method = config.method;
  const std::size_t n = config.n_steps();
  cmp.t_end = static_cast<double>(n) * config.step;
  cmp.max_deviation = measure(config.step, n, cmp.deviation);
  cmp.max_deviation_half_step = measure(0.5 * config.step, 2 * n, cmp.deviation_half_step);
  cmp.ratio = cmp.max_deviation_half_step > 0.0 ? cmp.max_deviation / cmp.max_deviation_half_step
                                                : std::numeric_limits<double>::infinity();
  cmp.order_measurable = cmp.max_deviation_half_step > kOrderNoiseFloor;
  if (cmp.method == Method::Rk4 && cmp.order_measurable) {
    cmp.order_ok = cmp.ratio >= kRk4RatioLow && cmp.ratio <= kRk4RatioHigh;
  }
  return cmp;
}

CommandResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  return run_command(Command::Simulate, config, options);
}

namespace {

CommandResult execute(Command command, const ScenarioConfig& cfg, const RunOptions& options) {
  std::filesystem::create_directories(options.out_dir);
  CommandResult result;
  Writer w{cfg, options, command, result};
  bool ok = true;
  switch (command) {
    case Command::Simulate: {
      const auto omega = build_structure_matrix(cfg.particles);
      auto has = [&](Product p) { return std::find(cfg.outputs.begin(), cfg.outputs.end(), p) != cfg.outputs.end(); };
      if (has(Product::Trajectory) || has(Product::Monitors)) {
        const auto traj = integrate(cfg.hamiltonian(), cfg.initial_state(), omega, cfg.step, cfg.n_steps(), cfg.method);
        if (has(Product::Trajectory)) w.trajectory(traj);
        if (has(Product::Monitors)) w.monitors(traj);
      }
      if (has(Product::BracketTable)) ok = w.brackets() && ok;
      if (has(Product::ConditionReport)) w.conditions();
      if (has(Product::FlyapartSeries)) w.flyapart();
      if (has(Product::AnalyticComparison)) ok = w.comparison() && ok;
      break;
    }
    case Command::Analytic:
      w.analytic();
      break;
    case Command::Brackets:
      ok = w.brackets();
      break;
    case Command::Conditions:
      w.conditions();
      break;
    case Command::Flyapart:
      w.flyapart();
      break;
    case Command::Compare:
      ok = w.comparison();
      break;
    case Command::MagneticCheck:
      ok = w.magnetic_check();
      break;
  }
  result.code = verdict(ok);
  if (!ok) result.message = "verification mismatch; see the written reports";
  return result;
}

CommandResult fail(const RunOptions& options, ExitCode code, std::string_view kind, const std::string& message,
                   const std::string& field = {}) {
  CommandResult result;
  result.code = code;
  json err = {{"kind", kind}, {"message", message}, {"exit_code", static_cast<int>(code)}};
  if (!field.empty()) err["field"] = field;
  result.message = json{{"error", err}}.dump();
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (!ec) {
    const auto p = options.out_dir / "error.json";
    std::ofstream out(p);
    if (out) {
      out << json{{"error", err}}.dump(2) << '\n';
      result.files.push_back(p);
    }
  }
  return result;
}

template <typename Body>
CommandResult guarded(const RunOptions& options, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return fail(options, ExitCode::ConfigError, "config_error", e.what(), e.field());
  } catch (const UnsupportedScenarioError& e) {
    return fail(options, ExitCode::ConfigError, "unsupported_scenario", e.what());
  } catch (const SingularParametersError& e) {
    return fail(options, ExitCode::NumericError, "singular_parameters", e.what());
  } catch (const IntegrationError& e) {
    return fail(options, ExitCode::NumericError, "integration_error", e.what());
  } catch (const NumericError& e) {
    return fail(options, ExitCode::NumericError, "numeric_error", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(options, ExitCode::ConfigError, "io_error", e.what(), "--out");
  }
}

}  // namespace

CommandResult run_command(Command command, const ScenarioConfig& config, const RunOptions& options) {
  return guarded(options, [&] { return execute(command, config, options); });
}

CommandResult run_command(Command command, const std::filesystem::path& config_path, const RunOptions& options) {
  return guarded(options, [&] { return execute(command, load_config(config_path), options); });
}

}  // namespace ncps
