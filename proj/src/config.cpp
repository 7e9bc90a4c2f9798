#include "qmelab/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace qmelab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config: " + field + ": " + why);
}

const json& require(const json& parent, const std::string& key,
                    const std::string& path) {
  if (!parent.contains(key)) fail(path + "." + key, "missing");
  return parent.at(key);
}

double require_number(const json& parent, const std::string& key,
                      const std::string& path) {
  const json& v = require(parent, key, path);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path + "." + key, "must be finite");
  return x;
}

int require_int(const json& parent, const std::string& key,
                const std::string& path) {
  const json& v = require(parent, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "must be an integer");
  return v.get<int>();
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = lo * std::pow(hi / lo, n > 1 ? double(i) / (n - 1) : 0.0);
  return grid;
}

}  // namespace

bool ExperimentConfig::equilibrium() const {
  for (size_t i = 1; i < baths.size(); ++i)
    if (baths[i].beta != baths[0].beta || baths[i].mu != baths[0].mu)
      return false;
  return true;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;

  const json& system = require(root, "system", "");
  cfg.n_sites = require_int(system, "n_sites", "system");
  if (cfg.n_sites < 1) fail("system.n_sites", "must be >= 1");
  const json& fields = require(system, "fields", "system");
  if (!fields.is_array() ||
      fields.size() != static_cast<size_t>(cfg.n_sites))
    fail("system.fields", "must be an array with one entry per site");
  for (const auto& f : fields) {
    if (!f.is_number()) fail("system.fields", "entries must be numbers");
    cfg.fields.push_back(f.get<double>());
  }
  cfg.g = require_number(system, "g", "system");
  cfg.delta = system.contains("delta")
                  ? require_number(system, "delta", "system")
                  : 1.0;

  const json& baths = require(root, "baths", "");
  if (!baths.is_array() || baths.empty())
    fail("baths", "must be a non-empty array");
  double max_omega_c = 0.0;
  for (size_t i = 0; i < baths.size(); ++i) {
    const std::string path = "baths[" + std::to_string(i) + "]";
    const json& b = baths[i];
    const int terminal = require_int(b, "terminal", path);
    const double beta = require_number(b, "beta", path);
    const double mu = require_number(b, "mu", path);
    const double omega_c = require_number(b, "omega_c", path);
    if (!(beta > 0)) fail(path + ".beta", "must be positive");
    if (!(mu < 0)) fail(path + ".mu", "must be negative for a bosonic bath");
    if (!(omega_c > 0)) fail(path + ".omega_c", "must be positive");
    if (terminal != 1 && terminal != cfg.n_sites)
      fail(path + ".terminal", "must be a chain terminal (1 or n_sites)");
    cfg.baths.push_back(make_bath(terminal, beta, mu, omega_c));
    max_omega_c = std::max(max_omega_c, omega_c);
  }

  if (root.contains("qme")) {
    const json& q = root.at("qme");
    if (!q.is_array() || q.empty()) fail("qme", "must be a non-empty array");
    for (const auto& name : q) {
      if (!name.is_string()) fail("qme", "entries must be strings");
      cfg.qmes.push_back(qme_from_label(name.get<std::string>()));
    }
  } else {
    cfg.qmes = {QmeKind::redfield, QmeKind::local_lindblad,
                QmeKind::eigenbasis_lindblad, QmeKind::universal_lindblad};
  }

  cfg.epsilon = root.contains("epsilon")
                    ? require_number(root, "epsilon", "")
                    : 0.1;
  if (!(cfg.epsilon > 0)) fail("epsilon", "must be positive");

  if (root.contains("epsilon_grid")) {
    const json& eg = root.at("epsilon_grid");
    if (eg.is_array()) {
      for (const auto& v : eg) cfg.epsilon_grid.push_back(v.get<double>());
    } else if (eg.is_object()) {
      const double lo = require_number(eg, "min", "epsilon_grid");
      const double hi = require_number(eg, "max", "epsilon_grid");
      const int n = require_int(eg, "points", "epsilon_grid");
      if (!(lo > 0) || !(hi > lo)) fail("epsilon_grid", "need 0 < min < max");
      if (n < 2) fail("epsilon_grid.points", "must be >= 2");
      cfg.epsilon_grid = log_grid(lo, hi, n);
    } else {
      fail("epsilon_grid", "must be an array or {min,max,points}");
    }
    for (double e : cfg.epsilon_grid)
      if (!(e > 0)) fail("epsilon_grid", "entries must be positive");
  } else {
    cfg.epsilon_grid = log_grid(0.01, 0.1, 8);
  }

  if (root.contains("sweep")) {
    const json& sweep = root.at("sweep");
    const json& var = require(sweep, "variable", "sweep");
    if (!var.is_string()) fail("sweep.variable", "must be a string");
    cfg.sweep_variable = var.get<std::string>();
    if (cfg.sweep_variable != "g" && cfg.sweep_variable != "epsilon")
      fail("sweep.variable", "must be 'g' or 'epsilon'");
    const json& grid = require(sweep, "grid", "sweep");
    if (!grid.is_array() || grid.empty())
      fail("sweep.grid", "must be a non-empty array");
    for (const auto& v : grid) {
      if (!v.is_number()) fail("sweep.grid", "entries must be numbers");
      cfg.sweep_grid.push_back(v.get<double>());
    }
  }

  if (root.contains("solver")) {
    const json& solver = root.at("solver");
    if (solver.contains("degeneracy_tolerance"))
      cfg.degeneracy_tolerance =
          require_number(solver, "degeneracy_tolerance", "solver");
    if (solver.contains("secular_tolerance"))
      cfg.secular_tolerance =
          require_number(solver, "secular_tolerance", "solver");
  }

  cfg.quadrature = default_quadrature(max_omega_c);
  if (root.contains("quadrature")) {
    const json& quad = root.at("quadrature");
    if (quad.contains("points")) {
      cfg.quadrature.points = require_int(quad, "points", "quadrature");
      if (cfg.quadrature.points < 100)
        fail("quadrature.points", "must be >= 100");
    }
    if (quad.contains("window")) {
      cfg.quadrature.window = require_number(quad, "window", "quadrature");
      if (!(cfg.quadrature.window > 0))
        fail("quadrature.window", "must be positive");
    }
    if (quad.contains("cutoff_factor")) {
      const double factor = require_number(quad, "cutoff_factor", "quadrature");
      if (!(factor > 1)) fail("quadrature.cutoff_factor", "must be > 1");
      cfg.quadrature.cutoff = factor * max_omega_c;
    }
    if (quad.contains("self_check"))
      cfg.quadrature.self_check = quad.at("self_check").get<bool>();
  }

  if (root.contains("evolve")) {
    const json& ev = root.at("evolve");
    if (ev.contains("t_max"))
      cfg.evolve_t_max = require_number(ev, "t_max", "evolve");
    if (ev.contains("steps")) {
      cfg.evolve_steps = require_int(ev, "steps", "evolve");
      if (cfg.evolve_steps < 1) fail("evolve.steps", "must be >= 1");
    }
    if (ev.contains("initial"))
      cfg.evolve_initial = ev.at("initial").get<std::string>();
  }

  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned() &&
        !root.at("seed").is_number_integer())
      fail("seed", "must be an integer");
    cfg.seed = root.at("seed").get<std::uint64_t>();
  }

  cfg.canonical_json = root.dump();  // nlohmann keeps keys sorted
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace qmelab
