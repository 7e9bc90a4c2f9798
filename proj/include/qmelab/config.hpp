#ifndef QMELAB_CONFIG_HPP
#define QMELAB_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qmelab/bath.hpp"
#include "qmelab/builders.hpp"
#include "qmelab/quadrature.hpp"

namespace qmelab {

struct ExperimentConfig {
  // system block
  int n_sites = 3;
  std::vector<double> fields;
  double g = 0.5;
  double delta = 1.0;

  std::vector<BathSpec> baths;
  std::vector<QmeKind> qmes;

  double epsilon = 0.1;
  std::vector<double> epsilon_grid;  // log grid, defaulted when absent

  std::string sweep_variable;  // "g" or "epsilon"; empty if no sweep block
  std::vector<double> sweep_grid;

  double degeneracy_tolerance = -1.0;
  double secular_tolerance = -1.0;
  PvQuadrature quadrature;

  double evolve_t_max = -1.0;  // negative: choose 100 / gap at run time
  int evolve_steps = 40;
  std::string evolve_initial = "maximally_mixed";

  std::uint64_t seed = 12345;

  std::string canonical_json;  // sorted-key dump used for provenance hashing

  bool equilibrium() const;  // all baths share (beta, mu)
};

// Parse and validate; errors name the offending field, e.g. "baths[0].beta".
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

}  // namespace qmelab

#endif
