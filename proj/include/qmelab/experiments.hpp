#ifndef QMELAB_EXPERIMENTS_HPP
#define QMELAB_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "qmelab/config.hpp"
#include "qmelab/diagnostics.hpp"
#include "qmelab/result_table.hpp"
#include "qmelab/steady_state.hpp"

namespace qmelab {

struct CommandResult {
  int exit_code = 0;
  ResultTable table;
  std::vector<std::string> messages;  // warnings / mismatch reports
};

// steady state + audit per QME at the configured parameter point
CommandResult cmd_ness(const ExperimentConfig& cfg);

// parameter sweep over g or epsilon; epsilon sweeps append slope summary
// rows, g sweeps append the Redfield-vs-ULE boundary current comparison
CommandResult cmd_sweep(const ExperimentConfig& cfg);

// audit matrix: conservation, thermalization, complete positivity per QME,
// compared against the expected weak-coupling pattern
CommandResult cmd_check(const ExperimentConfig& cfg);

// state trajectory under each generator
CommandResult cmd_evolve(const ExperimentConfig& cfg);

// build one generator kind from a config's ingredients
GeneratorParts build_generator(QmeKind kind, const SpinChainSystem& system,
                               const std::vector<BathSpec>& baths,
                               double epsilon, const PvQuadrature& quad,
                               double secular_tol);

int worker_count_from_env();

}  // namespace qmelab

#endif
