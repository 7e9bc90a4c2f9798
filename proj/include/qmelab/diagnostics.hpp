#ifndef QMELAB_DIAGNOSTICS_HPP
#define QMELAB_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qmelab/builders.hpp"
#include "qmelab/operator_core.hpp"

namespace qmelab {

// spin current through bond j (1-based), positive when excitations flow
// from site j+1 toward site j:
//   I_j = 4 i g ( <s+_j s-_{j+1}> - <s-_j s+_{j+1}> )
double bond_current(const Matrix& rho, const SpinChainSystem& system, int bond);

// same current from the eigenbasis coherence sum for the partial
// magnetization sum_{k<=j} sz_k; agrees with bond_current identically
double bond_current_from_coherences(const Matrix& rho,
                                    const SpinChainSystem& system,
                                    const EigenBasis& basis, int bond);

enum class BoundaryWeight { magnetization, energy };

// Tr(W L2^(terminal)[rho]) with W in {M_z, H_S}; the coupling epsilon^2 is
// already inside the per-bath dissipator split.
double boundary_current(const GeneratorParts& parts,
                        const SpinChainSystem& system, const Matrix& rho,
                        int terminal, BoundaryWeight weight);

struct CurrentReport {
  std::vector<double> bond_currents;
  double boundary_left = 0.0;
  double boundary_right = 0.0;
  double energy_left = 0.0;
  double energy_right = 0.0;
  // relative continuity residuals: {I_1 + IB_L, I_last - IB_R, IB_L + IB_R}
  std::vector<double> continuity_residuals;
};

CurrentReport current_report(const GeneratorParts& parts,
                             const SpinChainSystem& system, const Matrix& rho);

// operators commuting with every bath coupling: the bulk Hamiltonian,
// interior sz, and interior bond terms
std::vector<Matrix> conserved_test_operators(const SpinChainSystem& system);

// max |Tr(O L2[rho])| over operators and a state panel; every operator is
// prechecked to commute with the couplings at all terminals
double conservation_audit(const GeneratorParts& parts,
                          const SpinChainSystem& system,
                          const std::vector<Matrix>& test_operators,
                          const std::vector<Matrix>& states);

// deviations between two generators applied to random eigenbasis-diagonal
// states: (max diagonal deviation, max off-diagonal deviation)
std::pair<double, double> generator_compare_on_diagonals(
    const GeneratorParts& a, const GeneratorParts& b, const EigenBasis& basis,
    int n_states = 10, std::uint64_t seed = 7);

// trace distance of the steady state to the Gibbs state of (beta, mu)
double thermalization_check(const GeneratorParts& parts,
                            const SpinChainSystem& system, double beta,
                            double mu);

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  int n_used = 0;
  bool floored = false;  // points below the numeric floor were dropped
};

// least-squares slope of log y against log x; magnitudes below 1e-14 are
// treated as numerically zero and excluded
SlopeFit scaling_slope(const std::vector<double>& xs,
                       const std::vector<double>& ys);

struct AuditReport {
  std::string qme;
  double epsilon = 0.0;
  double thermal_distance = 0.0;
  double thermal_slope = 0.0;
  double conservation_residual = 0.0;
  double dissipator_norm = 0.0;
  double kossakowski_min = 0.0;
  bool population_match = false;
  double population_dev = 0.0;
  bool coherence_match = false;
  double coherence_dev = 0.0;
  std::vector<std::string> provenance;
};

}  // namespace qmelab

#endif
