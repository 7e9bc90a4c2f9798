#ifndef QMELAB_STEADY_STATE_HPP
#define QMELAB_STEADY_STATE_HPP

#include <vector>

#include "qmelab/builders.hpp"
#include "qmelab/operator_core.hpp"

namespace qmelab {

struct SteadyStateReport {
  Matrix rho;
  double residual = 0.0;        // ||L vec(rho)||_2 after cleanup
  double gap = 0.0;             // decay rate of the next-slowest mode
  double second_eig_mag = 0.0;  // |lambda| of the second-nearest-to-zero mode
  bool unique = false;
  double hermiticity_defect = 0.0;
  bool traceless_pathology = false;  // eig null vector had near-zero trace
};

// Null state of the full Liouvillian: dense eigendecomposition for the gap
// and uniqueness diagnostics, then a trace-constrained linear solve with
// iterative refinement for the state itself.
SteadyStateReport solve_ness(const GeneratorParts& parts);

struct PerturbativeNess {
  Eigen::VectorXd populations;   // leading-order eigenbasis populations
  Matrix rho0;                   // site-basis matrix of those populations
  Matrix coherences2;            // eigenbasis off-diagonals at order eps^2
  Eigen::MatrixXd rate_matrix;   // population rate matrix at unit coupling
};

// Leading orders of the steady state: populations from the null vector of
// the rate matrix R(a,n) = <a| L2[|n><n|] |a>, coherences from
// <a|rho|n> = -<a| L2[rho0] |n> / (i (E_a - E_n)).
PerturbativeNess perturbative_ness(const GeneratorParts& parts,
                                   const EigenBasis& basis);

// exp(t Liouvillian) applied to rho0, re-symmetrized
Matrix evolve(const GeneratorParts& parts, const Matrix& rho0, double t);

struct PositivityTrace {
  double min_eigenvalue = 0.0;
  double t_at_min = 0.0;
  std::vector<double> minima;  // per grid point
};

PositivityTrace positivity_probe(const GeneratorParts& parts,
                                 const Matrix& rho0,
                                 const std::vector<double>& t_grid);

// shared propagators across many initial states on the same grid
std::vector<PositivityTrace> positivity_probe(
    const GeneratorParts& parts, const std::vector<Matrix>& initial_states,
    const std::vector<double>& t_grid);

}  // namespace qmelab

#endif
