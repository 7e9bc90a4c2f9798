#ifndef QMELAB_BUILDERS_HPP
#define QMELAB_BUILDERS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmelab/bath.hpp"
#include "qmelab/operator_core.hpp"
#include "qmelab/quadrature.hpp"

namespace qmelab {

enum class QmeKind { redfield, local_lindblad, eigenbasis_lindblad,
                     universal_lindblad };

std::string qme_label(QmeKind kind);
QmeKind qme_from_label(const std::string& label);

// Explicit GKSL data for the completely positive generators. The jumps plus
// the Lamb-shift commutator reassemble the full dissipator superoperator.
struct LindbladForm {
  Matrix h_lamb;                                  // Hermitian
  std::vector<std::pair<Matrix, double>> jumps;   // (L, gamma >= 0)
};

// One assembled generator. The full Liouvillian is
//   rho' = i [rho, hamiltonian] + dissipator[rho],
// where `dissipator` carries everything beyond the bare system commutator
// (bath-induced jumps and Lamb-shift commutators, epsilon^2 included) and
// splits exactly into per-bath parts.
struct GeneratorParts {
  QmeKind kind = QmeKind::redfield;
  Matrix hamiltonian;        // system Hamiltonian
  Superoperator dissipator;  // epsilon^2 L2, per-bath split populated
  double epsilon = 0.0;
  std::optional<LindbladForm> lindblad;
  std::vector<std::string> provenance;

  int hilbert_dim() const { return static_cast<int>(hamiltonian.rows()); }
  Matrix liouvillian() const {
    return hamiltonian_superop(hamiltonian) + dissipator.matrix;
  }
};

// Redfield generator from the eigenpair sums with coefficients redfield_C/D.
GeneratorParts build_redfield(const SpinChainSystem& system,
                              const std::vector<BathSpec>& baths, double epsilon,
                              const PvQuadrature& quad);

// Same generator assembled through the Hermitian-coupling route: the
// coupling is recast as X_1 = S + S^dag, X_2 = i(S - S^dag) with the bath
// correlation matrix G(w), and the half-Fourier transforms are taken of G.
// Agrees with build_redfield entrywise.
GeneratorParts build_redfield_hermitian(const SpinChainSystem& system,
                                        const std::vector<BathSpec>& baths,
                                        double epsilon,
                                        const PvQuadrature& quad);

// Local Lindblad: independent emission/absorption on each terminal site at
// the local field frequency, plus an on-site Lamb shift.
GeneratorParts build_local_lindblad(const SpinChainSystem& system,
                                    const std::vector<BathSpec>& baths,
                                    double epsilon, const PvQuadrature& quad);

// Eigenbasis (secular) Lindblad: Redfield eigenpair sums restricted to
// resonant Bohr-frequency pairs. secular_tol < 0 uses 1e-9 * spectral width.
GeneratorParts build_eigenbasis_lindblad(const SpinChainSystem& system,
                                         const std::vector<BathSpec>& baths,
                                         double epsilon,
                                         const PvQuadrature& quad,
                                         double secular_tol = -1.0);

// Universal Lindblad: jump operators from the square-root spectral matrix
// g(w) and a Lamb shift from its principal-value convolution.
GeneratorParts build_ule(const SpinChainSystem& system,
                         const std::vector<BathSpec>& baths, double epsilon,
                         const PvQuadrature& quad);

// Rescale to a new coupling strength; the dissipator scales exactly as
// epsilon^2, so sweeps do not need to re-run quadrature.
GeneratorParts with_epsilon(const GeneratorParts& parts, double epsilon);

// superoperator assembled from a LindbladForm (Lamb commutator + jumps)
Matrix reassemble_lindblad(const LindbladForm& form);

// -------------------------------------------------------------------------
// Complete-positivity audit
// -------------------------------------------------------------------------

// Orthonormal traceless Hermitian basis (generalized Gell-Mann matrices),
// ordered symmetric, antisymmetric, diagonal.
std::vector<Matrix> gell_mann_basis(int dim);

struct KossakowskiMatrix {
  std::vector<Matrix> basis;
  Matrix matrix;  // Hermitian (D^2-1) x (D^2-1)
  double min_eigenvalue = 0.0;
  Matrix h_eff;   // Hamiltonian part separated during extraction
  double reassembly_error = 0.0;
};

// Unique coefficient matrix of the dissipator over the Gell-Mann basis.
// Requires a trace- and Hermiticity-preserving input; a reassembly mismatch
// beyond 1e-8 signals a non-GKSL-decomposable map and raises
// ExtractionFailed.
KossakowskiMatrix extract_kossakowski(const GeneratorParts& parts);

}  // namespace qmelab

#endif
