#ifndef QMELAB_OPERATOR_CORE_HPP
#define QMELAB_OPERATOR_CORE_HPP

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include "qmelab/errors.hpp"

namespace qmelab {

using Cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// -------------------------------------------------------------------------
// Elementary operators
// -------------------------------------------------------------------------

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix sigma_plus();
Matrix sigma_minus();

// Embed a single-site operator into the full chain Hilbert space.
// Sites are 1-based; site 1 is the leftmost tensor factor.
Matrix site_operator(int n_sites, int site, const Matrix& op);

// max |A - A^dag| <= tol * max|A|
bool is_hermitian(const Matrix& a, double rel_tol = 1e-12);
double hermiticity_defect(const Matrix& a);

// -------------------------------------------------------------------------
// Spin chain with the boundary/bulk Hamiltonian partition
// -------------------------------------------------------------------------

// XXZ chain in a site-dependent field, boundary sites coupled to baths
// through sigma_minus. The Hamiltonian is split as
//   h_total = h_left + h_middle + h_right
// where h_middle commutes with every bath coupling operator, and h_left
// (h_right) collects the terms that fail to commute with the coupling at
// the left (right) terminal: the boundary bond plus the boundary field.
struct SpinChainSystem {
  int n_sites = 0;
  std::vector<double> fields;
  double g = 0.0;
  double delta = 0.0;

  Matrix h_total;
  Matrix number_op;
  Matrix h_left;
  Matrix h_middle;
  Matrix h_right;

  std::vector<int> terminals;       // {1} for a single site, else {1, n}
  std::map<int, Matrix> couplings;  // terminal site -> sigma_minus there

  int dim() const { return 1 << n_sites; }
};

SpinChainSystem build_xxz(int n_sites, const std::vector<double>& fields,
                          double g, double delta);

// -------------------------------------------------------------------------
// Eigenbasis with excitation-number labels
// -------------------------------------------------------------------------

struct EigenBasis {
  Eigen::VectorXd energies;        // ascending
  Matrix vectors;                  // columns are eigenkets
  std::vector<int> number_labels;  // excitation number per eigenstate
  double min_gap = 0.0;

  int dim() const { return static_cast<int>(energies.size()); }
  double spectral_width() const {
    return energies.size() ? energies(energies.size() - 1) - energies(0) : 0.0;
  }
  // operator expressed in the eigenbasis, U^dag A U
  Matrix to_eigenbasis(const Matrix& a) const {
    return vectors.adjoint() * a * vectors;
  }
  Matrix from_eigenbasis(const Matrix& a) const {
    return vectors * a * vectors.adjoint();
  }
};

// Fails with DegenerateSpectrum when the smallest level spacing drops below
// degeneracy_tolerance (negative: use 1e-9 * spectral width), and with
// SymmetryBroken when an eigenvector straddles excitation sectors.
EigenBasis eigendecompose(const SpinChainSystem& system,
                          double degeneracy_tolerance = -1.0);

// -------------------------------------------------------------------------
// Vectorization (column stacking) and superoperator primitives
// -------------------------------------------------------------------------

enum class VecConvention { column_stacking };

struct Superoperator {
  Matrix matrix;  // D^2 x D^2
  VecConvention convention = VecConvention::column_stacking;
  std::map<int, Matrix> per_bath;  // terminal -> per-bath component

  int dim() const { return static_cast<int>(matrix.rows()); }
};

Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v);

// superoperator for rho -> a rho b
Matrix sandwich_superop(const Matrix& a, const Matrix& b);
// superoperator for rho -> i [rho, h]
Matrix hamiltonian_superop(const Matrix& h);
// superoperator for rho -> l rho l^dag - 1/2 {l^dag l, rho}
Matrix dissipator_superop(const Matrix& l);

Matrix apply_superop(const Matrix& superop, const Matrix& rho);

// max row-sum of |vec(1)^dag . superop|, zero for trace-preserving maps
double trace_preservation_defect(const Matrix& superop);

// -------------------------------------------------------------------------
// State metrics
// -------------------------------------------------------------------------

double trace_distance(const Matrix& rho1, const Matrix& rho2);

// exp(-beta (H - mu N)) / Z, computed with shifted exponents
Matrix gibbs_state(const SpinChainSystem& system, double beta, double mu);

double min_eigenvalue(const Matrix& hermitian_matrix);

}  // namespace qmelab

#endif
