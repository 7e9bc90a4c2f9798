#include "qmelab/operator_core.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <sstream>

namespace qmelab {

namespace {

Matrix identity(int n) { return Matrix::Identity(n, n); }

bool all_finite(const std::vector<double>& xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Cx(0, -1), Cx(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

Matrix site_operator(int n_sites, int site, const Matrix& op) {
  if (site < 1 || site > n_sites)
    throw ConfigError("site_operator: site index out of range");
  const int left = 1 << (site - 1);
  const int right = 1 << (n_sites - site);
  Matrix out = Eigen::kroneckerProduct(identity(left), op).eval();
  return Eigen::kroneckerProduct(out, identity(right)).eval();
}

double hermiticity_defect(const Matrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.cwiseAbs().maxCoeff();
  return hermiticity_defect(a) <= rel_tol * std::max(scale, 1e-300);
}

SpinChainSystem build_xxz(int n_sites, const std::vector<double>& fields,
                          double g, double delta) {
  if (n_sites < 1) throw ConfigError("build_xxz: n_sites must be >= 1");
  if (n_sites > 10)
    throw ConfigError("build_xxz: dense representation capped at 10 sites");
  if (static_cast<int>(fields.size()) != n_sites)
    throw ConfigError("build_xxz: fields must have one entry per site");
  if (!all_finite(fields) || !std::isfinite(g) || !std::isfinite(delta))
    throw ConfigError("build_xxz: non-finite parameter");

  SpinChainSystem sys;
  sys.n_sites = n_sites;
  sys.fields = fields;
  sys.g = g;
  sys.delta = delta;

  const int d = sys.dim();

  auto onsite = [&](int site) -> Matrix {
    return 0.5 * fields[site - 1] * site_operator(n_sites, site, pauli_z());
  };
  auto bond = [&](int j) -> Matrix {
    const Matrix xx = site_operator(n_sites, j, pauli_x()) *
                      site_operator(n_sites, j + 1, pauli_x());
    const Matrix yy = site_operator(n_sites, j, pauli_y()) *
                      site_operator(n_sites, j + 1, pauli_y());
    const Matrix zz = site_operator(n_sites, j, pauli_z()) *
                      site_operator(n_sites, j + 1, pauli_z());
    return -g * (xx + yy + delta * zz);
  };

  sys.h_left = Matrix::Zero(d, d);
  sys.h_middle = Matrix::Zero(d, d);
  sys.h_right = Matrix::Zero(d, d);

  if (n_sites == 1) {
    // Degenerate partition: a single site cannot isolate a bulk part that
    // commutes with the coupling, so everything sits in h_middle.
    sys.h_middle = onsite(1);
  } else if (n_sites == 2) {
    // The single bond belongs to both boundaries; split it evenly.
    sys.h_left = onsite(1) + 0.5 * bond(1);
    sys.h_right = onsite(2) + 0.5 * bond(1);
  } else {
    sys.h_left = bond(1) + onsite(1);
    sys.h_right = bond(n_sites - 1) + onsite(n_sites);
    for (int s = 2; s <= n_sites - 1; ++s) sys.h_middle += onsite(s);
    for (int j = 2; j <= n_sites - 2; ++j) sys.h_middle += bond(j);
  }
  sys.h_total = sys.h_left + sys.h_middle + sys.h_right;

  sys.number_op = Matrix::Zero(d, d);
  for (int s = 1; s <= n_sites; ++s)
    sys.number_op += site_operator(n_sites, s, sigma_plus() * sigma_minus());

  if (n_sites == 1) {
    sys.terminals = {1};
  } else {
    sys.terminals = {1, n_sites};
  }
  for (int t : sys.terminals)
    sys.couplings[t] = site_operator(n_sites, t, sigma_minus());

  return sys;
}

EigenBasis eigendecompose(const SpinChainSystem& system,
                          double degeneracy_tolerance) {
  if (!is_hermitian(system.h_total))
    throw NonHermitianState("eigendecompose: Hamiltonian is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(system.h_total);
  if (solver.info() != Eigen::Success)
    throw Error("eigendecompose: eigensolver failed");

  EigenBasis basis;
  basis.energies = solver.eigenvalues();
  basis.vectors = solver.eigenvectors();

  const int d = basis.dim();
  const double width = basis.spectral_width();
  double tol = degeneracy_tolerance;
  if (tol < 0) tol = 1e-9 * std::max(width, 1e-3);

  basis.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < d; ++i)
    basis.min_gap = std::min(basis.min_gap,
                             basis.energies(i + 1) - basis.energies(i));
  if (d > 1 && basis.min_gap < tol) {
    std::ostringstream msg;
    msg << "eigendecompose: spectrum degenerate (min gap " << basis.min_gap
        << " < tolerance " << tol << ")";
    throw DegenerateSpectrum(msg.str());
  }

  basis.number_labels.resize(d);
  for (int a = 0; a < d; ++a) {
    const Cx val =
        basis.vectors.col(a).adjoint() * system.number_op * basis.vectors.col(a);
    const double n = val.real();
    const double rounded = std::round(n);
    if (std::abs(n - rounded) > 1e-8)
      throw SymmetryBroken(
          "eigendecompose: eigenvector straddles excitation sectors");
    basis.number_labels[a] = static_cast<int>(rounded);
  }
  return basis;
}

Vector vectorize(const Matrix& rho) {
  if (rho.rows() != rho.cols())
    throw ConfigError("vectorize: matrix must be square");
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvectorize(const Vector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(
      static_cast<double>(v.size()))));
  if (n * n != v.size())
    throw ConfigError("unvectorize: length is not a perfect square");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

Matrix sandwich_superop(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw ConfigError("sandwich_superop: dimension mismatch");
  // column stacking: vec(a rho b) = (b^T kron a) vec(rho)
  return Eigen::kroneckerProduct(b.transpose(), a).eval();
}

Matrix hamiltonian_superop(const Matrix& h) {
  const int d = static_cast<int>(h.rows());
  const Matrix id = Matrix::Identity(d, d);
  return Cx(0, 1) * (sandwich_superop(id, h) - sandwich_superop(h, id));
}

Matrix dissipator_superop(const Matrix& l) {
  const int d = static_cast<int>(l.rows());
  const Matrix id = Matrix::Identity(d, d);
  const Matrix ldl = l.adjoint() * l;
  return sandwich_superop(l, l.adjoint()) -
         0.5 * sandwich_superop(ldl, id) - 0.5 * sandwich_superop(id, ldl);
}

Matrix apply_superop(const Matrix& superop, const Matrix& rho) {
  return unvectorize(superop * vectorize(rho));
}

double trace_preservation_defect(const Matrix& superop) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(
      static_cast<double>(superop.rows()))));
  const Matrix id = Matrix::Identity(d, d);
  const Eigen::RowVectorXcd row = vectorize(id).adjoint() * superop;
  return row.cwiseAbs().maxCoeff();
}

double trace_distance(const Matrix& rho1, const Matrix& rho2) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
    throw ConfigError("trace_distance: dimension mismatch");
  if (!is_hermitian(rho1, 1e-10) || !is_hermitian(rho2, 1e-10))
    throw NonHermitianState("trace_distance: inputs must be Hermitian");
  const Matrix diff = 0.5 * ((rho1 - rho2) + (rho1 - rho2).adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(diff);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

Matrix gibbs_state(const SpinChainSystem& system, double beta, double mu) {
  if (!(beta > 0)) throw ConfigError("gibbs_state: beta must be positive");
  const Matrix k = system.h_total - mu * system.number_op;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(k);
  const Eigen::VectorXd ev = solver.eigenvalues();
  const double kmin = ev.minCoeff();
  Eigen::VectorXd weights = (-beta * (ev.array() - kmin)).exp();
  weights /= weights.sum();
  return solver.eigenvectors() * weights.asDiagonal() *
         solver.eigenvectors().adjoint();
}

double min_eigenvalue(const Matrix& hermitian_matrix) {
  const Matrix h = 0.5 * (hermitian_matrix + hermitian_matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  return solver.eigenvalues().minCoeff();
}

}  // namespace qmelab
