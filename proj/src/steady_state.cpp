#include "qmelab/steady_state.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmelab {

SteadyStateReport solve_ness(const GeneratorParts& parts) {
  const int d = parts.hilbert_dim();
  const int d2 = d * d;
  const Matrix liou = parts.liouvillian();

  Eigen::ComplexEigenSolver<Matrix> ces(liou);
  if (ces.info() != Eigen::Success)
    throw Error("solve_ness: eigendecomposition failed");

  std::vector<int> order(d2);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(ces.eigenvalues()(a)) < std::abs(ces.eigenvalues()(b));
  });

  SteadyStateReport report;
  report.second_eig_mag = std::abs(ces.eigenvalues()(order[1]));
  report.gap = std::numeric_limits<double>::infinity();
  for (int i = 1; i < d2; ++i)
    report.gap =
        std::min(report.gap, -ces.eigenvalues()(order[i]).real());

  const Vector null_vec = ces.eigenvectors().col(order[0]);
  report.traceless_pathology =
      std::abs(unvectorize(null_vec).trace()) < 1e-8;

  // trace-constrained solve: replace one row of L with the trace functional
  Matrix a = liou;
  a.row(0) = vectorize(Matrix::Identity(d, d)).transpose();
  Vector b = Vector::Zero(d2);
  b(0) = 1.0;
  Eigen::PartialPivLU<Matrix> lu(a);
  Vector x = lu.solve(b);
  for (int pass = 0; pass < 2; ++pass) x += lu.solve(b - a * x);

  Matrix rho = unvectorize(x);
  report.hermiticity_defect = hermiticity_defect(rho);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  report.rho = rho;
  report.residual = (liou * vectorize(rho)).norm();

  const double liou_norm = liou.norm();
  if (!(report.residual <= 1e-10 * std::max(liou_norm, 1e-300)))
    throw NonUniqueSteadyState(
        "solve_ness: residual too large, Liouvillian null space is "
        "ill-conditioned");
  report.unique = report.second_eig_mag >
                  1e3 * std::max(report.residual, 1e-300);
  if (!report.unique)
    throw NonUniqueSteadyState(
        "solve_ness: null space dimension exceeds one under tolerance");
  return report;
}

PerturbativeNess perturbative_ness(const GeneratorParts& parts,
                                   const EigenBasis& basis) {
  const int d = basis.dim();
  const double eps2 = parts.epsilon * parts.epsilon;
  const Matrix& u = basis.vectors;
  const Matrix& l2 = parts.dissipator.matrix;

  PerturbativeNess out;
  out.rate_matrix.resize(d, d);
  for (int n = 0; n < d; ++n) {
    const Matrix proj = u.col(n) * u.col(n).adjoint();
    const Matrix img = basis.to_eigenbasis(apply_superop(l2, proj)) / eps2;
    for (int a = 0; a < d; ++a) out.rate_matrix(a, n) = img(a, a).real();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.rate_matrix,
                                        Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e3 * std::max(sv(0) * 1e-14, 1e-300);
  int null_dim = 0;
  for (int i = 0; i < d; ++i)
    if (sv(i) <= tol) ++null_dim;
  if (null_dim != 1)
    throw NonErgodicRateMatrix(
        "perturbative_ness: rate matrix null space dimension is " +
        std::to_string(null_dim));

  Eigen::VectorXd p = svd.matrixV().col(d - 1);
  const double total = p.sum();
  if (std::abs(total) < 1e-10)
    throw NonErgodicRateMatrix(
        "perturbative_ness: null vector has vanishing total probability");
  p /= total;
  out.populations = p;
  out.rho0 = u * p.cast<Cx>().asDiagonal() * u.adjoint();

  const Matrix img0 = basis.to_eigenbasis(apply_superop(l2, out.rho0)) / eps2;
  out.coherences2 = Matrix::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int n = 0; n < d; ++n) {
      if (a == n) continue;
      const double gap = basis.energies(a) - basis.energies(n);
      out.coherences2(a, n) = -img0(a, n) / (Cx(0, 1) * gap);
    }
  return out;
}

Matrix evolve(const GeneratorParts& parts, const Matrix& rho0, double t) {
  if (t < 0) throw ConfigError("evolve: t must be non-negative");
  if (t == 0.0) return rho0;
  const Matrix propagator = (t * parts.liouvillian()).exp();
  const Matrix rho = unvectorize((propagator * vectorize(rho0)).eval());
  if (!rho.allFinite())
    throw EvolutionFailed("evolve: matrix exponential produced non-finite"
                          " entries");
  return 0.5 * (rho + rho.adjoint());
}

std::vector<PositivityTrace> positivity_probe(
    const GeneratorParts& parts, const std::vector<Matrix>& initial_states,
    const std::vector<double>& t_grid) {
  const Matrix liou = parts.liouvillian();
  std::vector<PositivityTrace> traces(initial_states.size());
  std::vector<Vector> states;
  states.reserve(initial_states.size());
  for (size_t s = 0; s < initial_states.size(); ++s) {
    states.push_back(vectorize(initial_states[s]));
    traces[s].min_eigenvalue = std::numeric_limits<double>::infinity();
  }

  double t_prev = 0.0;
  for (double t : t_grid) {
    if (t < t_prev)
      throw ConfigError("positivity_probe: t_grid must be non-decreasing");
    if (t > t_prev) {
      const Matrix step = ((t - t_prev) * liou).exp();
      for (auto& v : states) v = step * v;
      t_prev = t;
    }
    for (size_t s = 0; s < states.size(); ++s) {
      const double m = min_eigenvalue(unvectorize(states[s]));
      traces[s].minima.push_back(m);
      if (m < traces[s].min_eigenvalue) {
        traces[s].min_eigenvalue = m;
        traces[s].t_at_min = t;
      }
    }
  }
  return traces;
}

PositivityTrace positivity_probe(const GeneratorParts& parts,
                                 const Matrix& rho0,
                                 const std::vector<double>& t_grid) {
  return positivity_probe(parts, std::vector<Matrix>{rho0}, t_grid).front();
}

}  // namespace qmelab
