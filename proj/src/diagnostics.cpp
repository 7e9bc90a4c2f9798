#include "qmelab/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "qmelab/rng.hpp"
#include "qmelab/steady_state.hpp"

namespace qmelab {

namespace {

double real_with_check(Cx value, const char* what) {
  const double tol = 1e-12 * std::max(1.0, std::abs(value.real()));
  if (std::abs(value.imag()) > tol) {
    std::ostringstream msg;
    msg << what << ": imaginary residue " << value.imag()
        << " exceeds tolerance";
    throw NonHermitianState(msg.str());
  }
  return value.real();
}

double rel_residual(double a, double b) {
  return std::abs(a + b) / std::max({std::abs(a), std::abs(b), 1e-14});
}

Matrix magnetization_op(const SpinChainSystem& system) {
  const int d = system.dim();
  Matrix m = Matrix::Zero(d, d);
  for (int s = 1; s <= system.n_sites; ++s)
    m += site_operator(system.n_sites, s, pauli_z());
  return m;
}

}  // namespace

double bond_current(const Matrix& rho, const SpinChainSystem& system,
                    int bond) {
  if (bond < 1 || bond > system.n_sites - 1)
    throw ConfigError("bond_current: bond index out of range");
  const Matrix pm = site_operator(system.n_sites, bond, sigma_plus()) *
                    site_operator(system.n_sites, bond + 1, sigma_minus());
  const Matrix mp = site_operator(system.n_sites, bond, sigma_minus()) *
                    site_operator(system.n_sites, bond + 1, sigma_plus());
  const Cx value =
      Cx(0, 4.0 * system.g) * ((rho * pm).trace() - (rho * mp).trace());
  return real_with_check(value, "bond_current");
}

double bond_current_from_coherences(const Matrix& rho,
                                    const SpinChainSystem& system,
                                    const EigenBasis& basis, int bond) {
  if (bond < 1 || bond > system.n_sites - 1)
    throw ConfigError("bond_current_from_coherences: bond out of range");
  const int d = system.dim();
  Matrix partial = Matrix::Zero(d, d);
  for (int s = 1; s <= bond; ++s)
    partial += site_operator(system.n_sites, s, pauli_z());
  const Matrix rho_eig = basis.to_eigenbasis(rho);
  const Matrix op_eig = basis.to_eigenbasis(partial);
  Cx acc = 0.0;
  for (int a = 0; a < d; ++a)
    for (int n = 0; n < d; ++n)
      acc += (basis.energies(a) - basis.energies(n)) * rho_eig(a, n) *
             op_eig(n, a);
  return real_with_check(Cx(0, -1) * acc, "bond_current_from_coherences");
}

double boundary_current(const GeneratorParts& parts,
                        const SpinChainSystem& system, const Matrix& rho,
                        int terminal, BoundaryWeight weight) {
  auto it = parts.dissipator.per_bath.find(terminal);
  if (it == parts.dissipator.per_bath.end())
    throw SplitUnavailable("boundary_current: no per-bath split for terminal " +
                           std::to_string(terminal));
  const Matrix w = weight == BoundaryWeight::magnetization
                       ? magnetization_op(system)
                       : system.h_total;
  const Matrix img = apply_superop(it->second, rho);
  return real_with_check((w * img).trace(), "boundary_current");
}

CurrentReport current_report(const GeneratorParts& parts,
                             const SpinChainSystem& system, const Matrix& rho) {
  CurrentReport report;
  for (int j = 1; j <= system.n_sites - 1; ++j)
    report.bond_currents.push_back(bond_current(rho, system, j));
  const int left = system.terminals.front();
  const int right = system.terminals.back();
  report.boundary_left =
      boundary_current(parts, system, rho, left, BoundaryWeight::magnetization);
  report.energy_left =
      boundary_current(parts, system, rho, left, BoundaryWeight::energy);
  if (right != left) {
    report.boundary_right = boundary_current(parts, system, rho, right,
                                             BoundaryWeight::magnetization);
    report.energy_right =
        boundary_current(parts, system, rho, right, BoundaryWeight::energy);
  }
  if (!report.bond_currents.empty()) {
    // at a steady state the bond currents close onto the boundary ones:
    // I_1 = -IB_L and I_last = +IB_R
    report.continuity_residuals.push_back(
        rel_residual(report.bond_currents.front(), report.boundary_left));
    report.continuity_residuals.push_back(
        rel_residual(report.bond_currents.back(), -report.boundary_right));
    report.continuity_residuals.push_back(
        rel_residual(report.boundary_left, report.boundary_right));
  }
  return report;
}

std::vector<Matrix> conserved_test_operators(const SpinChainSystem& system) {
  std::vector<Matrix> ops;
  const int n = system.n_sites;
  if (n >= 3) {
    ops.push_back(system.h_middle);
    for (int s = 2; s <= n - 1; ++s)
      ops.push_back(site_operator(n, s, pauli_z()));
    for (int j = 2; j <= n - 2; ++j) {
      const Matrix xx =
          site_operator(n, j, pauli_x()) * site_operator(n, j + 1, pauli_x());
      const Matrix yy =
          site_operator(n, j, pauli_y()) * site_operator(n, j + 1, pauli_y());
      const Matrix zz =
          site_operator(n, j, pauli_z()) * site_operator(n, j + 1, pauli_z());
      ops.push_back(xx + yy + system.delta * zz);
    }
  }
  return ops;
}

double conservation_audit(const GeneratorParts& parts,
                          const SpinChainSystem& system,
                          const std::vector<Matrix>& test_operators,
                          const std::vector<Matrix>& states) {
  for (const Matrix& op : test_operators) {
    const double scale = std::max(op.cwiseAbs().maxCoeff(), 1e-300);
    for (const auto& [terminal, s] : system.couplings) {
      const double dev =
          std::max((op * s - s * op).cwiseAbs().maxCoeff(),
                   (op * s.adjoint() - s.adjoint() * op).cwiseAbs().maxCoeff());
      if (dev > 1e-12 * scale)
        throw InvalidTestOperator(
            "conservation_audit: operator does not commute with the bath "
            "coupling at terminal " +
            std::to_string(terminal));
    }
  }
  double worst = 0.0;
  for (const Matrix& state : states) {
    const Matrix img = apply_superop(parts.dissipator.matrix, state);
    for (const Matrix& op : test_operators)
      worst = std::max(worst, std::abs((op * img).trace()));
  }
  return worst;
}

std::pair<double, double> generator_compare_on_diagonals(
    const GeneratorParts& a, const GeneratorParts& b, const EigenBasis& basis,
    int n_states, std::uint64_t seed) {
  const int d = basis.dim();
  Rng rng(seed);
  const Matrix diff = a.dissipator.matrix - b.dissipator.matrix;
  double diag_dev = 0.0, offdiag_dev = 0.0;
  for (int s = 0; s < n_states; ++s) {
    Eigen::VectorXd p(d);
    for (int i = 0; i < d; ++i) p(i) = -std::log(1.0 - rng.uniform());
    p /= p.sum();
    const Matrix rho =
        basis.vectors * p.cast<Cx>().asDiagonal() * basis.vectors.adjoint();
    const Matrix delta = basis.to_eigenbasis(apply_superop(diff, rho));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i == j)
          diag_dev = std::max(diag_dev, std::abs(delta(i, j)));
        else
          offdiag_dev = std::max(offdiag_dev, std::abs(delta(i, j)));
      }
  }
  return {diag_dev, offdiag_dev};
}

double thermalization_check(const GeneratorParts& parts,
                            const SpinChainSystem& system, double beta,
                            double mu) {
  const SteadyStateReport report = solve_ness(parts);
  return trace_distance(report.rho, gibbs_state(system, beta, mu));
}

SlopeFit scaling_slope(const std::vector<double>& xs,
                       const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw ConfigError("scaling_slope: grid size mismatch");
  SlopeFit fit;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 1e-14)) {
      fit.floored = true;
      continue;
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  fit.n_used = static_cast<int>(lx.size());
  if (fit.n_used < 4)
    throw InsufficientData("scaling_slope: fewer than 4 usable points");
  const double n = static_cast<double>(fit.n_used);
  double mx = 0, my = 0;
  for (int i = 0; i < fit.n_used; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < fit.n_used; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  double ss_res = 0;
  for (int i = 0; i < fit.n_used; ++i) {
    const double r = ly[i] - my - fit.slope * (lx[i] - mx);
    ss_res += r * r;
  }
  if (fit.n_used > 2)
    fit.stderr_ = std::sqrt(ss_res / (n - 2.0) / sxx);
  return fit;
}

}  // namespace qmelab
