#include "qmelab/builders.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace qmelab {

namespace {

using Cx = std::complex<double>;
const Cx kI(0.0, 1.0);

std::vector<BathSpec> validated_baths(const SpinChainSystem& sys,
                                      std::vector<BathSpec> baths) {
  if (baths.empty()) throw ConfigError("builders: at least one bath required");
  std::sort(baths.begin(), baths.end(),
            [](const BathSpec& a, const BathSpec& b) {
              return a.terminal < b.terminal;
            });
  for (size_t i = 0; i + 1 < baths.size(); ++i)
    if (baths[i].terminal == baths[i + 1].terminal)
      throw ConfigError("builders: duplicate bath terminal");
  for (const BathSpec& b : baths) {
    if (!sys.couplings.count(b.terminal))
      throw ConfigError("builders: bath terminal is not a chain terminal");
    if (!(b.beta > 0)) throw ConfigError("builders: bath beta must be > 0");
    if (!(b.mu < 0)) throw ConfigError("builders: bosonic bath requires mu < 0");
  }
  return baths;
}

// rho -> a rho  and  rho -> rho a, as superoperator matrices
Matrix left_mult(const Matrix& a) {
  return sandwich_superop(a, Matrix::Identity(a.rows(), a.cols()));
}
Matrix right_mult(const Matrix& a) {
  return sandwich_superop(Matrix::Identity(a.rows(), a.cols()), a);
}

// superoperator for rho -> [b, a rho] + h.c.  (h.c. of the whole term)
Matrix commutator_pair_superop(const Matrix& b, const Matrix& a) {
  Matrix term = left_mult(b * a) - sandwich_superop(a, b);
  // h.c.: rho a^dag b - b rho a^dag
  term += right_mult(a.adjoint() * b) - sandwich_superop(b, a.adjoint());
  return term;
}

// Hadamard coefficients over eigenpairs: out(a,g) = coeff(E_g - E_a)
template <class F>
Matrix bohr_coefficients(const EigenBasis& basis, F&& coeff) {
  const int d = basis.dim();
  Matrix out(d, d);
  std::map<double, Cx> memo;
  for (int a = 0; a < d; ++a)
    for (int g = 0; g < d; ++g) {
      const double e = basis.energies(g) - basis.energies(a);
      auto it = memo.find(e);
      if (it == memo.end()) it = memo.emplace(e, coeff(e)).first;
      out(a, g) = it->second;
    }
  return out;
}

struct BuildInput {
  const SpinChainSystem& sys;
  std::vector<BathSpec> baths;
  EigenBasis basis;
  double epsilon;
  PvQuadrature quad;
};

BuildInput prepare(const SpinChainSystem& sys, const std::vector<BathSpec>& baths,
                   double epsilon, const PvQuadrature& quad) {
  if (!(epsilon > 0) || !std::isfinite(epsilon))
    throw ConfigError("builders: epsilon must be positive");
  return BuildInput{sys, validated_baths(sys, baths), eigendecompose(sys),
                    epsilon, quad};
}

void record_quadrature(GeneratorParts& parts, const PvQuadrature& quad) {
  std::ostringstream line;
  line << "quadrature: points=" << quad.points << " window=" << quad.window
       << " cutoff=" << quad.cutoff << " self_check=" << quad.self_check;
  parts.provenance.push_back(line.str());
}

}  // namespace

std::string qme_label(QmeKind kind) {
  switch (kind) {
    case QmeKind::redfield: return "re";
    case QmeKind::local_lindblad: return "lle";
    case QmeKind::eigenbasis_lindblad: return "ele";
    case QmeKind::universal_lindblad: return "ule";
  }
  return "?";
}

QmeKind qme_from_label(const std::string& label) {
  if (label == "re") return QmeKind::redfield;
  if (label == "lle") return QmeKind::local_lindblad;
  if (label == "ele") return QmeKind::eigenbasis_lindblad;
  if (label == "ule") return QmeKind::universal_lindblad;
  throw ConfigError("unknown QME kind '" + label + "'");
}

GeneratorParts build_redfield(const SpinChainSystem& system,
                              const std::vector<BathSpec>& baths, double epsilon,
                              const PvQuadrature& quad) {
  BuildInput in = prepare(system, baths, epsilon, quad);
  const int d = system.dim();
  const double eps2 = epsilon * epsilon;
  const Matrix& u = in.basis.vectors;

  GeneratorParts parts;
  parts.kind = QmeKind::redfield;
  parts.hamiltonian = system.h_total;
  parts.epsilon = epsilon;
  parts.dissipator.matrix = Matrix::Zero(d * d, d * d);

  for (const BathSpec& bath : in.baths) {
    const Matrix s = system.couplings.at(bath.terminal);
    const Matrix sdag = s.adjoint();
    const Matrix s_eig = u.adjoint() * s * u;

    const Matrix cmat = bohr_coefficients(
        in.basis, [&](double e) { return redfield_C(bath, e, in.quad); });
    const Matrix dmat = bohr_coefficients(
        in.basis, [&](double e) { return redfield_D(bath, e, in.quad); });

    // S1 carries the emission weight D, S2 the absorption weight C
    const Matrix s1 = u * s_eig.cwiseProduct(dmat) * u.adjoint();
    const Matrix s2 = u * s_eig.cwiseProduct(cmat) * u.adjoint();

    // -([S^dag, S1 rho] + [rho S2, S^dag] + h.c.)
    Matrix part = commutator_pair_superop(sdag, s1);
    part += right_mult(s2 * sdag) - sandwich_superop(sdag, s2);
    part += left_mult(s * s2.adjoint()) - sandwich_superop(s2.adjoint(), s);
    part *= -eps2;

    parts.dissipator.per_bath[bath.terminal] = part;
    parts.dissipator.matrix += part;
  }
  record_quadrature(parts, quad);
  return parts;
}

GeneratorParts build_redfield_hermitian(const SpinChainSystem& system,
                                        const std::vector<BathSpec>& baths,
                                        double epsilon,
                                        const PvQuadrature& quad) {
  BuildInput in = prepare(system, baths, epsilon, quad);
  const int d = system.dim();
  const double eps2 = epsilon * epsilon;
  const Matrix& u = in.basis.vectors;

  GeneratorParts parts;
  parts.kind = QmeKind::redfield;
  parts.hamiltonian = system.h_total;
  parts.epsilon = epsilon;
  parts.dissipator.matrix = Matrix::Zero(d * d, d * d);

  for (const BathSpec& bath : in.baths) {
    const Matrix s = system.couplings.at(bath.terminal);
    std::array<Matrix, 2> x_site = {s + s.adjoint(), kI * (s - s.adjoint())};
    std::array<Matrix, 2> x_eig = {u.adjoint() * x_site[0] * u,
                                   u.adjoint() * x_site[1] * u};

    // Half-Fourier transform of the correlation matrix:
    //   Gamma(x) = pi G(x) - i P int G(w) / (w - x) dw.
    // The scalar profiles a (diagonal) and c (signed off-diagonal weight)
    // determine the whole 2x2 block.
    auto profile_a = [&](double w) {
      const Eigen::Matrix2cd g = ule_G_block(bath, w);
      return g(0, 0).real();
    };
    auto profile_c = [&](double w) {
      const Eigen::Matrix2cd g = ule_G_block(bath, w);
      return (kI * g(0, 1)).real();  // G01 = -i c
    };
    std::map<double, Eigen::Matrix2cd> gamma_memo;
    auto gamma = [&](double x) -> Eigen::Matrix2cd {
      auto it = gamma_memo.find(x);
      if (it != gamma_memo.end()) return it->second;
      const double half_width = in.quad.cutoff + std::abs(x);
      const double pv_a =
          pv_fullline(profile_a, x, half_width, {0.0}, {}, in.quad);
      const double pv_c =
          pv_fullline(profile_c, x, half_width, {0.0}, {}, in.quad);
      const double a = profile_a(x);
      const double c = profile_c(x);
      Eigen::Matrix2cd g;
      g(0, 0) = M_PI * a - kI * pv_a;
      g(1, 1) = g(0, 0);
      g(0, 1) = -kI * M_PI * c - pv_c;
      g(1, 0) = kI * M_PI * c + pv_c;
      gamma_memo.emplace(x, g);
      return g;
    };

    Matrix part = Matrix::Zero(d * d, d * d);
    for (int k = 0; k < 2; ++k) {
      for (int kp = 0; kp < 2; ++kp) {
        // X_{k' k} = sum over eigenpairs of X_{k'} weighted by Gamma_{k k'}
        const Matrix coeff = bohr_coefficients(in.basis, [&](double e) {
          return gamma(e)(k, kp);
        });
        const Matrix xdressed = u * x_eig[kp].cwiseProduct(coeff) * u.adjoint();
        part += commutator_pair_superop(x_site[k], xdressed);
      }
    }
    part *= -eps2;
    parts.dissipator.per_bath[bath.terminal] = part;
    parts.dissipator.matrix += part;
  }
  record_quadrature(parts, quad);
  return parts;
}

GeneratorParts build_local_lindblad(const SpinChainSystem& system,
                                    const std::vector<BathSpec>& baths,
                                    double epsilon, const PvQuadrature& quad) {
  BuildInput in = prepare(system, baths, epsilon, quad);
  const int d = system.dim();
  const double eps2 = epsilon * epsilon;

  GeneratorParts parts;
  parts.kind = QmeKind::local_lindblad;
  parts.hamiltonian = system.h_total;
  parts.epsilon = epsilon;
  parts.dissipator.matrix = Matrix::Zero(d * d, d * d);

  LindbladForm form;
  form.h_lamb = Matrix::Zero(d, d);

  for (const BathSpec& bath : in.baths) {
    const int site = bath.terminal;
    const double w0 = system.fields[site - 1];
    if (!(w0 > 0))
      throw ConfigError("build_local_lindblad: terminal field must be > 0");

    const Matrix sm = system.couplings.at(site);
    const Matrix sp = sm.adjoint();

    const double j0 = spectral_density(bath.spectral, w0);
    const double gamma_minus = eps2 * j0 * occupation_plus_one(bath, w0);
    const double gamma_plus = eps2 * j0 * occupation(bath, w0);

    auto j = [&](double w) { return spectral_density(bath.spectral, w); };
    auto jn = [&](double w) { return j(w) * occupation(bath, w); };
    // P int J / (w0 - w) = -P int J / (w - w0)
    const double delta_bar = -eps2 / (2.0 * M_PI) * pv_halfline(j, w0, in.quad);
    const double delta_bar_prime =
        -eps2 / (2.0 * M_PI) * pv_halfline(jn, w0, in.quad);
    const Matrix h_ls = (delta_bar + 2.0 * delta_bar_prime) * 0.5 *
                        site_operator(system.n_sites, site, pauli_z());

    Matrix part = gamma_minus * dissipator_superop(sm) +
                  gamma_plus * dissipator_superop(sp) +
                  hamiltonian_superop(h_ls);
    parts.dissipator.per_bath[site] = part;
    parts.dissipator.matrix += part;

    form.h_lamb += h_ls;
    form.jumps.emplace_back(sm, gamma_minus);
    form.jumps.emplace_back(sp, gamma_plus);
  }
  parts.lindblad = std::move(form);
  record_quadrature(parts, quad);
  return parts;
}

GeneratorParts build_eigenbasis_lindblad(const SpinChainSystem& system,
                                         const std::vector<BathSpec>& baths,
                                         double epsilon,
                                         const PvQuadrature& quad,
                                         double secular_tol) {
  BuildInput in = prepare(system, baths, epsilon, quad);
  const int d = system.dim();
  const double eps2 = epsilon * epsilon;
  const Matrix& u = in.basis.vectors;

  if (secular_tol < 0)
    secular_tol = 1e-9 * std::max(in.basis.spectral_width(), 1e-3);

  // group ordered eigenpairs into Bohr-frequency classes
  struct BohrEntry {
    double freq;
    int a, g;
  };
  std::vector<BohrEntry> entries;
  entries.reserve(d * d);
  for (int a = 0; a < d; ++a)
    for (int g = 0; g < d; ++g)
      entries.push_back({in.basis.energies(g) - in.basis.energies(a), a, g});
  std::sort(entries.begin(), entries.end(),
            [](const BohrEntry& x, const BohrEntry& y) {
              return x.freq < y.freq;
            });

  struct BohrClass {
    double rep = 0.0;
    double spread = 0.0;
    std::vector<std::pair<int, int>> pairs;
  };
  std::vector<BohrClass> classes;
  for (size_t i = 0; i < entries.size();) {
    size_t j = i + 1;
    while (j < entries.size() &&
           entries[j].freq - entries[j - 1].freq <= secular_tol)
      ++j;
    BohrClass cls;
    double sum = 0.0;
    for (size_t k = i; k < j; ++k) {
      sum += entries[k].freq;
      cls.pairs.emplace_back(entries[k].a, entries[k].g);
    }
    cls.rep = sum / static_cast<double>(j - i);
    cls.spread = entries[j - 1].freq - entries[i].freq;
    classes.push_back(std::move(cls));
    i = j;
  }

  GeneratorParts parts;
  parts.kind = QmeKind::eigenbasis_lindblad;
  parts.hamiltonian = system.h_total;
  parts.epsilon = epsilon;
  parts.dissipator.matrix = Matrix::Zero(d * d, d * d);

  for (const BohrClass& cls : classes) {
    if (cls.spread > 1e-12 * std::max(in.basis.spectral_width(), 1.0)) {
      std::ostringstream warn;
      warn << "secular: merged near-coincident Bohr frequencies around "
           << cls.rep << " (spread " << cls.spread << ")";
      parts.provenance.push_back(warn.str());
    }
  }

  LindbladForm form;
  form.h_lamb = Matrix::Zero(d, d);

  for (const BathSpec& bath : in.baths) {
    const Matrix s_eig =
        u.adjoint() * system.couplings.at(bath.terminal) * u;
    Matrix part = Matrix::Zero(d * d, d * d);
    Matrix h_ls_bath = Matrix::Zero(d, d);

    for (const BohrClass& cls : classes) {
      Matrix a_eig = Matrix::Zero(d, d);
      for (auto [a, g] : cls.pairs) a_eig(a, g) = s_eig(a, g);
      if (a_eig.cwiseAbs().maxCoeff() == 0.0) continue;
      const Matrix a_op = u * a_eig * u.adjoint();
      const Matrix a_dag = a_op.adjoint();

      const Cx c = redfield_C(bath, cls.rep, in.quad);
      const Cx dd = redfield_D(bath, cls.rep, in.quad);
      const double rate_minus = eps2 * 2.0 * dd.real();
      const double rate_plus = eps2 * 2.0 * c.real();

      if (rate_minus > 0) {
        part += rate_minus * dissipator_superop(a_op);
        form.jumps.emplace_back(a_op, rate_minus);
      }
      if (rate_plus > 0) {
        part += rate_plus * dissipator_superop(a_dag);
        form.jumps.emplace_back(a_dag, rate_plus);
      }
      h_ls_bath += eps2 * (dd.imag() * a_dag * a_op - c.imag() * a_op * a_dag);
    }
    part += hamiltonian_superop(h_ls_bath);
    form.h_lamb += h_ls_bath;
    parts.dissipator.per_bath[bath.terminal] = part;
    parts.dissipator.matrix += part;
  }
  parts.lindblad = std::move(form);
  record_quadrature(parts, quad);
  return parts;
}

GeneratorParts build_ule(const SpinChainSystem& system,
                         const std::vector<BathSpec>& baths, double epsilon,
                         const PvQuadrature& quad) {
  BuildInput in = prepare(system, baths, epsilon, quad);
  const int d = system.dim();
  const double eps2 = epsilon * epsilon;
  const Matrix& u = in.basis.vectors;

  GeneratorParts parts;
  parts.kind = QmeKind::universal_lindblad;
  parts.hamiltonian = system.h_total;
  parts.epsilon = epsilon;
  parts.dissipator.matrix = Matrix::Zero(d * d, d * d);

  LindbladForm form;
  form.h_lamb = Matrix::Zero(d, d);

  for (const BathSpec& bath : in.baths) {
    const Matrix s = system.couplings.at(bath.terminal);
    std::array<Matrix, 2> x_eig = {
        u.adjoint() * (s + s.adjoint()) * u,
        u.adjoint() * (kI * (s - s.adjoint())) * u};

    // jump operators L_k = 2 pi eps sum_{a g k'} g_{k k'}(E_{g a}) X^{k'}_{a g}
    Matrix part = Matrix::Zero(d * d, d * d);
    for (int k = 0; k < 2; ++k) {
      Matrix l_eig = Matrix::Zero(d, d);
      for (int a = 0; a < d; ++a)
        for (int g = 0; g < d; ++g) {
          const Eigen::Matrix2cd gblk =
              ule_g_block(bath, in.basis.energies(g) - in.basis.energies(a));
          l_eig(a, g) = gblk(k, 0) * x_eig[0](a, g) + gblk(k, 1) * x_eig[1](a, g);
        }
      const Matrix l_op = 2.0 * M_PI * epsilon * (u * l_eig * u.adjoint());
      part += dissipator_superop(l_op);
      form.jumps.emplace_back(l_op, 1.0);
    }

    // Lamb shift: H_LS = sum_{a g h} X_{a h} X_{h g} f(E_{h a}, E_{g h}).
    // The first argument enters as g(w - p) with p = E_h - E_a, which makes
    // the assembled operator Hermitian.
    std::vector<BathSpec> single_bath = {bath};
    std::map<std::pair<double, double>, Eigen::Matrix2cd> f_memo;
    auto f_val = [&](double p, double q) -> Eigen::Matrix2cd {
      const auto key = std::make_pair(p, q);
      auto it = f_memo.find(key);
      if (it == f_memo.end()) {
        const Eigen::MatrixXcd full = ule_f(single_bath, p, q, in.quad);
        it = f_memo.emplace(key, full.topLeftCorner<2, 2>()).first;
      }
      return it->second;
    };

    Matrix h_ls_eig = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a)
      for (int g = 0; g < d; ++g)
        for (int h = 0; h < d; ++h) {
          const double p = in.basis.energies(h) - in.basis.energies(a);
          const double q = in.basis.energies(g) - in.basis.energies(h);
          const Eigen::Matrix2cd f = f_val(p, q);
          Cx acc = 0.0;
          for (int k = 0; k < 2; ++k)
            for (int kp = 0; kp < 2; ++kp)
              acc += x_eig[k](a, h) * x_eig[kp](h, g) * f(k, kp);
          h_ls_eig(a, g) += acc;
        }
    Matrix h_ls = eps2 * (u * h_ls_eig * u.adjoint());
    const double defect = hermiticity_defect(h_ls);
    const double scale = std::max(h_ls.cwiseAbs().maxCoeff(), 1e-300);
    if (defect > 1e-8 * scale) {
      std::ostringstream warn;
      warn << "ule: Lamb shift hermiticity defect " << defect;
      parts.provenance.push_back(warn.str());
    }
    h_ls = 0.5 * (h_ls + h_ls.adjoint()).eval();

    part += hamiltonian_superop(h_ls);
    form.h_lamb += h_ls;
    parts.dissipator.per_bath[bath.terminal] = part;
    parts.dissipator.matrix += part;
  }
  parts.lindblad = std::move(form);
  record_quadrature(parts, quad);
  return parts;
}

GeneratorParts with_epsilon(const GeneratorParts& parts, double epsilon) {
  if (!(epsilon > 0)) throw ConfigError("with_epsilon: epsilon must be > 0");
  GeneratorParts out = parts;
  const double ratio = epsilon / parts.epsilon;
  const double ratio2 = ratio * ratio;
  out.epsilon = epsilon;
  out.dissipator.matrix *= ratio2;
  for (auto& [terminal, m] : out.dissipator.per_bath) m *= ratio2;
  if (out.lindblad) {
    out.lindblad->h_lamb *= ratio2;
    for (auto& [l, gamma] : out.lindblad->jumps) {
      if (parts.kind == QmeKind::universal_lindblad) {
        l *= ratio;  // epsilon lives inside the ULE jump operators
      } else {
        gamma *= ratio2;
      }
    }
  }
  return out;
}

Matrix reassemble_lindblad(const LindbladForm& form) {
  const int d = static_cast<int>(form.h_lamb.rows());
  Matrix out = hamiltonian_superop(form.h_lamb);
  for (const auto& [l, gamma] : form.jumps)
    out += gamma * dissipator_superop(l);
  (void)d;
  return out;
}

std::vector<Matrix> gell_mann_basis(int dim) {
  std::vector<Matrix> basis;
  basis.reserve(dim * dim - 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < dim; ++j)
    for (int k = j + 1; k < dim; ++k) {
      Matrix m = Matrix::Zero(dim, dim);
      m(j, k) = inv_sqrt2;
      m(k, j) = inv_sqrt2;
      basis.push_back(m);
    }
  for (int j = 0; j < dim; ++j)
    for (int k = j + 1; k < dim; ++k) {
      Matrix m = Matrix::Zero(dim, dim);
      m(j, k) = -kI * inv_sqrt2;
      m(k, j) = kI * inv_sqrt2;
      basis.push_back(m);
    }
  for (int l = 1; l < dim; ++l) {
    Matrix m = Matrix::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) m(j, j) = norm;
    m(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(m);
  }
  return basis;
}

KossakowskiMatrix extract_kossakowski(const GeneratorParts& parts) {
  const int d = parts.hilbert_dim();
  const int d2 = d * d;
  const Matrix& l = parts.dissipator.matrix;

  // reshuffle so that coefficients come from plain matrix products:
  // T[(i + d r), (j + d s)] = L[(i + d j), (r + d s)]
  Matrix t(d2, d2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
          t(i + d * r, j + d * s) = l(i + d * j, r + d * s);

  std::vector<Matrix> ops = gell_mann_basis(d);
  Matrix phi(d2, d2);
  phi.col(0) = vectorize(Matrix::Identity(d, d) / std::sqrt(double(d)));
  for (int a = 0; a < d2 - 1; ++a) phi.col(a + 1) = vectorize(ops[a]);

  Matrix c = phi.adjoint() * t * phi;
  c = 0.5 * (c + c.adjoint()).eval();

  KossakowskiMatrix out;
  out.basis = ops;
  out.matrix = c.bottomRightCorner(d2 - 1, d2 - 1);

  // first row/column hold the non-jump remainder; its anti-Hermitian part
  // is the effective Hamiltonian
  Matrix f = Matrix::Zero(d, d);
  for (int a = 1; a < d2; ++a) f += c(a, 0) * ops[a - 1];
  f /= std::sqrt(double(d));
  out.h_eff = 0.5 * kI * (f - f.adjoint());

  Eigen::SelfAdjointEigenSolver<Matrix> es(out.matrix);
  out.min_eigenvalue = es.eigenvalues().minCoeff();

  // The coefficient decomposition over the operator basis is exact, so the
  // only piece the GKSL reassembly can miss is (1/2){Phi + Q, rho} with
  //   Phi = F + F^dag + (c00 / D) 1,   Q = sum_ij K_ij F_j F_i.
  // Phi + Q = 0 is the trace-preservation condition; its failure flags a
  // non-GKSL-decomposable input.
  Matrix q = Matrix::Zero(d, d);
  for (int i = 0; i < d2 - 1; ++i)
    for (int j = 0; j < d2 - 1; ++j) {
      const Cx k = out.matrix(i, j);
      if (std::abs(k) == 0.0) continue;
      q += k * (ops[j] * ops[i]);
    }
  const Matrix phi = f + f.adjoint() +
                     (c(0, 0).real() / double(d)) * Matrix::Identity(d, d);
  const double scale = std::max(l.cwiseAbs().maxCoeff(), 1e-300);
  out.reassembly_error = (phi + q).cwiseAbs().maxCoeff() / scale;
  if (out.reassembly_error > 1e-8)
    throw ExtractionFailed(
        "extract_kossakowski: reassembly mismatch, input is not "
        "GKSL-decomposable");
  return out;
}

}  // namespace qmelab
