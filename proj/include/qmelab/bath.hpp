#ifndef QMELAB_BATH_HPP
#define QMELAB_BATH_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qmelab/errors.hpp"
#include "qmelab/quadrature.hpp"

namespace qmelab {

enum class BathStatistics { bosonic };
enum class SpectralKind { ohmic_gaussian };

// J(w) = w exp(-(w/w_c)^2) for w > 0, exactly zero otherwise
struct SpectralFunction {
  SpectralKind kind = SpectralKind::ohmic_gaussian;
  double omega_c = 10.0;
};

struct BathSpec {
  int terminal = 1;
  double beta = 1.0;
  double mu = -0.5;
  BathStatistics statistics = BathStatistics::bosonic;
  SpectralFunction spectral;
};

// validates beta > 0 and (bosonic) mu < 0
BathSpec make_bath(int terminal, double beta, double mu, double omega_c);

double spectral_density(const SpectralFunction& spec, double omega);

// Bose occupation 1 / (exp(beta (w - mu)) - 1); requires beta (w - mu) > 0
double occupation(const BathSpec& bath, double omega);
// 1 + n, evaluated in a form stable for large beta (w - mu)
double occupation_plus_one(const BathSpec& bath, double omega);

// Half-Fourier bath correlation coefficients of the Redfield generator:
//   C(E) = J(E) n(E) / 2       - (i / 2 pi) P int_0^inf J n / (w - E) dw
//   D(E) = J(E) (n(E)+1) / 2   - (i / 2 pi) P int_0^inf J (n+1) / (w - E) dw
// The Heaviside step inside J kills the real parts for E <= 0 while the
// principal-value parts survive.
std::complex<double> redfield_C(const BathSpec& bath, double e_diff,
                                const PvQuadrature& quad);
std::complex<double> redfield_D(const BathSpec& bath, double e_diff,
                                const PvQuadrature& quad);

// Square root of the bath spectral matrix, g(w) = sqrt(G(w) / 2 pi),
// block diagonal over baths with 2x2 blocks
//   w > 0: sqrt(J(w) (1+n(w)))  / (4 sqrt(2) pi) [[1, -i], [i, 1]]
//   w < 0: sqrt(J(-w) n(-w))    / (4 sqrt(2) pi) [[1, i], [-i, 1]]
// Rows/columns are ordered (bath0,k=1), (bath0,k=2), (bath1,k=1), ...
Eigen::MatrixXcd ule_g(const std::vector<BathSpec>& baths, double omega);

// 2x2 block of ule_g for one bath
Eigen::Matrix2cd ule_g_block(const BathSpec& bath, double omega);

// G(w) assembled directly from J and n (equals 2 pi g(w)^2)
Eigen::Matrix2cd ule_G_block(const BathSpec& bath, double omega);

// f(p, q) = -2 pi P int dw g(w-p) g(w+q) / w at unit coupling; the
// epsilon^2 prefactor is applied by the generator assembly.
Eigen::MatrixXcd ule_f(const std::vector<BathSpec>& baths, double p, double q,
                       const PvQuadrature& quad);

}  // namespace qmelab

#endif
