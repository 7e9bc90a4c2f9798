#include "qmelab/bath.hpp"

#include <cmath>
#include <sstream>

namespace qmelab {

namespace {

constexpr double kUleNorm = 1.0 / (4.0 * M_SQRT2 * M_PI);

}  // namespace

BathSpec make_bath(int terminal, double beta, double mu, double omega_c) {
  if (terminal < 1) throw ConfigError("make_bath: terminal must be >= 1");
  if (!(beta > 0) || !std::isfinite(beta))
    throw ConfigError("make_bath: beta must be positive");
  if (!(mu < 0) || !std::isfinite(mu))
    throw ConfigError("make_bath: bosonic bath requires mu < 0");
  if (!(omega_c > 0) || !std::isfinite(omega_c))
    throw ConfigError("make_bath: omega_c must be positive");
  BathSpec b;
  b.terminal = terminal;
  b.beta = beta;
  b.mu = mu;
  b.spectral.omega_c = omega_c;
  return b;
}

double spectral_density(const SpectralFunction& spec, double omega) {
  if (omega <= 0.0) return 0.0;
  const double x = omega / spec.omega_c;
  return omega * std::exp(-x * x);
}

double occupation(const BathSpec& bath, double omega) {
  const double x = bath.beta * (omega - bath.mu);
  if (x <= 0.0) {
    std::ostringstream msg;
    msg << "occupation: beta (omega - mu) = " << x
        << " <= 0, Bose distribution has a pole";
    throw PoleInOccupation(msg.str());
  }
  return 1.0 / std::expm1(x);
}

double occupation_plus_one(const BathSpec& bath, double omega) {
  const double x = bath.beta * (omega - bath.mu);
  if (x <= 0.0) throw PoleInOccupation("occupation_plus_one: pole");
  return -1.0 / std::expm1(-x);
}

std::complex<double> redfield_C(const BathSpec& bath, double e_diff,
                                const PvQuadrature& quad) {
  auto jn = [&](double w) {
    return spectral_density(bath.spectral, w) * occupation(bath, w);
  };
  const double re = e_diff > 0.0 ? 0.5 * jn(e_diff) : 0.0;
  const double pv = pv_halfline(jn, e_diff, quad);
  return {re, -pv / (2.0 * M_PI)};
}

std::complex<double> redfield_D(const BathSpec& bath, double e_diff,
                                const PvQuadrature& quad) {
  auto jn1 = [&](double w) {
    return spectral_density(bath.spectral, w) * occupation_plus_one(bath, w);
  };
  const double re = e_diff > 0.0 ? 0.5 * jn1(e_diff) : 0.0;
  const double pv = pv_halfline(jn1, e_diff, quad);
  return {re, -pv / (2.0 * M_PI)};
}

Eigen::Matrix2cd ule_g_block(const BathSpec& bath, double omega) {
  Eigen::Matrix2cd block = Eigen::Matrix2cd::Zero();
  if (omega == 0.0) return block;
  const std::complex<double> i(0, 1);
  if (omega > 0.0) {
    const double s = kUleNorm * std::sqrt(spectral_density(bath.spectral, omega) *
                                          occupation_plus_one(bath, omega));
    block << s, -i * s, i * s, s;
  } else {
    const double s = kUleNorm * std::sqrt(spectral_density(bath.spectral, -omega) *
                                          occupation(bath, -omega));
    block << s, i * s, -i * s, s;
  }
  return block;
}

Eigen::Matrix2cd ule_G_block(const BathSpec& bath, double omega) {
  Eigen::Matrix2cd block = Eigen::Matrix2cd::Zero();
  if (omega == 0.0) return block;
  const std::complex<double> i(0, 1);
  if (omega > 0.0) {
    const double s = spectral_density(bath.spectral, omega) *
                     occupation_plus_one(bath, omega) / (8.0 * M_PI);
    block << s, -i * s, i * s, s;
  } else {
    const double s = spectral_density(bath.spectral, -omega) *
                     occupation(bath, -omega) / (8.0 * M_PI);
    block << s, i * s, -i * s, s;
  }
  return block;
}

Eigen::MatrixXcd ule_g(const std::vector<BathSpec>& baths, double omega) {
  const int t = static_cast<int>(baths.size());
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * t, 2 * t);
  for (int b = 0; b < t; ++b)
    g.block<2, 2>(2 * b, 2 * b) = ule_g_block(baths[b], omega);
  return g;
}

Eigen::MatrixXcd ule_f(const std::vector<BathSpec>& baths, double p, double q,
                       const PvQuadrature& quad) {
  auto h = [&](double w) -> Eigen::MatrixXcd {
    return (ule_g(baths, w - p) * ule_g(baths, w + q)).eval();
  };
  const double half_width = quad.cutoff + std::max(std::abs(p), std::abs(q));
  // g has sqrt cusps where its argument vanishes: w = p and w = -q
  Eigen::MatrixXcd pv =
      pv_fullline(h, 0.0, half_width, {}, {p, -q}, quad);
  return -2.0 * M_PI * pv;
}

}  // namespace qmelab
