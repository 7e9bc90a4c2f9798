#ifndef QMELAB_RNG_HPP
#define QMELAB_RNG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>

namespace qmelab {

// Deterministic generator (splitmix64) so audit panels reproduce bit-for-bit
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * M_PI * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  std::complex<double> normal_complex() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  Eigen::MatrixXcd ginibre(int rows, int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = normal_complex();
    return m;
  }

  // random density matrix (full rank, Hilbert-Schmidt measure)
  Eigen::MatrixXcd density_matrix(int dim) {
    const Eigen::MatrixXcd g = ginibre(dim, dim);
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
  }

  Eigen::VectorXcd pure_state(int dim) {
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = normal_complex();
    v.normalize();
    return v;
  }

  // random Hermitian with entries O(1)
  Eigen::MatrixXcd hermitian(int dim) {
    const Eigen::MatrixXcd g = ginibre(dim, dim);
    return 0.5 * (g + g.adjoint());
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qmelab

#endif
