#ifndef QMELAB_QUADRATURE_HPP
#define QMELAB_QUADRATURE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include "qmelab/errors.hpp"

namespace qmelab {

// Composite Gauss-Legendre quadrature on (0, infinity) and the full line,
// with Cauchy principal values handled by singularity subtraction (half
// line) and by folding over a symmetric window (full line). Breakpoints
// split panels at kinks; sqrt-marked points get a u^2 substitution on the
// adjacent panels so square-root cusps integrate at spectral accuracy.
struct PvQuadrature {
  int points = 2000;      // target function evaluations per integral
  double window = 1.0;    // refinement half-width around marked points
  double cutoff = 80.0;   // outer integration cutoff
  bool self_check = true;
  double self_check_tol = 1e-8;
};

inline PvQuadrature default_quadrature(double max_omega_c) {
  PvQuadrature q;
  q.cutoff = 8.0 * max_omega_c;
  q.window = std::min(1.0, q.cutoff / 16.0);
  return q;
}

namespace detail {

// nodes/weights for Gauss-Legendre on [-1, 1]
void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights);

struct Panel {
  double a = 0.0;
  double b = 0.0;
  int sqrt_end = 0;  // -1: cusp at a, +1: cusp at b, 0: plain
};

std::vector<Panel> make_panels(double lo, double hi,
                               std::vector<double> breakpoints,
                               std::vector<double> sqrt_points,
                               const PvQuadrature& quad);

inline double scalar_norm(double x) { return std::abs(x); }
inline double scalar_norm(const std::complex<double>& x) { return std::abs(x); }
inline double scalar_norm(const Eigen::MatrixXcd& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

template <class R>
struct QuadResult {
  R value{};
  double l1 = 0.0;  // integral of |f|, used as the noise scale
};

template <class F>
auto integrate_panels(F&& f, const std::vector<Panel>& panels, int order) {
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  using R = std::decay_t<decltype(f(0.0))>;
  QuadResult<R> out;
  bool first = true;
  auto add = [&](const R& val, double weight) {
    out.l1 += scalar_norm(val) * std::abs(weight);
    if (first) {
      out.value = val * weight;
      first = false;
    } else {
      out.value += val * weight;
    }
  };
  for (const Panel& p : panels) {
    const double len = p.b - p.a;
    if (len <= 0) continue;
    if (p.sqrt_end == 0) {
      const double mid = 0.5 * (p.a + p.b), half = 0.5 * len;
      for (int i = 0; i < order; ++i) add(f(mid + half * x[i]), half * w[i]);
    } else {
      // u^2 substitution against the cusp end:
      //   int_a^b F = int_0^sqrt(len) 2u F(end -/+ u^2) du
      const double s = std::sqrt(len);
      for (int i = 0; i < order; ++i) {
        const double u = 0.5 * s * (x[i] + 1.0);
        const double point = p.sqrt_end < 0 ? p.a + u * u : p.b - u * u;
        add(f(point), 0.5 * s * w[i] * 2.0 * u);
      }
    }
  }
  return out;
}

template <class F>
auto integrate_checked(F&& f, const std::vector<Panel>& panels,
                       const PvQuadrature& quad, const char* what) {
  const int n_panels = static_cast<int>(panels.size());
  const int order = std::clamp(quad.points / std::max(1, n_panels), 10, 48);
  auto coarse = integrate_panels(f, panels, order);
  if (!quad.self_check) return coarse.value;
  auto fine = integrate_panels(f, panels, 2 * order);
  const double diff = scalar_norm(coarse.value - fine.value);
  const double scale =
      std::max({scalar_norm(fine.value), 1e-6 * fine.l1, 1e-300});
  if (diff > quad.self_check_tol * scale) {
    std::ostringstream msg;
    msg << what << ": quadrature not converged under doubling (coarse "
        << scalar_norm(coarse.value) << ", fine " << scalar_norm(fine.value)
        << ", rel diff " << diff / scale << ")";
    throw QuadratureDiverged(msg.str());
  }
  return fine.value;
}

}  // namespace detail

// ordinary integral over [lo, hi] with structural points
template <class F>
auto integrate(F&& f, double lo, double hi, std::vector<double> breakpoints,
               std::vector<double> sqrt_points, const PvQuadrature& quad,
               const char* what = "integrate") {
  const auto panels = detail::make_panels(lo, hi, std::move(breakpoints),
                                          std::move(sqrt_points), quad);
  return detail::integrate_checked(f, panels, quad, what);
}

// P int_0^inf f(w) / (w - pole) dw for f decaying within quad.cutoff.
// For pole <= 0 the integrand is regular; for pole > 0 the singular part
// is subtracted and integrated in closed form:
//   P int_0^W f(w)/(w-E) = int_0^W (f(w)-f(E))/(w-E) + f(E) log((W-E)/E).
template <class F>
auto pv_halfline(F&& f, double pole, const PvQuadrature& quad) {
  double hi = quad.cutoff;
  if (pole > 0.5 * hi) hi = 2.0 * pole + quad.cutoff;
  if (pole <= 0.0) {
    return integrate([&](double w) { return f(w) * (1.0 / (w - pole)); }, 0.0,
                     hi, {}, {}, quad, "pv_halfline");
  }
  const auto f_pole = f(pole);
  auto integrand = [&](double w) {
    return (f(w) - f_pole) * (1.0 / (w - pole));
  };
  auto body = integrate(integrand, 0.0, hi, {pole}, {}, quad, "pv_halfline");
  return body + f_pole * std::log((hi - pole) / pole);
}

// P int over the full line of h(w) / (w - pole), folded over a symmetric
// window around the pole:
//   P int = int_0^W (h(pole+u) - h(pole-u)) / u du.
// half_width must cover the support of h on both sides of the pole.
// sqrt_points mark square-root cusps of h (in w coordinates).
template <class F>
auto pv_fullline(F&& h, double pole, double half_width,
                 std::vector<double> breakpoints,
                 std::vector<double> sqrt_points, const PvQuadrature& quad) {
  std::vector<double> folded_breaks, folded_sqrt;
  for (double s : breakpoints) folded_breaks.push_back(std::abs(s - pole));
  for (double s : sqrt_points) folded_sqrt.push_back(std::abs(s - pole));
  folded_sqrt.push_back(0.0);  // fold origin; covers 1/sqrt(u) end points
  auto integrand = [&](double u) {
    return (h(pole + u) - h(pole - u)) * (1.0 / u);
  };
  return integrate(integrand, 0.0, half_width, std::move(folded_breaks),
                   std::move(folded_sqrt), quad, "pv_fullline");
}

}  // namespace qmelab

#endif
