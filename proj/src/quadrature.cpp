#include "qmelab/quadrature.hpp"

#include <map>
#include <mutex>

namespace qmelab {
namespace detail {

namespace {

void compute_gauss_legendre(int n, std::vector<double>& x,
                            std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>>
      cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    std::pair<std::vector<double>, std::vector<double>> entry;
    compute_gauss_legendre(order, entry.first, entry.second);
    it = cache.emplace(order, std::move(entry)).first;
  }
  nodes = it->second.first;
  weights = it->second.second;
}

std::vector<Panel> make_panels(double lo, double hi,
                               std::vector<double> breakpoints,
                               std::vector<double> sqrt_points,
                               const PvQuadrature& quad) {
  if (!(hi > lo)) return {};
  const double span = hi - lo;
  const double merge_tol = 1e-13 * span;

  std::vector<double> edges = {lo, hi};
  std::vector<double> marked = sqrt_points;
  for (double s : breakpoints)
    if (s > lo + merge_tol && s < hi - merge_tol) edges.push_back(s);
  for (double s : sqrt_points)
    if (s > lo + merge_tol && s < hi - merge_tol) edges.push_back(s);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [&](double a, double b) {
                            return std::abs(a - b) <= merge_tol;
                          }),
              edges.end());

  auto near_marked = [&](double a, double b) {
    for (double s : marked)
      if (std::max(a, s - quad.window) <= std::min(b, s + quad.window))
        return true;
    return false;
  };
  auto is_marked = [&](double e) {
    for (double s : marked)
      if (std::abs(e - s) <= merge_tol || e == s) return true;
    return false;
  };

  std::vector<Panel> panels;
  const double base_len = span / 24.0;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    const double len = b - a;
    double target = base_len;
    if (near_marked(a, b)) target = std::min(target, quad.window / 4.0);
    int k = std::clamp(static_cast<int>(std::ceil(len / target)), 1, 64);
    const bool sa = is_marked(a), sb = is_marked(b);
    if (k == 1 && sa && sb) k = 2;
    for (int j = 0; j < k; ++j) {
      Panel p;
      p.a = a + len * j / k;
      p.b = (j == k - 1) ? b : a + len * (j + 1) / k;
      if (j == 0 && sa) p.sqrt_end = -1;
      if (j == k - 1 && sb) p.sqrt_end = +1;
      panels.push_back(p);
    }
  }
  return panels;
}

}  // namespace detail
}  // namespace qmelab
