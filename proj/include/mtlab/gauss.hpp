#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "mtlab/errors.hpp"
#include "mtlab/special.hpp"

namespace mtlab {

struct GaussRule {
  std::vector<double> nodes;    // on (-1,1)
  std::vector<double> weights;
};

// Gauss-Legendre nodes by Newton iteration on P_n.  Cached per order.
inline const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

template <class F>
double integrate_gl(F&& f, double a, double b, int order = 32) {
  const GaussRule& r = gauss_legendre(order);
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
  return s * h;
}

// int_0^h rho^{-kappa'} g(rho) drho with kappa' in [0,1): substitute
// rho = s^{1/kappa}, kappa = 1 - kappa', which removes the endpoint
// singularity exactly for power kernels (g continuous at 0).
template <class F>
double integrate_power_endpoint(F&& g, double h, double power, int order = 32) {
  // integrand is rho^{power} * g(rho), power in (-1, 0]
  const double kappa = 1.0 + power;
  if (!(kappa > 0.0 && kappa <= 1.0)) throw domain_error("integrate_power_endpoint: power must be in (-1,0]");
  if (h <= 0.0) return 0.0;
  const double smax = std::pow(h, kappa);
  auto trans = [&](double s) { return g(std::pow(s, 1.0 / kappa)); };
  return integrate_gl(trans, 0.0, smax, order) / kappa;
}

// Adaptive Simpson, used for generic smooth 1-D integrands.
namespace detail {
template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Geometric grid with a fixed number of points per decade; endpoints included.
inline std::vector<double> geometric_grid(double lo, double hi, int per_decade = 20) {
  if (!(lo > 0.0 && hi > lo)) throw parameter_error("geometric_grid: need 0 < lo < hi");
  const int n = std::max(2, static_cast<int>(std::ceil(per_decade * std::log10(hi / lo))) + 1);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  g.back() = hi;
  return g;
}

// Geometric grid with exactly n points.
inline std::vector<double> geometric_grid_n(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw parameter_error("geometric_grid_n: bad range");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  g.back() = hi;
  return g;
}

inline std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1.0);
  return g;
}

// Least-squares slope/intercept of y against x.
struct LineFit {
  double slope = 0.0, intercept = 0.0, residual_rms = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw parameter_error("fit_line: need >= 2 matched points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  const double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / n);
  return f;
}

}  // namespace mtlab
