#pragma once

// Test-only oracles, independent of the library's computational paths:
// brute-force counting, dense Riemann sums, and tanh-sinh quadrature for the
// singular 1-D integrals.

#include <cmath>
#include <functional>
#include <vector>

#include "mtlab/measure.hpp"
#include "mtlab/profile.hpp"
#include "mtlab/rng.hpp"

namespace oracle {

// mu({|f| > s}) by direct weighted count
inline double weighted_count(const std::vector<double>& f, const std::vector<double>& w, double s) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f[i]) > s) m += w[i];
  return m;
}

// f**(t) by a dense Riemann sum over the step profile values
inline double double_star_riemann(const mtlab::RearrangementProfile& p, double t, int n = 200000) {
  double acc = 0.0;
  const double h = t / n;
  for (int i = 0; i < n; ++i) acc += p.value_at((i + 0.5) * h) * h;
  return acc / t;
}

// tanh-sinh quadrature on (a, b); handles integrable endpoint singularities
template <class F>
double tanh_sinh(F&& f, double a, double b, int levels = 9) {
  const double c = 0.5 * (a + b), h0 = 0.5 * (b - a);
  double sum = 0.0;
  const double hstep = 1.0 / (1 << (levels - 4));
  const double tmax = 3.6;
  for (double t = -tmax; t <= tmax; t += hstep) {
    const double u = std::tanh(0.5 * mtlab::pi * std::sinh(t));
    const double w = 0.5 * mtlab::pi * std::cosh(t) / std::pow(std::cosh(0.5 * mtlab::pi * std::sinh(t)), 2);
    const double x = c + h0 * u;
    if (x <= a || x >= b) continue;
    sum += w * f(x);
  }
  return sum * h0 * hstep;
}

// T f(x) = int_{-1}^{1} kernel(|x-y|) f(y) dy with the singularity split at x
inline double apply_1d(const std::function<double(double)>& kernel_of_rho,
                       const std::function<double(double)>& f, double x) {
  auto integ = [&](double lo, double hi) {
    if (hi <= lo) return 0.0;
    return tanh_sinh([&](double y) { return kernel_of_rho(std::abs(x - y)) * f(y); }, lo, hi);
  };
  return integ(-1.0, std::min(1.0, std::max(-1.0, x))) + integ(std::min(1.0, std::max(-1.0, x)), 1.0);
}

inline std::vector<double> random_weights(mtlab::SplitMix64& rng, int n) {
  std::vector<double> w(n);
  for (double& v : w) v = 0.05 + rng.next_uniform();
  return w;
}

inline std::vector<double> random_values(mtlab::SplitMix64& rng, int n, double scale = 3.0) {
  std::vector<double> f(n);
  for (double& v : f) v = scale * rng.next_normal();
  return f;
}

}  // namespace oracle
