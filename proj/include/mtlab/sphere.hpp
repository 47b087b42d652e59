#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "mtlab/errors.hpp"
#include "mtlab/gauss.hpp"
#include "mtlab/special.hpp"

namespace mtlab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // last doubling change, used as the error estimate
  int nodes_per_angle = 0;
};

namespace detail {

// Fixed-resolution product rules.  Periodic angles use the trapezoid rule
// (spectrally accurate on the circle); polar angles use Gauss-Legendre after
// the cos substitution, so the sin^k weights are handled exactly.
template <class F>
double sphere_fixed(int n, F& f, int m) {
  if (n == 2) {
    double s = 0.0;
    const double h = 2.0 * pi / m;
    for (int i = 0; i < m; ++i) {
      const double th = h * i;
      const double w[2] = {std::cos(th), std::sin(th)};
      s += f(w);
    }
    return s * h;
  }
  if (n == 3) {
    const GaussRule& g = gauss_legendre(m);
    const double h = 2.0 * pi / m;
    double s = 0.0;
    for (int a = 0; a < m; ++a) {
      const double u = g.nodes[a];  // u = cos(theta)
      const double su = std::sqrt(std::max(0.0, 1.0 - u * u));
      double ring = 0.0;
      for (int b = 0; b < m; ++b) {
        const double ph = h * b;
        const double w[3] = {su * std::cos(ph), su * std::sin(ph), u};
        ring += f(w);
      }
      s += g.weights[a] * ring * h;
    }
    return s;
  }
  if (n == 4) {
    // omega = (sin t1 sin t2 cos p, sin t1 sin t2 sin p, sin t1 cos t2, cos t1),
    // measure sin^2 t1 dt1 sin t2 dt2 dp; t2 via cos substitution, t1 via GL on [0,pi].
    const GaussRule& g = gauss_legendre(m);
    const double h = 2.0 * pi / m;
    double s = 0.0;
    for (int a = 0; a < m; ++a) {
      const double t1 = 0.5 * pi * (g.nodes[a] + 1.0);
      const double wt1 = 0.5 * pi * g.weights[a] * std::sin(t1) * std::sin(t1);
      const double c1 = std::cos(t1), s1 = std::sin(t1);
      for (int b = 0; b < m; ++b) {
        const double u = g.nodes[b];  // cos(t2)
        const double su = std::sqrt(std::max(0.0, 1.0 - u * u));
        double ring = 0.0;
        for (int c = 0; c < m; ++c) {
          const double ph = h * c;
          const double w[4] = {s1 * su * std::cos(ph), s1 * su * std::sin(ph), s1 * u, c1};
          ring += f(w);
        }
        s += wt1 * g.weights[b] * ring * h;
      }
    }
    return s;
  }
  throw unsupported_error("sphere_integrate: quadrature implemented for n = 2, 3, 4");
}

}  // namespace detail

// Adaptive integration of f over S^{n-1}: node count doubles until the
// relative change drops below rel_tol.
template <class F>
QuadResult sphere_integrate(int n, F&& f, double rel_tol = 1e-8, int start = 64,
                            int max_doublings = 5) {
  QuadResult r;
  int m = start;
  double prev = detail::sphere_fixed(n, f, m);
  for (int k = 0; k < max_doublings; ++k) {
    m *= 2;
    const double cur = detail::sphere_fixed(n, f, m);
    r.error = std::abs(cur - prev);
    r.value = cur;
    r.nodes_per_angle = m;
    if (r.error <= rel_tol * std::max(std::abs(cur), 1e-300)) return r;
    prev = cur;
  }
  return r;
}

}  // namespace mtlab
