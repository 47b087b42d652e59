#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "mtlab/errors.hpp"

namespace mtlab {

inline constexpr double pi = std::numbers::pi;

// Surface measure of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
// Single source of truth for sphere measure throughout the library.
inline double sphere_area(int n) {
  if (n < 1) throw domain_error("sphere_area: n must be >= 1");
  return 2.0 * std::exp(0.5 * n * std::log(pi) - std::lgamma(0.5 * n));
}

// Volume of the unit ball in R^n = sphere_area(n)/n.
inline double ball_volume(int n) { return sphere_area(n) / n; }

// Coefficient of the Riesz potential: the convolution kernel c_d |x|^{d-n}
// inverts the fractional power of order d of the (positive) Laplacian.
//   c_d = Gamma((n-d)/2) / (2^d pi^{n/2} Gamma(d/2)),  0 < d < n.
inline double riesz_coefficient(int n, double d) {
  if (!(d > 0.0 && d < static_cast<double>(n)))
    throw domain_error("riesz_coefficient: need 0 < d < n, got d=" + std::to_string(d) +
                       " n=" + std::to_string(n));
  const double ln = std::lgamma(0.5 * (n - d)) - d * std::numbers::ln2 -
                    0.5 * n * std::log(pi) - std::lgamma(0.5 * d);
  return std::exp(ln);
}

// Stable evaluation of c_{d+1} * (n-d-1), the coefficient of the gradient
// representation kernel |x-y|^{d-n-1}(x-y).  Written via
// (n-d-1) Gamma((n-d-1)/2) = 2 Gamma((n-d+1)/2) so the n-d-1 = 0 boundary
// (where c_{d+1} alone diverges) stays finite.
inline double riesz_gradient_coefficient(int n, double d) {
  if (!(d > 0.0 && d < static_cast<double>(n)))
    throw domain_error("riesz_gradient_coefficient: need 0 < d < n");
  const double ln = std::lgamma(0.5 * (n - d + 1)) - d * std::numbers::ln2 -
                    0.5 * n * std::log(pi) - std::lgamma(0.5 * (d + 1));
  return std::exp(ln);
}

// int_{R^m} exp(-(sum x_j^2)^{p/2}) dx = 2 pi^{m/2} Gamma(1+m/p) / (m Gamma(m/2)),
// for m in N, p > 0.
inline double radial_exp_integral(int m, double p) {
  if (m < 1 || !(p > 0.0)) throw domain_error("radial_exp_integral: need m >= 1, p > 0");
  const double ln = std::numbers::ln2 + 0.5 * m * std::log(pi) +
                    std::lgamma(1.0 + static_cast<double>(m) / p) - std::log(static_cast<double>(m)) -
                    std::lgamma(0.5 * m);
  return std::exp(ln);
}

}  // namespace mtlab
