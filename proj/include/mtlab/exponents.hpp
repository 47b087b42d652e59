#pragma once

#include <cmath>
#include <string>

#include "mtlab/errors.hpp"

namespace mtlab {

// The exponent tuple governing the two-measure exponential inequalities:
// beta > 1 with conjugate beta', 0 < beta0 <= beta, gamma > 1, p inside the
// open admissible interval, q = p beta0 / (beta - (beta-1) p) > p.
// A and B are the leading coefficients of the distribution bounds
// m(k1*, s) <= A s^{-beta} and m(k2*, s) <= B s^{-beta0}.
struct ExponentSet {
  double beta = 2.0;
  double beta_prime = 2.0;
  double beta0 = 2.0;
  double gamma = 2.0;
  double p = 1.5;
  double q = 6.0;
  double A = 1.0;
  double B = 1.0;

  double p_lower() const { return std::max(1.0, (beta - beta0) / (beta - 1.0)); }

  static ExponentSet make(double beta, double beta0, double gamma, double A, double B,
                          double p = -1.0) {
    ExponentSet e;
    if (!(beta > 1.0)) throw parameter_error("exponents: beta must be > 1");
    if (!(beta0 > 0.0 && beta0 <= beta)) throw parameter_error("exponents: need 0 < beta0 <= beta");
    if (!(gamma > 1.0)) throw parameter_error("exponents: gamma must be > 1");
    if (!(A > 0.0 && B > 0.0)) throw parameter_error("exponents: A and B must be positive");
    e.beta = beta;
    e.beta0 = beta0;
    e.gamma = gamma;
    e.A = A;
    e.B = B;
    e.beta_prime = beta / (beta - 1.0);
    const double lo = e.p_lower();
    if (p <= 0.0) p = 0.5 * (lo + e.beta_prime);  // midpoint of the admissible interval
    if (!(p > lo && p < e.beta_prime))
      throw parameter_error("exponents: p=" + std::to_string(p) + " outside (" + std::to_string(lo) +
                            ", " + std::to_string(e.beta_prime) + ")");
    e.p = p;
    const double denom = beta - (beta - 1.0) * p;
    if (!(denom > 0.0)) throw parameter_error("exponents: beta - (beta-1)p must be positive");
    e.q = p * beta0 / denom;
    if (!(e.q > e.p)) throw parameter_error("exponents: derived q must exceed p");
    return e;
  }
};

}  // namespace mtlab
