#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mtlab/exponents.hpp"
#include "mtlab/gauss.hpp"
#include "mtlab/measure.hpp"
#include "mtlab/profile.hpp"

namespace mtlab {

// Tf(x) = int_M k(x,y) f(y) dmu(y) realized on a pair of finite measure
// spaces as a dense matrix.  Row index runs over the codomain (N, nu),
// column index over the domain (M, mu).  Profiles k1*, k2* are computed at
// construction; apply() requires either integrable k2* or finite power-bound
// coefficients for the (k1*, k2*) pair.
struct IntegralOperator {
  FiniteMeasureSpace domain;    // (M, mu)
  FiniteMeasureSpace codomain;  // (N, nu)
  std::vector<double> kernel;   // row-major, |N| x |M|; +inf entries allowed

  RearrangementProfile k1, k2;
  bool has_infinite_entries = false;

  static IntegralOperator make(FiniteMeasureSpace M, FiniteMeasureSpace N,
                               std::vector<double> kernel_rowmajor) {
    IntegralOperator op;
    op.domain = std::move(M);
    op.codomain = std::move(N);
    op.kernel = std::move(kernel_rowmajor);
    if (op.kernel.size() != op.domain.size() * op.codomain.size())
      throw input_error("operator: kernel dimensions do not match the spaces");
    auto [k1, k2] = kernel_rearrangements(op.kernel, op.codomain, op.domain);
    op.k1 = std::move(k1);
    op.k2 = std::move(k2);
    for (double v : op.kernel)
      if (std::isinf(v)) op.has_infinite_entries = true;
    return op;
  }

  std::size_t rows() const { return codomain.size(); }
  std::size_t cols() const { return domain.size(); }

  bool certified() const {
    // On a finite space both certificates reduce to finiteness of the kernel.
    return !has_infinite_entries;
  }

  std::vector<double> apply(std::span<const double> f) const {
    if (f.size() != cols()) throw input_error("apply: f does not match the domain");
    for (double v : f)
      if (!std::isfinite(v)) throw input_error("apply: f must be finite");
    std::vector<double> out(rows(), 0.0);
    for (std::size_t i = 0; i < rows(); ++i) {
      double acc = 0.0;
      const double* row = kernel.data() + i * cols();
      for (std::size_t j = 0; j < cols(); ++j) {
        if (std::isinf(row[j])) {
          if (f[j] != 0.0)
            throw singularity_error(
                "apply: kernel is +inf at row " + std::to_string(i) + ", atom " + std::to_string(j) +
                " with f != 0 there; exclude the diagonal atom or average the kernel over its cell");
          continue;  // +inf * 0 contributes nothing
        }
        acc += row[j] * f[j] * domain.weights[j];
      }
      out[i] = acc;
    }
    return out;
  }
};

// (17)-form coefficient: smallest M with profile(t) <= M t^{-1/expnt} everywhere.
inline double profile_power_coefficient(const RearrangementProfile& p, double expnt) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.breaks.size(); ++i)
    m = std::max(m, p.values[i] * std::pow(p.breaks[i], 1.0 / expnt));
  return m;
}

// Distribution-form coefficient: smallest A with m(profile, s) <= A s^{-beta}
// for all s > 0 (attained at the block levels).
inline double profile_distribution_coefficient(const RearrangementProfile& p, double beta) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.breaks.size(); ++i)
    if (p.values[i] > 0.0) a = std::max(a, std::pow(p.values[i], beta) * p.breaks[i]);
  return a;
}

inline double lp_norm(std::span<const double> f, const FiniteMeasureSpace& space, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += std::pow(std::abs(f[i]), p) * space.weights[i];
  return std::pow(acc, 1.0 / p);
}

// exact int_0^tau f*(u) u^{-1+1/p} du for a step profile
inline double weighted_prefix_integral(const RearrangementProfile& f, double tau, double p) {
  double acc = 0.0, lo = 0.0;
  for (std::size_t i = 0; i < f.breaks.size() && lo < tau; ++i) {
    const double hi = std::min(f.breaks[i], tau);
    if (hi > lo) acc += f.values[i] * p * (std::pow(hi, 1.0 / p) - std::pow(lo, 1.0 / p));
    lo = f.breaks[i];
  }
  return acc;
}

struct WeakTypeReport {
  double lhs_max = 0.0;   // max over the s grid of s * m(Tf, s)^{1/q}
  double rhs = 0.0;       // explicit constant times ||f||_p
  double constant = 0.0;  // q^2/(beta0 (q-p)) M^{1-1/p} B^{1/q}
  double M_coef = 0.0, B_coef = 0.0;
  bool holds = false;
};

// Weak-type estimate with the explicit constant: for all s > 0,
//   s nu({|Tf| > s})^{1/q} <= q^2/(beta0 (q-p)) M^{1-1/p} B^{1/q} ||f||_p
// where M, B are the certified distribution-form coefficients of k1*, k2*.
inline WeakTypeReport weak_type_check(const IntegralOperator& op, std::span<const double> f,
                                      const ExponentSet& e, const std::vector<double>& s_grid) {
  WeakTypeReport rep;
  rep.M_coef = profile_distribution_coefficient(op.k1, e.beta);
  rep.B_coef = profile_distribution_coefficient(op.k2, e.beta0);
  rep.constant = (e.q * e.q / (e.beta0 * (e.q - e.p))) * std::pow(rep.M_coef, 1.0 - 1.0 / e.p) *
                 std::pow(rep.B_coef, 1.0 / e.q);
  const double fnorm = lp_norm(f, op.domain, e.p);
  rep.rhs = rep.constant * fnorm;
  std::vector<double> absf(f.begin(), f.end());
  for (double& v : absf) v = std::abs(v);
  const auto tf = op.apply(absf);
  for (double s : s_grid) {
    const double m = distribution(tf, op.codomain, s);
    rep.lhs_max = std::max(rep.lhs_max, s * std::pow(m, 1.0 / e.q));
  }
  rep.holds = rep.lhs_max <= rep.rhs * (1.0 + 1e-12) + 1e-300;
  return rep;
}

struct OneilExactReport {
  bool holds = true;
  double max_violation = -std::numeric_limits<double>::infinity();  // max LHS - RHS over the grid
  double worst_t = 0.0, worst_tau = 0.0;
};

// Constant-free two-parameter bound: for all t, tau > 0,
//   (Tf)**(t) <= tau max{k1**(tau), k2**(t)} f**(tau) + int_tau^inf f* k1* du,
// checked exactly up to arithmetic slack.
inline OneilExactReport oneil_exact_check(const IntegralOperator& op, std::span<const double> f,
                                          const std::vector<double>& t_grid,
                                          const std::vector<double>& tau_grid,
                                          double slack = 1e-10) {
  std::vector<double> absf(f.begin(), f.end());
  for (double& v : absf) v = std::abs(v);
  const auto tf = op.apply(absf);
  const auto tf_star = rearrange(tf, op.codomain);
  const auto f_star = rearrange(absf, op.domain);
  OneilExactReport rep;
  for (double tau : tau_grid) {
    const double fss = f_star.double_star(tau);
    const double tail = product_tail_integral(f_star, op.k1, tau);
    const double k1ss = op.k1.double_star(tau);
    for (double t : t_grid) {
      const double lhs = tf_star.double_star(t);
      const double rhs = tau * std::max(k1ss, op.k2.double_star(t)) * fss + tail;
      const double viol = lhs - rhs;
      if (viol > rep.max_violation) {
        rep.max_violation = viol;
        rep.worst_t = t;
        rep.worst_tau = tau;
      }
      if (viol > slack * std::max(1.0, std::abs(rhs))) rep.holds = false;
    }
  }
  return rep;
}

struct OneilPowerReport {
  double c_witness = 0.0;   // minimal constant making the bound hold on the grid
  double c_chain = 0.0;     // constant assembled from the weak-type chain
  double max_violation = 0.0;  // max of LHS - [c_chain * head + tail]; <= 0 when the chain constant works
  double m17 = 0.0, b17 = 0.0;
};

// Two-parameter power-bound estimate: with k1*(t) <= M t^{-1/beta},
// k2*(t) <= B t^{-1/beta0},
//   (Tf)**(t) <= C max{tau^{-beta0/(q beta)}, t^{-1/q}} int_0^tau f* u^{-1+1/p} du
//                + int_tau^inf f* k1* du.
// The chain constant is (q' C21 + beta' M17)/p with C21 the weak-type constant.
inline OneilPowerReport oneil_power_bound_check(const IntegralOperator& op,
                                                const std::vector<std::vector<double>>& fs,
                                                const ExponentSet& e,
                                                const std::vector<double>& t_grid,
                                                const std::vector<double>& tau_grid) {
  OneilPowerReport rep;
  rep.m17 = profile_power_coefficient(op.k1, e.beta);
  rep.b17 = profile_power_coefficient(op.k2, e.beta0);
  const double m_dist = profile_distribution_coefficient(op.k1, e.beta);
  const double b_dist = profile_distribution_coefficient(op.k2, e.beta0);
  const double c21 = (e.q * e.q / (e.beta0 * (e.q - e.p))) * std::pow(m_dist, 1.0 - 1.0 / e.p) *
                     std::pow(b_dist, 1.0 / e.q);
  const double qprime = e.q / (e.q - 1.0);
  rep.c_chain = (qprime * c21 + e.beta_prime * rep.m17) / e.p;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& f : fs) {
    std::vector<double> absf(f.begin(), f.end());
    for (double& v : absf) v = std::abs(v);
    const auto tf = op.apply(absf);
    const auto tf_star = rearrange(tf, op.codomain);
    const auto f_star = rearrange(absf, op.domain);
    for (double tau : tau_grid) {
      const double head = weighted_prefix_integral(f_star, tau, e.p);
      const double tail = product_tail_integral(f_star, op.k1, tau);
      const double tau_pow = std::pow(tau, -e.beta0 / (e.q * e.beta));
      for (double t : t_grid) {
        const double lhs = tf_star.double_star(t);
        const double factor = std::max(tau_pow, std::pow(t, -1.0 / e.q));
        if (head > 0.0) {
          const double needed = (lhs - tail) / (factor * head);
          rep.c_witness = std::max(rep.c_witness, needed);
        }
        rep.max_violation =
            std::max(rep.max_violation, lhs - (rep.c_chain * factor * head + tail));
      }
    }
  }
  return rep;
}

// Geometric (t, tau) grid spanning [1e-3 * mass, mass], 20 points per decade.
inline std::vector<double> default_star_grid(double mass, int per_decade = 20) {
  return geometric_grid(1e-3 * mass, mass, per_decade);
}

}  // namespace mtlab
