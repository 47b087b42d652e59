#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mtlab/errors.hpp"
#include "mtlab/gauss.hpp"
#include "mtlab/rng.hpp"

namespace mtlab {

// Nonnegative step function on [edges[0], edges.back()): constant vals[i] on
// [edges[i], edges[i+1]).  Compact support by construction.
struct StepFunction {
  std::vector<double> edges;
  std::vector<double> vals;

  void validate() const {
    if (edges.size() != vals.size() + 1) throw input_error("step function: edges/vals mismatch");
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      if (!(edges[i + 1] > edges[i])) throw input_error("step function: edges must increase");
    for (double v : vals)
      if (!(v >= 0.0) || !std::isfinite(v)) throw input_error("step function: values must be >= 0");
  }

  double support_end() const { return edges.empty() ? 0.0 : edges.back(); }

  double power_integral(double p) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
      acc += std::pow(vals[i], p) * (edges[i + 1] - edges[i]);
    return acc;
  }

  void normalize_power(double p) {
    const double ip = power_integral(p);
    if (!(ip > 0.0)) return;
    const double scale = std::pow(ip, -1.0 / p);
    for (double& v : vals) v *= scale;
  }
};

// One admissible datum of the 1-D reduction: the two-piece weight
//   g(x, y) = 1 + H (1 + |x|)^{-gamma}   for y1 <= x <= y,
//             H e^{(y - x)/q}            for x > y,
// the functional F(y) = y - (int g(.,y) phi)^beta, and int phi^{beta'} <= 1.
struct GarsiaInstance {
  double y1 = 0.0;
  double H = 1.0;
  double beta = 2.0;
  double gamma = 2.0;
  double q = 2.0;
  StepFunction phi;

  double beta_prime() const { return beta / (beta - 1.0); }

  void validate() const {
    if (!(beta > 1.0)) throw parameter_error("garsia: beta must be > 1");
    if (!(gamma > 1.0)) throw parameter_error("garsia: gamma must be > 1");
    if (!(q > 0.0)) throw parameter_error("garsia: q must be positive");
    if (!(H >= 0.0)) throw parameter_error("garsia: H must be >= 0");
    phi.validate();
    if (!phi.edges.empty() && phi.edges.front() < y1 - 1e-12)
      throw input_error("garsia: phi supported below y1");
    if (phi.power_integral(beta_prime()) > 1.0 + 1e-12)
      throw input_error("garsia: int phi^{beta'} exceeds 1");
  }
};

namespace detail {

// antiderivative of (1 + |x|)^{-gamma}, zero at 0
inline double decay_antiderivative(double x, double gamma) {
  if (x >= 0.0) return (1.0 - std::pow(1.0 + x, 1.0 - gamma)) / (gamma - 1.0);
  return -(1.0 - std::pow(1.0 - x, 1.0 - gamma)) / (gamma - 1.0);
}

}  // namespace detail

// exact inner integral int_{y1}^inf g(x, y) phi(x) dx via per-step closed forms
inline double garsia_inner_integral(const GarsiaInstance& inst, double y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < inst.phi.vals.size(); ++i) {
    const double v = inst.phi.vals[i];
    if (v == 0.0) continue;
    const double a = inst.phi.edges[i], b = inst.phi.edges[i + 1];
    // head part x <= y with weight 1 + H (1 + |x|)^{-gamma}
    const double hb = std::min(b, y);
    if (hb > a) {
      acc += v * ((hb - a) + inst.H * (detail::decay_antiderivative(hb, inst.gamma) -
                                       detail::decay_antiderivative(a, inst.gamma)));
    }
    // tail part x > y with weight H e^{(y-x)/q}; closed form avoids cancellation
    const double ta = std::max(a, y);
    if (b > ta && inst.H > 0.0) {
      acc += v * inst.H * inst.q * (std::exp((y - ta) / inst.q) - std::exp((y - b) / inst.q));
    }
  }
  return acc;
}

inline double garsia_F(const GarsiaInstance& inst, double y) {
  if (y < inst.y1) throw domain_error("garsia_F: y below y1");
  const double inner = garsia_inner_integral(inst, y);
  return y - std::pow(inner, inst.beta);
}

struct GarsiaIntegralResult {
  double value = 0.0;
  double tail_bound = 0.0;  // exact tail: F' = 1 beyond supp(phi), so e^{-F(y_max)}
};

// int_{y1}^{y_max} e^{-F} dy by adaptive quadrature on the smooth segments
// between phi's edges.  Beyond supp(phi) the inner integral freezes, so the
// tail equals e^{-F(y_max)} exactly; the integrand must have decayed there.
inline GarsiaIntegralResult garsia_exp_integral(const GarsiaInstance& inst, double y_max,
                                                double tol = 1e-11) {
  inst.validate();
  if (y_max <= inst.phi.support_end() && !inst.phi.edges.empty())
    throw parameter_error("garsia_exp_integral: y_max must pass the support of phi");
  const double tail_val = std::exp(-garsia_F(inst, y_max));
  if (tail_val >= 1e-12)
    throw inconclusive_error("garsia_exp_integral: integrand has not decayed by y_max; raise it");
  std::vector<double> cuts{inst.y1};
  for (double e : inst.phi.edges)
    if (e > inst.y1 && e < y_max) cuts.push_back(e);
  cuts.push_back(y_max);
  std::sort(cuts.begin(), cuts.end());
  GarsiaIntegralResult out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    out.value += integrate_adaptive([&](double y) { return std::exp(-garsia_F(inst, y)); }, cuts[i],
                                    cuts[i + 1], tol);
  out.tail_bound = tail_val;
  return out;
}

struct GarsiaClaimsReport {
  double inf_F = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> level_measures;  // |{ y : F(y) <= lambda }|
  double slope = 0.0;                  // linear-growth fit of |E_lambda| in lambda
};

// Level-set geometry of F: the uniform lower bound and the linear growth of
// |E_lambda| are the two ingredients of the uniform exponential bound.
inline GarsiaClaimsReport garsia_level_sets(const GarsiaInstance& inst,
                                            const std::vector<double>& lambda_grid,
                                            double y_span = 120.0, int grid_points = 24000) {
  inst.validate();
  GarsiaClaimsReport rep;
  rep.lambda_grid = lambda_grid;
  const double y_hi = inst.y1 + y_span;
  const double h = (y_hi - inst.y1) / grid_points;
  std::vector<double> fvals(grid_points + 1);
  for (int i = 0; i <= grid_points; ++i) fvals[i] = garsia_F(inst, inst.y1 + h * i);
  rep.inf_F = *std::min_element(fvals.begin(), fvals.end());
  std::vector<double> fit_x, fit_y;
  for (double lam : lambda_grid) {
    double measure = 0.0;
    for (int i = 0; i < grid_points; ++i)
      if (0.5 * (fvals[i] + fvals[i + 1]) <= lam) measure += h;
    rep.level_measures.push_back(measure);
    if (measure > 0.0 && lam > rep.inf_F + 0.5) {
      fit_x.push_back(lam);
      fit_y.push_back(measure);
    }
  }
  if (fit_x.size() >= 2) rep.slope = fit_line(fit_x, fit_y).slope;
  return rep;
}

// --------------------------------------------------------------------------
// Test families: indicator blocks, geometric decays, and random step
// functions, all normalized to int phi^{beta'} = 1.
// --------------------------------------------------------------------------
inline StepFunction indicator_block(double a, double len) {
  StepFunction s;
  s.edges = {a, a + len};
  s.vals = {1.0};
  return s;
}

inline StepFunction random_step_phi(SplitMix64& rng, double y1, double beta_prime) {
  const int nsteps = 1 + static_cast<int>(rng.next_u64() % 64);
  StepFunction s;
  double x = y1 + 4.0 * rng.next_uniform();
  s.edges.push_back(x);
  for (int i = 0; i < nsteps; ++i) {
    x += 0.05 + 0.28 * rng.next_uniform();
    s.edges.push_back(x);
    s.vals.push_back(rng.next_uniform() < 0.15 ? 0.0 : std::exp(2.0 * rng.next_normal()));
  }
  if (s.power_integral(beta_prime) <= 0.0) s.vals[0] = 1.0;
  s.normalize_power(beta_prime);
  return s;
}

inline StepFunction geometric_decay_phi(double y1, double first_len, double ratio, int blocks,
                                        double beta_prime) {
  StepFunction s;
  double x = y1;
  double len = first_len;
  double v = 1.0;
  s.edges.push_back(x);
  for (int i = 0; i < blocks; ++i) {
    x += len;
    s.edges.push_back(x);
    s.vals.push_back(v);
    len *= 1.15;
    v *= ratio;
  }
  s.normalize_power(beta_prime);
  return s;
}

struct GarsiaFamilyReport {
  double max_integral = 0.0;
  double min_inf_F = 0.0;
  double max_claim2_slope = 0.0;
  int count = 0;
};

inline GarsiaFamilyReport garsia_family_sweep(double y1, double H, double beta, double gamma,
                                              double q, int family_size,
                                              std::uint64_t seed = default_seed,
                                              bool with_level_sets = false) {
  GarsiaFamilyReport rep;
  rep.min_inf_F = std::numeric_limits<double>::infinity();
  SplitMix64 rng(seed);
  const double bp = beta / (beta - 1.0);
  for (int i = 0; i < family_size; ++i) {
    GarsiaInstance inst;
    inst.y1 = y1;
    inst.H = H;
    inst.beta = beta;
    inst.gamma = gamma;
    inst.q = q;
    const int kind = i % 4;
    if (kind == 0) {
      auto blk = indicator_block(y1 + 6.0 * rng.next_uniform(), 0.1 + 9.0 * rng.next_uniform());
      blk.normalize_power(bp);
      inst.phi = blk;
    } else if (kind == 1) {
      inst.phi = geometric_decay_phi(y1 + 4.0 * rng.next_uniform(), 0.2 + 0.6 * rng.next_uniform(),
                                     0.3 + 0.6 * rng.next_uniform(),
                                     2 + static_cast<int>(rng.next_u64() % 10), bp);
    } else {
      inst.phi = random_step_phi(rng, y1, bp);
    }
    const double y_max = std::max(inst.phi.support_end(), y1) + 60.0;
    const auto integral = garsia_exp_integral(inst, y_max);
    rep.max_integral = std::max(rep.max_integral, integral.value + integral.tail_bound);
    if (with_level_sets) {
      const auto claims = garsia_level_sets(inst, linear_grid(-10.0, 50.0, 61));
      rep.min_inf_F = std::min(rep.min_inf_F, claims.inf_F);
      rep.max_claim2_slope = std::max(rep.max_claim2_slope, claims.slope);
    }
    ++rep.count;
  }
  return rep;
}

}  // namespace mtlab
