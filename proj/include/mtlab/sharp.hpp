#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mtlab/errors.hpp"
#include "mtlab/gauss.hpp"
#include "mtlab/kernels.hpp"
#include "mtlab/montecarlo.hpp"
#include "mtlab/search.hpp"
#include "mtlab/special.hpp"
#include "mtlab/sphere.hpp"
#include "mtlab/symbols.hpp"

namespace mtlab {

struct SharpConstantReport {
  double constant = 0.0;   // the exponential coefficient (A^{-1} or its variants)
  double A_value = 0.0;    // the A it inverts
  double exponent = 0.0;   // the power inside the exponential (p' or beta)
  std::string method;      // closed-form | sphere-quadrature | monte-carlo
  std::string formula;     // human-readable description of the evaluated expression
  double error_estimate = 0.0;
  double alt_value = std::numeric_limits<double>::quiet_NaN();  // independent-route constant
  double alt_error = 0.0;
  bool sharpness_attained = true;
  bool injectivity_assumed = false;  // operator injectivity is a hypothesis we do not certify
  std::vector<double> maximizer;
};

// ---------------------------------------------------------------------------
// Trace constants for the fractional-Laplacian representation kernels under a
// measure of growth order lambda: for d even, lambda c_d^{-p'} / omega_{n-1};
// for d odd, (lambda/omega_{n-1}) (c_{d+1}(n-d-1))^{-p'}, with p' = n/(n-d).
// ---------------------------------------------------------------------------
inline SharpConstantReport adams_trace_constant(int n, int d, double lambda) {
  if (!(d > 0 && d < n)) throw domain_error("adams_trace_constant: need integer 0 < d < n");
  if (!(lambda > 0.0 && lambda <= static_cast<double>(n)))
    throw domain_error("adams_trace_constant: need lambda in (0, n]");
  const double pprime = static_cast<double>(n) / (n - d);
  SharpConstantReport rep;
  rep.exponent = pprime;
  rep.method = "closed-form";
  if (d % 2 == 0) {
    const double cd = riesz_coefficient(n, d);
    rep.constant = lambda * std::pow(cd, -pprime) / sphere_area(n);
    rep.formula = "lambda * c_d^{-p'} / omega_{n-1}";
  } else {
    const double coeff = riesz_gradient_coefficient(n, d);
    rep.constant = lambda / sphere_area(n) * std::pow(coeff, -pprime);
    rep.formula = "lambda/omega_{n-1} * (c_{d+1}(n-d-1))^{-p'}";
  }
  // constant = (beta0/beta) A^{-1} with beta0/beta = lambda/n
  rep.A_value = (lambda / static_cast<double>(n)) / rep.constant;
  return rep;
}

// ---------------------------------------------------------------------------
// A = (1/n) sup_x int_{S^{n-1}} |g(x,omega)|^{p'} d omega, constant = A^{-1}.
// ---------------------------------------------------------------------------
inline SharpConstantReport potential_constant_from_profile(
    const std::function<double(const double* x, const double* omega)>& g, int n, double d,
    const SearchBox& box, double quad_tol = 1e-9) {
  if (!(d > 0.0 && d < static_cast<double>(n))) throw domain_error("potential constant: need 0 < d < n");
  if (box.dim() == 0) throw parameter_error("potential constant: empty search grid");
  const double pprime = n / (n - d);
  double quad_err = 0.0;
  auto objective = [&](const std::vector<double>& x) {
    auto integrand = [&](const double* omega) { return std::pow(std::abs(g(x.data(), omega)), pprime); };
    const QuadResult q = sphere_integrate(n, integrand, quad_tol);
    quad_err = std::max(quad_err, q.error);
    return q.value / n;
  };
  auto [xbest, A] = maximize_over_box(objective, box);
  SharpConstantReport rep;
  rep.A_value = A;
  rep.constant = 1.0 / A;
  rep.exponent = pprime;
  rep.method = "sphere-quadrature";
  rep.formula = "[ (1/n) sup_x int_{S^{n-1}} |g(x,.)|^{p'} ]^{-1}";
  rep.error_estimate = quad_err / std::max(A, 1e-300) * rep.constant;
  rep.maximizer = xbest;
  return rep;
}

namespace detail {

// Envelope scale for the super-Gaussian integrands exp(-sum |p_j(x,xi)|^2):
// per axis, the radius where the axis marginal reaches e^{-1}.
inline std::vector<double> mc_envelope_sigmas(const SymbolSpec& s, const double* x) {
  std::vector<double> sig(s.dim_n, 1.0);
  std::vector<double> e(s.dim_n, 0.0);
  for (int k = 0; k < s.dim_n; ++k) {
    e.assign(s.dim_n, 0.0);
    e[k] = 1.0;
    // |p(t e_k)|^2 = t^{2d} |p(e_k)|^2; pick sigma_k where the axis marginal hits e^{-1}
    const double mag = s.symbol_magnitude_sq(x, e.data());
    if (!(mag > 0.0)) throw ellipticity_error("mc envelope: symbol vanishes along an axis");
    sig[k] = 0.55 * std::pow(mag, -1.0 / (2.0 * s.order_d));
  }
  return sig;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// d = n/2 constants: A = sup_x int_{R^n} exp(-sum_j |p_j^0(x,xi)|^2) dxi,
// cross-checked against (1/n) int_{S^{n-1}} (sum_j |p_j^0(x,omega)|^2)^{-1}.
// Covers both the scalar route and vector symbol families.
// ---------------------------------------------------------------------------
inline SharpConstantReport vector_p2_constant(const SymbolSpec& spec, const SearchBox& box,
                                              std::uint64_t samples = 1000000,
                                              std::uint64_t seed = default_seed, int threads = 1,
                                              double quad_tol = 1e-9) {
  if (spec.symbols.empty()) throw parameter_error("vector_p2_constant: no symbols supplied");
  if (std::abs(2.0 * spec.order_d - spec.dim_n) > 1e-12)
    throw parameter_error("vector_p2_constant: requires d = n/2");
  if (!check_homogeneity(spec)) throw input_error("vector_p2_constant: symbols are not homogeneous of order d");
  const int n = spec.dim_n;

  // sphere route (cheap) drives the sup search
  double quad_err = 0.0;
  auto sphere_A = [&](const std::vector<double>& x) {
    check_ellipticity(spec, x.data());
    auto integrand = [&](const double* omega) { return 1.0 / spec.symbol_magnitude_sq(x.data(), omega); };
    const QuadResult q = sphere_integrate(n, integrand, quad_tol);
    quad_err = std::max(quad_err, q.error);
    return q.value / n;
  };
  auto [xbest, A_sphere] = maximize_over_box(sphere_A, box);

  // independent full-space route at the maximizer
  const auto sig = detail::mc_envelope_sigmas(spec, xbest.data());
  auto integrand = [&](const double* xi) { return std::exp(-spec.symbol_magnitude_sq(xbest.data(), xi)); };
  const McResult mc = mc_integrate(n, integrand, sig, samples, seed, 256, threads);

  SharpConstantReport rep;
  rep.A_value = mc.value;
  rep.constant = 1.0 / mc.value;
  rep.exponent = 2.0;
  rep.method = "monte-carlo";
  rep.formula = "[ sup_x int exp(-sum_j |p_j(x,xi)|^2) dxi ]^{-1}";
  rep.error_estimate = mc.std_error / mc.value * rep.constant;
  rep.alt_value = 1.0 / A_sphere;
  rep.alt_error = quad_err / std::max(A_sphere, 1e-300) * rep.alt_value;
  rep.maximizer = xbest;
  rep.injectivity_assumed = true;
  return rep;
}

// Scalar special case d = n/2 for a single principal symbol.
inline SharpConstantReport elliptic_p2_constant(const SymbolEval& symbol, int n,
                                                const SearchBox& box,
                                                std::uint64_t samples = 1000000,
                                                std::uint64_t seed = default_seed,
                                                int threads = 1) {
  SymbolSpec s;
  s.family = SymbolFamily::VectorPolySymbols;
  s.dim_n = n;
  s.order_d = 0.5 * n;
  s.symbols = {symbol};
  auto rep = vector_p2_constant(s, box, samples, seed, threads);
  rep.formula = "[ sup_x int exp(-|p(x,xi)|^2) dxi ]^{-1}";
  return rep;
}

// ---------------------------------------------------------------------------
// Second-order operators: n(n-2)^{n/(n-2)} omega_{n-1}^{2/(n-2)} inf_x (det A_x)^{1/(n-2)}.
// ---------------------------------------------------------------------------
inline SharpConstantReport second_order_constant(
    const std::function<SmallMatrix(const double*)>& A_field, int n, const SearchBox& box) {
  if (n <= 2) throw domain_error("second_order_constant: need n > 2");
  auto det_at = [&](const std::vector<double>& x) {
    const SmallMatrix m = A_field(x.data());
    if (m.n != n) throw input_error("second_order_constant: matrix dimension != n");
    if (!m.is_spd()) throw input_error("second_order_constant: matrix field is not SPD");
    return m.det();
  };
  auto [xbest, inf_det] = minimize_over_box(det_at, box);
  SharpConstantReport rep;
  const double expo = static_cast<double>(n) / (n - 2);
  rep.constant = n * std::pow(static_cast<double>(n - 2), expo) *
                 std::pow(sphere_area(n), 2.0 / (n - 2)) * std::pow(inf_det, 1.0 / (n - 2));
  rep.A_value = 1.0 / rep.constant;
  rep.exponent = expo;
  rep.method = "closed-form";
  rep.formula = "n (n-2)^{n/(n-2)} omega_{n-1}^{2/(n-2)} inf_x det(A_x)^{1/(n-2)}";
  rep.maximizer = xbest;
  rep.injectivity_assumed = true;
  return rep;
}

// ---------------------------------------------------------------------------
// First-order systems: n omega_{n-1}^{1/(n-1)} inf_x |det A_x|^{1/(n-1)}.
// ---------------------------------------------------------------------------
inline SharpConstantReport first_order_vector_constant(
    const std::function<SmallMatrix(const double*)>& A_field, int n, const SearchBox& box) {
  if (n <= 1) throw domain_error("first_order_vector_constant: need n > 1");
  auto absdet_at = [&](const std::vector<double>& x) {
    const SmallMatrix m = A_field(x.data());
    if (m.n != n) throw input_error("first_order_vector_constant: matrix dimension != n");
    const double dd = std::abs(m.det());
    if (!(dd > 1e-14)) throw input_error("first_order_vector_constant: singular matrix on the grid");
    return dd;
  };
  auto [xbest, inf_det] = minimize_over_box(absdet_at, box);
  SharpConstantReport rep;
  rep.constant = n * std::pow(sphere_area(n), 1.0 / (n - 1)) * std::pow(inf_det, 1.0 / (n - 1));
  rep.A_value = 1.0 / rep.constant;
  rep.exponent = static_cast<double>(n) / (n - 1);
  rep.method = "closed-form";
  rep.formula = "n omega_{n-1}^{1/(n-1)} inf_x |det A_x|^{1/(n-1)}";
  rep.maximizer = xbest;
  rep.injectivity_assumed = true;
  return rep;
}

// Self-consistent closed forms for the three fourth-order model systems via
// the radial exponential integral identity (unit-scale factors over (2 pi)^4).
inline double fourth_order_closed_form(int which) {
  const double two_pi_4 = std::pow(2.0 * pi, 4);
  double unit = 0.0;
  if (which == 1)
    unit = std::pow(radial_exp_integral(1, 4.0), 4);
  else if (which == 2)
    unit = std::pow(radial_exp_integral(2, 4.0), 2);
  else if (which == 3)
    unit = radial_exp_integral(3, 4.0) * radial_exp_integral(1, 4.0);
  else
    throw parameter_error("fourth_order_closed_form: which must be 1..3");
  return two_pi_4 / unit;
}

// ---------------------------------------------------------------------------
// Sums of shifted weighted potentials.
// ---------------------------------------------------------------------------
struct Domain {
  enum class Kind { Box, Ball } kind = Kind::Box;
  std::vector<double> lo, hi;      // box
  std::vector<double> center;      // ball
  double radius = 1.0;

  int dim() const { return kind == Kind::Box ? static_cast<int>(lo.size()) : static_cast<int>(center.size()); }

  static Domain box(std::vector<double> lo, std::vector<double> hi) {
    Domain d;
    d.kind = Kind::Box;
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    return d;
  }
  static Domain ball(std::vector<double> center, double radius) {
    Domain d;
    d.kind = Kind::Ball;
    d.center = std::move(center);
    d.radius = radius;
    return d;
  }

  bool contains(const double* x, double margin = 0.0) const {
    if (kind == Kind::Box) {
      for (std::size_t k = 0; k < lo.size(); ++k)
        if (x[k] < lo[k] - margin || x[k] > hi[k] + margin) return false;
      return true;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < center.size(); ++k) s += (x[k] - center[k]) * (x[k] - center[k]);
    return std::sqrt(s) <= radius + margin;
  }

  SearchBox search_box(int points_per_axis = 17) const {
    SearchBox b;
    if (kind == Kind::Box) {
      b.lo = lo;
      b.hi = hi;
    } else {
      b.lo.resize(center.size());
      b.hi.resize(center.size());
      for (std::size_t k = 0; k < center.size(); ++k) {
        b.lo[k] = center[k] - radius;
        b.hi[k] = center[k] + radius;
      }
    }
    b.points_per_axis = points_per_axis;
    return b;
  }

  // distance to the boundary (positive inside), used for probe selection
  double boundary_distance(const double* x) const {
    if (kind == Kind::Ball) {
      double s = 0.0;
      for (std::size_t k = 0; k < center.size(); ++k) s += (x[k] - center[k]) * (x[k] - center[k]);
      return radius - std::sqrt(s);
    }
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lo.size(); ++k) {
      d = std::min(d, x[k] - lo[k]);
      d = std::min(d, hi[k] - x[k]);
    }
    return d;
  }
};

struct WeightedSumReport {
  SharpConstantReport report;
  double M_value = 0.0;
  std::vector<double> maximizer;
  bool sup_on_omega_star = false;
};

// M(g) = sup over x in closure(Omega') of sum over admissible j of
// |g_j(x, x + a_j)|^{p'}; constant n / (omega_{n-1} M(g)).  The sharpness flag
// records whether the maximizer lies in Omega* = Omega' cap cap_j(Omega - a_j).
inline WeightedSumReport weighted_sum_constant(
    const std::vector<std::function<double(const double*, const double*)>>& g, int n, double d,
    const std::vector<std::vector<double>>& shifts, const Domain& omega_prime, const Domain& omega,
    const Domain& U_product) {
  if (g.empty() || g.size() != shifts.size())
    throw parameter_error("weighted_sum_constant: g_j / shift mismatch");
  for (std::size_t i = 0; i < shifts.size(); ++i)
    for (std::size_t j = i + 1; j < shifts.size(); ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += (shifts[i][k] - shifts[j][k]) * (shifts[i][k] - shifts[j][k]);
      if (std::sqrt(s) < 1e-12) throw parameter_error("weighted_sum_constant: shift vectors must be distinct");
    }
  const double pprime = n / (n - d);
  std::vector<double> pair(2 * n);
  auto objective = [&](const std::vector<double>& x) {
    if (!omega_prime.contains(x.data(), 1e-12)) return -1.0;
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      std::vector<double> y(n);
      for (int k = 0; k < n; ++k) y[k] = x[k] + shifts[j][k];
      for (int k = 0; k < n; ++k) {
        pair[k] = x[k];
        pair[n + k] = y[k];
      }
      if (!U_product.contains(pair.data(), 1e-12)) continue;
      s += std::pow(std::abs(g[j](x.data(), y.data())), pprime);
    }
    return s;
  };
  auto [xbest, M] = maximize_over_box(objective, omega_prime.search_box());
  if (!(M > 0.0)) throw degenerate_error("weighted_sum_constant: M(g) = 0");
  WeightedSumReport out;
  out.M_value = M;
  out.maximizer = xbest;
  // sharpness flag: the sup must be attained somewhere strictly inside
  // Omega* = Omega' cap cap_j (Omega - a_j); ties are resolved in its favor
  auto in_omega_star = [&](const std::vector<double>& x) {
    if (omega_prime.boundary_distance(x.data()) <= 1e-6) return false;
    std::vector<double> y(n);
    for (std::size_t j = 0; j < shifts.size(); ++j) {
      for (int k = 0; k < n; ++k) y[k] = x[k] + shifts[j][k];
      if (omega.boundary_distance(y.data()) <= 1e-6) return false;
    }
    return true;
  };
  bool attained_inside = in_omega_star(xbest);
  if (!attained_inside) {
    omega_prime.search_box().for_each_grid_point([&](const std::vector<double>& x) {
      if (!attained_inside && objective(x) >= M * (1.0 - 1e-9) && in_omega_star(x))
        attained_inside = true;
    });
  }
  out.sup_on_omega_star = attained_inside;
  out.report.constant = n / (sphere_area(n) * M);
  out.report.A_value = sphere_area(n) * M / n;
  out.report.exponent = pprime;
  out.report.method = "sphere-quadrature";
  out.report.formula = "n / (omega_{n-1} M(g)),  M(g) = sup_x sum_j |g_j(x, x+a_j)|^{p'}";
  out.report.sharpness_attained = attained_inside;
  out.report.maximizer = xbest;
  return out;
}

// ---------------------------------------------------------------------------
// Spherical Parseval identity on the supported closed-form transform family.
// ---------------------------------------------------------------------------
struct SphereFunctionSpec {
  enum class Kind { Constant, InverseQuadForm } kind = Kind::Constant;
  double c = 1.0;       // constant value / overall scale
  SmallMatrix A;        // SPD form for the inverse-quadratic family

  static SphereFunctionSpec constant(double c) {
    SphereFunctionSpec s;
    s.kind = Kind::Constant;
    s.c = c;
    return s;
  }
  static SphereFunctionSpec inverse_quad_form(SmallMatrix A, double scale = 1.0) {
    SphereFunctionSpec s;
    s.kind = Kind::InverseQuadForm;
    s.A = std::move(A);
    s.c = scale;
    return s;
  }
};

struct ParsevalReport {
  double lhs = 0.0, rhs = 0.0, residual = 0.0;
};

// f extends with homogeneity -d, g with homogeneity d-n; the transforms of
// both extensions are closed-form (shifted power / quadratic-form pairs), so
// both sides reduce to sphere quadratures.
inline ParsevalReport spherical_parseval_check(const SphereFunctionSpec& f,
                                               const SphereFunctionSpec& g, int n, double d,
                                               double quad_tol = 1e-10) {
  if (!(d > 0.0 && d < static_cast<double>(n))) throw domain_error("parseval: need 0 < d < n");
  const double cd = riesz_coefficient(n, d);
  const double cnd = riesz_coefficient(n, n - d);
  // transform of the -d extension evaluated on the sphere
  auto f_hat = [&](const double* w) -> double {
    if (f.kind == SphereFunctionSpec::Kind::Constant)
      return f.c * std::pow(2.0 * pi, d - n) / cnd;
    const SmallMatrix Ainv = f.A.inverse();
    const double q = Ainv.quadratic_form(w);
    return f.c / std::sqrt(f.A.det()) * std::pow(2.0 * pi, d - n) / cnd * std::pow(q, 0.5 * (d - n));
  };
  auto g_hat = [&](const double* w) -> double {
    if (g.kind == SphereFunctionSpec::Kind::Constant)
      return g.c * std::pow(2.0 * pi, -d) / cd;
    const SmallMatrix Ainv = g.A.inverse();
    const double q = Ainv.quadratic_form(w);
    return g.c / std::sqrt(g.A.det()) * std::pow(2.0 * pi, -d) / cd * std::pow(q, -0.5 * d);
  };
  auto f_val = [&](const double* w) -> double {
    if (f.kind == SphereFunctionSpec::Kind::Constant) return f.c;
    return f.c * std::pow(f.A.quadratic_form(w), -0.5 * d);
  };
  auto g_val = [&](const double* w) -> double {
    if (g.kind == SphereFunctionSpec::Kind::Constant) return g.c;
    return g.c * std::pow(g.A.quadratic_form(w), 0.5 * (d - n));
  };
  ParsevalReport rep;
  rep.lhs = sphere_integrate(n, [&](const double* w) { return f_hat(w) * g_hat(w); }, quad_tol).value;
  rep.rhs = sphere_integrate(n, [&](const double* w) { return f_val(w) * g_val(w); }, quad_tol).value;
  rep.residual = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.rhs), 1e-300);
  return rep;
}

// ---------------------------------------------------------------------------
// Distribution asymptotics of a kernel with a homogeneous leading part:
// measures |{ y in Omega : |K(x,y)| > s }| by polar ray counting around each
// probe x, fits A_hat s^{-exponent_hat}, and reports the column bound
// coefficient sup_y |{ x : |K(x,y)| > s }| s^{p'}.
// ---------------------------------------------------------------------------
struct AsymptoticsReport {
  double A_hat = 0.0;
  double exponent_hat = 0.0;
  double upper_B = 0.0;
  double fit_residual = 0.0;
  std::vector<double> s_grid;
  std::vector<double> measures;  // max over probes, per s
};

namespace detail {

// super-level radius along one ray: largest rho < rho_max with F(rho) > s
template <class F>
double ray_level_radius(F&& value_at, double rho_max, double s) {
  if (rho_max <= 0.0) return 0.0;
  const int coarse = 64;
  double lo = 0.0, hi = 0.0;
  double prev_rho = rho_max * 1e-12;
  if (!(value_at(prev_rho) > s)) return 0.0;  // not even near the center
  for (int i = 1; i <= coarse; ++i) {
    const double rho = rho_max * std::pow(1e-12, 1.0 - static_cast<double>(i) / coarse);
    if (value_at(rho) > s) {
      prev_rho = rho;
      if (i == coarse) return rho_max;
    } else {
      lo = prev_rho;
      hi = rho;
      break;
    }
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(mid) > s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// directions and weights for the surface integral on S^{n-1}, n = 2 or 3
inline void sphere_directions(int n, int m, std::vector<double>& dirs, std::vector<double>& wts) {
  dirs.clear();
  wts.clear();
  if (n == 2) {
    const double h = 2.0 * pi / m;
    for (int i = 0; i < m; ++i) {
      dirs.push_back(std::cos(h * i));
      dirs.push_back(std::sin(h * i));
      wts.push_back(h);
    }
  } else if (n == 3) {
    const GaussRule& gquad = gauss_legendre(m);
    const double h = 2.0 * pi / m;
    for (int a = 0; a < m; ++a) {
      const double u = gquad.nodes[a];
      const double su = std::sqrt(std::max(0.0, 1.0 - u * u));
      for (int b = 0; b < m; ++b) {
        dirs.push_back(su * std::cos(h * b));
        dirs.push_back(su * std::sin(h * b));
        dirs.push_back(u);
        wts.push_back(gquad.weights[a] * h);
      }
    }
  } else {
    throw unsupported_error("ray counting implemented for n = 2, 3");
  }
}

template <class F>
double level_set_measure(int n, F&& value_at_point, const double* center, const Domain& omega,
                         double s, int rays) {
  std::vector<double> dirs, wts;
  sphere_directions(n, rays, dirs, wts);
  std::vector<double> pt(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < wts.size(); ++r) {
    const double* w = dirs.data() + static_cast<std::size_t>(n) * r;
    // boundary exit by bisection on contains()
    double lo = 0.0, hi = 1.0;
    while (true) {
      for (int k = 0; k < n; ++k) pt[k] = center[k] + hi * w[k];
      if (!omega.contains(pt.data())) break;
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) break;
    }
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      for (int k = 0; k < n; ++k) pt[k] = center[k] + mid * w[k];
      if (omega.contains(pt.data()))
        lo = mid;
      else
        hi = mid;
    }
    const double rho_max = lo;
    auto along = [&](double rho) {
      std::vector<double> y(n);
      for (int k = 0; k < n; ++k) y[k] = center[k] + rho * w[k];
      return value_at_point(y.data());
    };
    const double rho_star = ray_level_radius(along, rho_max, s);
    acc += wts[r] * std::pow(rho_star, n) / n;
  }
  return acc;
}

}  // namespace detail

inline AsymptoticsReport distribution_asymptotics(const KernelSpec& kernel, const Domain& omega,
                                                  const std::vector<double>& s_grid,
                                                  const std::vector<std::vector<double>>& probes,
                                                  int rays = 256, double max_log_residual = 0.05) {
  if (probes.empty() || s_grid.size() < 3)
    throw parameter_error("distribution_asymptotics: need probes and >= 3 levels");
  const int n = kernel.dim_n;
  const double pprime = n / (n - kernel.order_d);
  AsymptoticsReport rep;
  rep.s_grid = s_grid;
  rep.measures.assign(s_grid.size(), 0.0);
  for (const auto& x : probes) {
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
      auto val = [&](const double* y) { return kernel.magnitude(x.data(), y); };
      const double m = detail::level_set_measure(n, val, x.data(), omega, s_grid[i], rays);
      rep.measures[i] = std::max(rep.measures[i], m);
    }
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (rep.measures[i] <= 0.0) continue;
    lx.push_back(std::log(s_grid[i]));
    ly.push_back(std::log(rep.measures[i]));
  }
  if (lx.size() < 3)
    throw inconclusive_error("distribution_asymptotics: level sets empty; lower the s grid");
  const LineFit fit = fit_line(lx, ly);
  if (fit.residual_rms > max_log_residual)
    throw inconclusive_error("distribution_asymptotics: fit residual " +
                             std::to_string(fit.residual_rms) +
                             " above threshold; the s grid is outside the asymptotic regime");
  rep.exponent_hat = -fit.slope;
  rep.A_hat = std::exp(fit.intercept);
  // column bound at the largest level, probing the same points as y's
  double upper = 0.0;
  const double s_top = s_grid.back();
  for (const auto& y : probes) {
    auto val = [&](const double* x) { return kernel.magnitude(x, y.data()); };
    const double m = detail::level_set_measure(n, val, y.data(), omega, s_top, rays);
    upper = std::max(upper, m * std::pow(s_top, pprime));
  }
  rep.upper_B = upper;
  return rep;
}

}  // namespace mtlab
