#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mtlab/exponents.hpp"
#include "mtlab/gauss.hpp"
#include "mtlab/kernels.hpp"
#include "mtlab/measure.hpp"
#include "mtlab/operator.hpp"
#include "mtlab/profile.hpp"
#include "mtlab/special.hpp"

namespace mtlab {

// ---------------------------------------------------------------------------
// Quadrature grids.  1-D: symmetric dyadic shells around the origin with
// cells_per_shell midpoint cells in log radius, plus one center cell.  Cell
// masses integrate the density |x|^{density_lambda - 1} exactly, so the same
// geometry serves the Lebesgue measure (lambda = 1) and the trace measures.
// ---------------------------------------------------------------------------
inline FiniteMeasureSpace make_log_radial_space_1d(double r_floor, double R = 1.0,
                                                   int cells_per_shell = 64,
                                                   double density_lambda = 1.0) {
  if (!(r_floor > 0.0 && r_floor < R)) throw parameter_error("radial grid: need 0 < r_floor < R");
  if (!(density_lambda > 0.0)) throw parameter_error("radial grid: density order must be positive");
  FiniteMeasureSpace s;
  s.dim = 1;
  const int shells = static_cast<int>(std::ceil(std::log2(R / r_floor)));
  auto cell_mass = [&](double a, double b) {
    return (std::pow(b, density_lambda) - std::pow(a, density_lambda)) / density_lambda;
  };
  auto push_cell = [&](double a, double b, int sign) {
    const double node = sign * std::sqrt(a * b);  // midpoint in log space
    s.coords.push_back(node);
    s.cell_lo.push_back(sign > 0 ? a : -b);
    s.cell_hi.push_back(sign > 0 ? b : -a);
    s.weights.push_back(cell_mass(a, b));
    s.diag_radius.push_back(0.5 * (b - a));
  };
  for (int sign : {-1, +1}) {
    for (int k = 0; k < shells; ++k) {
      const double hi = R * std::pow(0.5, k);
      const double lo = std::max(r_floor, hi * 0.5);
      for (int c = 0; c < cells_per_shell; ++c) {
        const double a = lo * std::pow(hi / lo, static_cast<double>(c) / cells_per_shell);
        const double b = lo * std::pow(hi / lo, static_cast<double>(c + 1) / cells_per_shell);
        push_cell(a, b, sign);
      }
      if (lo <= r_floor) break;
    }
  }
  // center cell
  s.coords.push_back(0.0);
  s.cell_lo.push_back(-r_floor);
  s.cell_hi.push_back(r_floor);
  s.weights.push_back(2.0 * cell_mass(0.0, r_floor));
  s.diag_radius.push_back(r_floor);
  double sum = 0.0;
  for (double w : s.weights) sum += w;
  s.total_mass = sum;
  for (std::size_t i = 0; i < s.weights.size(); ++i) s.ids.push_back("c" + std::to_string(i));
  s.validate();
  return s;
}

// 2-D polar grid on the disc B(0,R), Lebesgue measure.
inline FiniteMeasureSpace make_polar_space_2d(double r_floor, double R = 1.0,
                                              int cells_per_shell = 16, int n_theta = 48) {
  if (!(r_floor > 0.0 && r_floor < R)) throw parameter_error("polar grid: need 0 < r_floor < R");
  FiniteMeasureSpace s;
  s.dim = 2;
  const int shells = static_cast<int>(std::ceil(std::log2(R / r_floor)));
  const double dtheta = 2.0 * pi / n_theta;
  auto push_ring = [&](double a, double b) {
    const double rn = std::sqrt(a * b);
    const double mass = 0.5 * dtheta * (b * b - a * a);
    const double eq = std::sqrt(mass / pi);
    for (int t = 0; t < n_theta; ++t) {
      const double th = dtheta * (t + 0.5);
      s.coords.push_back(rn * std::cos(th));
      s.coords.push_back(rn * std::sin(th));
      s.weights.push_back(mass);
      s.diag_radius.push_back(eq);
    }
  };
  for (int k = 0; k < shells; ++k) {
    const double hi = R * std::pow(0.5, k);
    const double lo = std::max(r_floor, hi * 0.5);
    for (int c = 0; c < cells_per_shell; ++c) {
      const double a = lo * std::pow(hi / lo, static_cast<double>(c) / cells_per_shell);
      const double b = lo * std::pow(hi / lo, static_cast<double>(c + 1) / cells_per_shell);
      push_ring(a, b);
    }
    if (lo <= r_floor) break;
  }
  // center disc as one cell
  s.coords.push_back(0.0);
  s.coords.push_back(0.0);
  s.weights.push_back(pi * r_floor * r_floor);
  s.diag_radius.push_back(r_floor);
  double sum = 0.0;
  for (double w : s.weights) sum += w;
  s.total_mass = sum;
  for (std::size_t i = 0; i < s.weights.size(); ++i) s.ids.push_back("c" + std::to_string(i));
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Kernel atomization: midpoint values except near the diagonal, where the
// kernel is averaged over the target cell (exactly integrable power part).
// ---------------------------------------------------------------------------
namespace detail {

inline double radial_average_1d(const KernelSpec& k, const double* x, double lo, double hi,
                                int component) {
  // average of component over the 1-D cell [lo, hi] around x in [lo, hi]
  const int n = k.dim_n;
  const double width = hi - lo;
  std::vector<double> buf(k.vec_dim);
  auto comp_at = [&](double y) {
    k.eval(x, &y, buf.data());
    return buf[component];
  };
  double acc = 0.0;
  const double power = k.order_d - n;  // in (-1, 0)
  // left side: y = x - rho
  if (x[0] - lo > 0.0)
    acc += integrate_power_endpoint(
        [&](double rho) { return comp_at(x[0] - rho) * std::pow(rho, -power); }, x[0] - lo, power);
  if (hi - x[0] > 0.0)
    acc += integrate_power_endpoint(
        [&](double rho) { return comp_at(x[0] + rho) * std::pow(rho, -power); }, hi - x[0], power);
  return acc / width;
}

inline double ball_average(const KernelSpec& k, const double* x, double radius, int component) {
  // average over the equivalent ball B(x, radius) in dimension n >= 2
  const int n = k.dim_n;
  std::vector<double> buf(k.vec_dim);
  std::vector<double> y(n);
  const double power = k.order_d - n + (n - 1);  // kernel * rho^{n-1} surface factor
  // angular average via a fixed direction set (power kernels are isotropic to
  // leading order; the remainder is smooth)
  const int n_dirs = (n == 2) ? 16 : 26;
  double acc = 0.0;
  for (int t = 0; t < n_dirs; ++t) {
    std::vector<double> w(n, 0.0);
    if (n == 2) {
      const double th = 2.0 * pi * (t + 0.5) / n_dirs;
      w[0] = std::cos(th);
      w[1] = std::sin(th);
    } else {
      SplitMix64 rng(1234 + t);
      double norm = 0.0;
      for (int kk = 0; kk < n; ++kk) {
        w[kk] = rng.next_normal();
        norm += w[kk] * w[kk];
      }
      norm = std::sqrt(norm);
      for (int kk = 0; kk < n; ++kk) w[kk] /= norm;
    }
    auto comp_at = [&](double rho) {
      for (int kk = 0; kk < n; ++kk) y[kk] = x[kk] + rho * w[kk];
      k.eval(x, y.data(), buf.data());
      return buf[component];
    };
    double radial;
    if (power < 0.0)
      radial = integrate_power_endpoint(
          [&](double rho) { return comp_at(rho) * std::pow(rho, -power); }, radius, power);
    else
      radial = integrate_gl([&](double rho) { return comp_at(rho) * std::pow(rho, power); }, 0.0,
                            radius, 32);
    acc += radial;
  }
  acc *= sphere_area(n) / n_dirs;
  const double volume = ball_volume(n) * std::pow(radius, n);
  return acc / volume;
}

}  // namespace detail

// Builds the dense operator matrix for one vector component of the kernel.
// Cells whose geometry contains the evaluation point get the exact cell
// average; neighbors within two cell widths are integrated with Gauss nodes.
inline std::vector<double> atomize_kernel_component(const KernelSpec& k,
                                                    const FiniteMeasureSpace& N,
                                                    const FiniteMeasureSpace& M, int component) {
  const std::size_t nr = N.size(), nc = M.size();
  std::vector<double> mat(nr * nc);
  std::vector<double> buf(k.vec_dim);
  const bool cells_1d = (k.dim_n == 1 && !M.cell_lo.empty());
  for (std::size_t i = 0; i < nr; ++i) {
    const double* x = N.point(i);
    for (std::size_t j = 0; j < nc; ++j) {
      const double* y = M.point(j);
      double v;
      if (cells_1d) {
        const double lo = M.cell_lo[j], hi = M.cell_hi[j];
        const double width = hi - lo;
        if (x[0] >= lo && x[0] <= hi) {
          v = detail::radial_average_1d(k, x, lo, hi, component);
        } else if (std::min(std::abs(x[0] - lo), std::abs(x[0] - hi)) < 2.0 * width) {
          // near-diagonal: resolve the steep kernel with Gauss nodes on the cell
          double acc = integrate_gl(
              [&](double yy) {
                k.eval(x, &yy, buf.data());
                return buf[component];
              },
              lo, hi, 16);
          v = acc / width;
        } else {
          k.eval(x, y, buf.data());
          v = buf[component];
        }
      } else if (!M.diag_radius.empty()) {
        double dist2 = 0.0;
        for (int kk = 0; kk < k.dim_n; ++kk) dist2 += (x[kk] - y[kk]) * (x[kk] - y[kk]);
        if (std::sqrt(dist2) <= M.diag_radius[j]) {
          v = detail::ball_average(k, x, M.diag_radius[j], component);
        } else {
          k.eval(x, y, buf.data());
          v = buf[component];
        }
      } else {
        k.eval(x, y, buf.data());
        v = buf[component];
      }
      mat[i * nc + j] = v;
    }
  }
  return mat;
}

inline IntegralOperator atomize_kernel(const KernelSpec& k, const FiniteMeasureSpace& M,
                                       const FiniteMeasureSpace& N) {
  if (k.vec_dim != 1) throw unsupported_error("atomize_kernel: scalar kernels only; use components");
  return IntegralOperator::make(M, N, atomize_kernel_component(k, N, M, 0));
}

// ---------------------------------------------------------------------------
// Extremal families.
// ---------------------------------------------------------------------------
enum class FamilyKind { PhiSequence, MoserSequence, LogCounterexample };

struct ExtremalFamily {
  FamilyKind kind = FamilyKind::PhiSequence;
  KernelSpec kernel;
  std::vector<double> center;      // x0
  double omega_radius = 1.0;       // Omega = B(x0, omega_radius)
  ExponentSet exponents;
  double moser_delta = 0.0;
  int moser_ell = 2;

  double radius_of(int m) const { return std::pow(0.5, m); }  // dyadic radius schedule
};

// Phi_m = K(x0, y) |K(x0, y)|^{beta-2} outside the ball E_m = B(x0, 2^{-m}),
// zero inside; vector kernels give the componentwise analogue.  Values are
// returned per grid atom (flattened components for vector kernels).
inline std::vector<double> build_extremal_phi(const ExtremalFamily& fam, int m,
                                              const FiniteMeasureSpace& grid) {
  const double rm = fam.radius_of(m);
  if (!(rm < fam.omega_radius))
    throw geometry_error("build_extremal_phi: E_m radius " + std::to_string(rm) +
                         " is not inside Omega");
  const int vdim = fam.kernel.vec_dim;
  const int n = fam.kernel.dim_n;
  std::vector<double> out(grid.size() * vdim, 0.0);
  std::vector<double> buf(vdim);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double* y = grid.point(j);
    double dist2 = 0.0;
    for (int kk = 0; kk < n; ++kk) dist2 += (y[kk] - fam.center[kk]) * (y[kk] - fam.center[kk]);
    if (std::sqrt(dist2) < rm) continue;  // vanishes on E_m
    fam.kernel.eval(fam.center.data(), y, buf.data());
    double mag = 0.0;
    for (double v : buf) mag += v * v;
    mag = std::sqrt(mag);
    const double scale = (mag > 0.0) ? std::pow(mag, fam.exponents.beta - 2.0) : 0.0;
    for (int c = 0; c < vdim; ++c) out[j * vdim + c] = buf[c] * scale;
  }
  return out;
}

// int_N exp[ alpha (|Tf| / ||f||_{beta'})^beta ] dnu on the operator's codomain
inline double exp_integral(const IntegralOperator& op, std::span<const double> f, double alpha,
                           double beta) {
  const double norm = lp_norm(f, op.domain, beta / (beta - 1.0));
  if (!(norm > 0.0)) throw domain_error("exp_integral: f vanishes, normalization undefined");
  const auto tf = op.apply(f);
  double acc = 0.0;
  for (std::size_t i = 0; i < tf.size(); ++i)
    acc += op.codomain.weights[i] * std::exp(alpha * std::pow(std::abs(tf[i]) / norm, beta));
  return acc;
}

enum class SweepVerdict { Diverges, Bounded, Inconclusive };

inline const char* to_string(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::Diverges: return "DIVERGES";
    case SweepVerdict::Bounded: return "BOUNDED";
    default: return "INCONCLUSIVE";
  }
}

struct SweepColumn {
  double alpha = 0.0;
  std::vector<double> values;          // indexed by m
  SweepVerdict verdict = SweepVerdict::Inconclusive;
  double fitted_exponent = 0.0;        // slope of log(value) in m
};

struct SweepResult {
  std::vector<int> ms;
  std::vector<double> phi_norm_pow;    // ||Phi_m||_{beta'}^{beta'}
  std::vector<double> mu_Em;           // domain measure of E_m
  std::vector<double> condition_d_max; // sup over probes of the comparison integral
  bool condition_c_holds = true;
  double condition_a_ratio = 0.0;      // sup_m mu(E_m) s_m^beta / A
  std::vector<SweepColumn> columns;
  LineFit phi_norm_fit;                // slope vs log(1/mu(E_m))
};

// Divergence decision rule: a column DIVERGES when the last three successive
// ratios all exceed 1 + theta and the fitted log-slope in m is positive;
// BOUNDED when the last three ratios stay below 1.01 or the increments decay.
inline SweepVerdict classify_sweep(const std::vector<double>& v, double theta = 0.05) {
  const std::size_t n = v.size();
  if (n < 4) return SweepVerdict::Inconclusive;
  double r1 = v[n - 3] / v[n - 4], r2 = v[n - 2] / v[n - 3], r3 = v[n - 1] / v[n - 2];
  if (r1 >= 1.0 + theta && r2 >= 1.0 + theta && r3 >= 1.0 + theta) return SweepVerdict::Diverges;
  if (r1 <= 1.01 && r2 <= 1.01 && r3 <= 1.01) return SweepVerdict::Bounded;
  const double d1 = std::abs(v[n - 3] - v[n - 4]), d2 = std::abs(v[n - 2] - v[n - 3]),
               d3 = std::abs(v[n - 1] - v[n - 2]);
  if (d3 <= d2 && d2 <= d1) return SweepVerdict::Bounded;
  return SweepVerdict::Inconclusive;
}

struct ConditionDReport {
  std::vector<int> ms;
  std::vector<double> max_integral;  // per m, max over probes
  double overall_max = 0.0;
};

// Comparison integral of the frozen-center kernel against nearby centers:
// int_{Omega \ E_m} |(K(x,.) - K(x0,.)) . K(x0,.)| |K(x0,.)|^{beta-2} dy,
// evaluated for probes x in B(x0, r_m/2); bounded in m certifies the
// stability hypothesis of the blow-up construction.
inline ConditionDReport check_condition_d(const KernelSpec& kernel,
                                          const std::vector<double>& x0, double omega_radius,
                                          const std::vector<int>& ms, double beta,
                                          int probes_per_m = 3, int gl_order = 48) {
  if (kernel.dim_n != 1)
    throw unsupported_error("check_condition_d: quadrature implemented for the 1-D testbed");
  ConditionDReport rep;
  rep.ms = ms;
  const int vdim = kernel.vec_dim;
  std::vector<double> bufx(vdim), buf0(vdim);
  for (int m : ms) {
    const double rm = std::pow(0.5, m);
    double worst = 0.0;
    for (int pidx = 0; pidx < probes_per_m; ++pidx) {
      const double x = x0[0] + 0.5 * rm * (probes_per_m == 1 ? 1.0 : (2.0 * pidx / (probes_per_m - 1.0) - 1.0));
      auto integrand = [&](double y) {
        kernel.eval(&x, &y, bufx.data());
        kernel.eval(x0.data(), &y, buf0.data());
        double dot = 0.0, mag0 = 0.0;
        for (int c = 0; c < vdim; ++c) {
          dot += (bufx[c] - buf0[c]) * buf0[c];
          mag0 += buf0[c] * buf0[c];
        }
        mag0 = std::sqrt(mag0);
        const double weight = (mag0 > 0.0) ? std::pow(mag0, beta - 2.0) : 0.0;
        return std::abs(dot) * weight;
      };
      // shells from rm out to omega_radius, Gauss nodes in log radius, both signs
      double acc = 0.0;
      const int shells = std::max(1, static_cast<int>(std::ceil(std::log2(omega_radius / rm))));
      for (int sign : {-1, 1}) {
        for (int k = 0; k < shells; ++k) {
          const double hi = omega_radius * std::pow(0.5, k);
          const double lo = std::max(rm, 0.5 * hi);
          acc += integrate_gl(
              [&](double u) {
                const double r = std::exp(u);
                return integrand(x0[0] + sign * r) * r;
              },
              std::log(lo), std::log(hi), gl_order);
          if (lo <= rm) break;
        }
      }
      worst = std::max(worst, acc);
    }
    rep.max_integral.push_back(worst);
    rep.overall_max = std::max(rep.overall_max, worst);
  }
  return rep;
}

// Full sharpness sweep on the default 1-D geometry.  nu_lambda selects the
// codomain measure |x|^{nu_lambda - 1} dx (1 = Lebesgue).
inline SweepResult sharpness_sweep(const ExtremalFamily& fam, const std::vector<double>& alphas,
                                   int m_lo, int m_hi, double nu_lambda = 1.0,
                                   int cells_per_shell = 64) {
  if (fam.kernel.dim_n != 1)
    throw unsupported_error("sharpness_sweep: the continuum sweep runs on the 1-D testbed");
  if (m_hi < m_lo + 3) throw parameter_error("sharpness_sweep: need at least 4 values of m");
  SweepResult out;
  const double r_floor = std::pow(0.5, m_hi + 6);
  const auto M = make_log_radial_space_1d(r_floor, fam.omega_radius, cells_per_shell, 1.0);
  const auto N = (nu_lambda == 1.0)
                     ? M
                     : make_log_radial_space_1d(r_floor, fam.omega_radius, cells_per_shell, nu_lambda);
  const auto op = atomize_kernel(fam.kernel, M, N);

  // condition c): the frozen-center row profile dominates the power envelope,
  // certified down to the measure scale the sweep actually samples (below that
  // the grid cannot resolve the profile)
  {
    std::vector<double> row(M.size());
    for (std::size_t j = 0; j < M.size(); ++j)
      row[j] = fam.kernel.magnitude(fam.center.data(), M.point(j));
    const auto rowstar = rearrange(row, M);
    const double t_resolved = 2.0 * std::pow(0.5, m_hi);
    const auto env = check_power_envelope(rowstar, fam.exponents.A, fam.exponents.beta,
                                          fam.exponents.gamma, EnvelopeSide::Lower, -1.0,
                                          t_resolved);
    out.condition_c_holds = env.holds && env.witness < 64.0;
  }

  out.columns.resize(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) out.columns[a].alpha = alphas[a];

  for (int m = m_lo; m <= m_hi; ++m) {
    out.ms.push_back(m);
    const double rm = fam.radius_of(m);
    const auto phi = build_extremal_phi(fam, m, M);
    const double bp = fam.exponents.beta_prime;
    double norm_pow = 0.0;
    for (std::size_t j = 0; j < M.size(); ++j)
      norm_pow += M.weights[j] * std::pow(std::abs(phi[j]), bp);
    out.phi_norm_pow.push_back(norm_pow);
    double muE = 0.0;
    for (std::size_t j = 0; j < M.size(); ++j)
      if (std::abs(M.point(j)[0] - fam.center[0]) < rm) muE += M.weights[j];
    out.mu_Em.push_back(muE);
    // condition a): level above the truncation radius vs the distribution coefficient
    double sm = 0.0;
    for (std::size_t j = 0; j < M.size(); ++j) {
      const double* y = M.point(j);
      if (std::abs(y[0] - fam.center[0]) >= rm)
        sm = std::max(sm, fam.kernel.magnitude(fam.center.data(), y));
    }
    out.condition_a_ratio =
        std::max(out.condition_a_ratio, muE * std::pow(sm, fam.exponents.beta) / fam.exponents.A);
    for (std::size_t a = 0; a < alphas.size(); ++a)
      out.columns[a].values.push_back(exp_integral(op, phi, alphas[a], fam.exponents.beta));
  }

  const auto cond_d = check_condition_d(fam.kernel, fam.center, fam.omega_radius, out.ms,
                                        fam.exponents.beta, 3);
  out.condition_d_max = cond_d.max_integral;

  // Phi norm law: ||Phi_m||^{beta'} against log(1/mu(E_m))
  {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < out.ms.size(); ++i) {
      x.push_back(std::log(1.0 / out.mu_Em[i]));
      y.push_back(out.phi_norm_pow[i]);
    }
    out.phi_norm_fit = fit_line(x, y);
  }

  for (auto& col : out.columns) {
    col.verdict = classify_sweep(col.values);
    std::vector<double> xm, lv;
    const std::size_t tail = std::min<std::size_t>(6, col.values.size());
    for (std::size_t i = col.values.size() - tail; i < col.values.size(); ++i) {
      xm.push_back(static_cast<double>(out.ms[i]));
      lv.push_back(std::log(col.values[i]));
    }
    col.fitted_exponent = fit_line(xm, lv).slope;
  }
  return out;
}

// ---------------------------------------------------------------------------
// The log-perturbed kernel experiment: exponential integrals of the truncated
// power functions f_r(y) = |y|^{-d} on r <= |y| <= 1, normalized in L^{beta'},
// at the power-kernel threshold coefficient n/omega_{n-1}; the unperturbed
// kernel is the bounded control.
// ---------------------------------------------------------------------------
struct CounterexampleResult {
  std::vector<int> k_exponents;        // r = 2^{-k}
  std::vector<double> values;          // perturbed-kernel integrals
  std::vector<double> control_values;  // plain power kernel at the same alpha
  std::vector<double> norm_pow;        // ||f_r||_{beta'}^{beta'}
  double fitted_exponent = 0.0;        // log(value) vs log(log(1/r))
  double domination_min = 0.0;         // min over r of value / (log 1/r)^{n beta / 2}
  bool domination_monotone = true;     // ratios nondecreasing within tolerance
  SweepVerdict control_verdict = SweepVerdict::Inconclusive;
  double alpha = 0.0;
};

inline CounterexampleResult log_counterexample(int n, double d, const std::vector<int>& ks,
                                               int cells_per_shell = 64) {
  if (n != 1) throw unsupported_error("log_counterexample: implemented on the 1-D testbed");
  if (ks.size() < 3) throw parameter_error("log_counterexample: need at least 3 radii");
  CounterexampleResult out;
  out.k_exponents = ks;
  const double beta = n / (n - d);
  const double beta_prime = n / d;
  out.alpha = n / sphere_area(n);
  const int kmax = *std::max_element(ks.begin(), ks.end());
  const double r_floor = std::pow(0.5, kmax + 6);
  const auto grid = make_log_radial_space_1d(r_floor, 1.0, cells_per_shell, 1.0);
  const auto op_pert = atomize_kernel(riesz_log_kernel(n, d), grid, grid);
  const auto op_ctrl = atomize_kernel(riesz_kernel(n, d), grid, grid);
  for (int k : ks) {
    const double r = std::pow(0.5, k);
    std::vector<double> f(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double ay = std::abs(grid.point(j)[0]);
      if (ay >= r && ay <= 1.0) f[j] = std::pow(ay, -d);
    }
    double np = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
      np += grid.weights[j] * std::pow(std::abs(f[j]), beta_prime);
    out.norm_pow.push_back(np);
    out.values.push_back(exp_integral(op_pert, f, out.alpha, beta));
    out.control_values.push_back(exp_integral(op_ctrl, f, out.alpha, beta));
  }
  std::vector<double> lx, ly;
  out.domination_min = std::numeric_limits<double>::infinity();
  double prev_ratio = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double L = ks[i] * std::numbers::ln2;
    lx.push_back(std::log(L));
    ly.push_back(std::log(out.values[i]));
    const double ratio = out.values[i] / std::pow(L, 0.5 * n * beta);
    out.domination_min = std::min(out.domination_min, ratio);
    if (i > 0 && ratio < prev_ratio * (1.0 - 1e-6)) out.domination_monotone = false;
    prev_ratio = ratio;
  }
  out.fitted_exponent = fit_line(lx, ly).slope;
  out.control_verdict = classify_sweep(out.control_values);
  return out;
}

// ---------------------------------------------------------------------------
// The smooth radial blow-up profile: plateau log(1/r_m), logarithmic middle
// annulus, and degree-(2l+1) Hermite transitions; exact piecewise application
// of integer powers of the (positive) radial Laplacian.
// ---------------------------------------------------------------------------
namespace radial {

// polynomial in (s - center), s = log r
struct LogPoly {
  double center = 0.0;
  std::vector<double> c;

  double eval(double s) const {
    const double t = s - center;
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return acc;
  }
  LogPoly deriv() const {
    LogPoly d;
    d.center = center;
    if (c.size() <= 1) {
      d.c = {0.0};
      return d;
    }
    d.c.resize(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d.c[k - 1] = c[k] * static_cast<double>(k);
    return d;
  }
  LogPoly scaled(double f) const {
    LogPoly out = *this;
    for (double& v : out.c) v *= f;
    return out;
  }
  static LogPoly add(const LogPoly& a, const LogPoly& b) {
    LogPoly out;
    out.center = a.center;
    out.c.assign(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t k = 0; k < a.c.size(); ++k) out.c[k] += a.c[k];
    for (std::size_t k = 0; k < b.c.size(); ++k) out.c[k] += b.c[k];
    return out;
  }
};

// r^a * Q(log r)
struct RadialTerm {
  double rpow = 0.0;
  LogPoly poly;
};

using RadialFunc = std::vector<RadialTerm>;

// positive Laplacian of a radial function in R^n:
//   Delta (r^a Q) = -[ a(a+n-2) Q + (2a+n-2) Q' + Q'' ] r^{a-2}
inline RadialFunc positive_laplacian(const RadialFunc& f, int n) {
  RadialFunc out;
  for (const auto& t : f) {
    const double a = t.rpow;
    const LogPoly q1 = t.poly.deriv();
    const LogPoly q2 = q1.deriv();
    LogPoly q = LogPoly::add(t.poly.scaled(-a * (a + n - 2.0)),
                             LogPoly::add(q1.scaled(-(2.0 * a + n - 2.0)), q2.scaled(-1.0)));
    out.push_back({a - 2.0, q});
  }
  return out;
}

inline double eval(const RadialFunc& f, double s /* = log r */) {
  double acc = 0.0;
  for (const auto& t : f) acc += std::exp(t.rpow * s) * t.poly.eval(s);
  return acc;
}

// for functions whose terms share rpow (true after repeated Laplacians of
// rpow = 0 pieces): the polynomial factor alone, with the power stripped
inline double eval_stripped(const RadialFunc& f, double s) {
  double acc = 0.0;
  for (const auto& t : f) acc += t.poly.eval(s);
  return acc;
}

}  // namespace radial

struct MoserPiece {
  double s_lo = 0.0, s_hi = 0.0;  // in s = log r
  radial::RadialFunc u;           // the profile
  radial::RadialFunc lap;         // Delta^{d/2} u (terms share rpow = -d)
};

struct MoserProfile {
  int n = 3, d = 2, ell = 2;
  double delta = 0.0;
  double log_rm = 0.0;            // = -m log 2
  std::vector<MoserPiece> pieces; // ordered inward: outer zero region omitted
  std::vector<double> spline;     // phi coefficients on the local [0,1] variable

  double value_u(double s) const {
    for (const auto& p : pieces)
      if (s >= p.s_lo && s <= p.s_hi) return radial::eval(p.u, s);
    return (s > pieces.front().s_hi) ? 0.0 : radial::eval(pieces.back().u, s);
  }

  // ||Delta^{d/2} u||_p^p; the r^{-dp} growth cancels against the volume
  // factor analytically, so the quadrature sees only polynomial factors.
  double lap_norm_pow(double p, int gl_order = 96) const {
    if (std::abs(p * d - n) > 1e-12)
      throw unsupported_error("moser norm: p must equal n/d (the volume factor cancels only then)");
    const double omega = sphere_area(n);
    double acc = 0.0;
    for (const auto& piece : pieces) {
      if (piece.lap.empty()) continue;
      // terms share rpow = -d, and |r^{-d}|^p r^{n-1} dr = |.|^p ds in s = log r
      acc += omega * integrate_gl(
                         [&](double s) {
                           return std::pow(std::abs(radial::eval_stripped(piece.lap, s)), p);
                         },
                         piece.s_lo, piece.s_hi, gl_order);
    }
    return acc;
  }
};

// Hermite transition polynomial on the local variable w in [0,1]:
// phi^{(k)}(0) = 0 for 0 <= k <= l;  phi(1) = 1 + delta, phi'(1) = 1,
// phi^{(k)}(1) = 0 for 2 <= k <= l.  Unique of degree 2l+1.
inline std::vector<double> moser_spline(int ell, double delta) {
  const int nunk = ell + 1;
  std::vector<double> A(static_cast<std::size_t>(nunk) * nunk, 0.0);
  std::vector<double> b(nunk, 0.0);
  for (int row = 0; row <= ell; ++row) {
    for (int col = 0; col < nunk; ++col) {
      const int j = ell + 1 + col;  // monomial degree
      double fall = 1.0;
      for (int t = 0; t < row; ++t) fall *= (j - t);
      A[row * nunk + col] = fall;  // k-th derivative of w^j at w = 1
    }
    b[row] = (row == 0) ? (1.0 + delta) : (row == 1 ? 1.0 : 0.0);
  }
  // Gaussian elimination with partial pivoting
  std::vector<int> piv(nunk);
  for (int c = 0; c < nunk; ++c) {
    int p = c;
    for (int r = c + 1; r < nunk; ++r)
      if (std::abs(A[r * nunk + c]) > std::abs(A[p * nunk + c])) p = r;
    for (int j = 0; j < nunk; ++j) std::swap(A[c * nunk + j], A[p * nunk + j]);
    std::swap(b[c], b[p]);
    for (int r = c + 1; r < nunk; ++r) {
      const double f = A[r * nunk + c] / A[c * nunk + c];
      for (int j = c; j < nunk; ++j) A[r * nunk + j] -= f * A[c * nunk + j];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(nunk);
  for (int r = nunk - 1; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < nunk; ++j) s -= A[r * nunk + j] * x[j];
    x[r] = s / A[r * nunk + r];
  }
  std::vector<double> coef(2 * ell + 2, 0.0);
  for (int col = 0; col < nunk; ++col) coef[ell + 1 + col] = x[col];
  return coef;
}

inline MoserProfile build_moser_profile(int n, int d, int m, double delta = 0.0, int ell = 2) {
  if (d % 2 != 0 || d <= 0 || d >= n) throw domain_error("moser profile: need even 0 < d < n");
  if (ell < d) throw smoothing_order_error("moser profile: smoothing order l must be >= d");
  MoserProfile prof;
  prof.n = n;
  prof.d = d;
  prof.ell = ell;
  prof.delta = delta;
  prof.log_rm = -m * std::numbers::ln2;
  prof.spline = moser_spline(ell, delta);
  const double L = -prof.log_rm;
  if (!(L > 2.0 * (1.0 + delta) + 1.0))
    throw geometry_error("moser profile: m too small for the requested delta");

  auto spline_poly = [&](double center, bool flip, double offset, double scale) {
    // represents offset + scale * phi(w) with w = +-(s - center)
    radial::LogPoly p;
    p.center = center;
    p.c.assign(prof.spline.size(), 0.0);
    for (std::size_t k = 0; k < prof.spline.size(); ++k) {
      double v = scale * prof.spline[k];
      if (flip && (k % 2 == 1)) v = -v;
      p.c[k] = v;
    }
    p.c[0] += offset;
    return p;
  };

  auto push_piece = [&](double s_lo, double s_hi, radial::RadialFunc u) {
    MoserPiece piece;
    piece.s_lo = s_lo;
    piece.s_hi = s_hi;
    piece.u = u;
    radial::RadialFunc lap = std::move(u);
    for (int k = 0; k < d / 2; ++k) lap = radial::positive_laplacian(lap, n);
    piece.lap = std::move(lap);
    prof.pieces.push_back(std::move(piece));
  };

  // outer transition: u = phi(-s - delta + delta) ... phi evaluated at w = -s - delta
  // s in [-1-delta, -delta];  w = -(s + delta) in [0, 1]
  push_piece(-1.0 - delta, -delta, {{0.0, spline_poly(-delta, true, 0.0, 1.0)}});
  // middle: u = -s
  push_piece(prof.log_rm + 1.0 + delta, -1.0 - delta, {{0.0, radial::LogPoly{0.0, {0.0, -1.0}}}});
  // inner transition: u = L - phi(w), w = s - log_rm - delta in [0, 1]
  push_piece(prof.log_rm + delta, prof.log_rm + 1.0 + delta,
             {{0.0, spline_poly(prof.log_rm + delta, false, L, -1.0)}});
  // plateau: u = L, Delta u = 0
  {
    MoserPiece piece;
    piece.s_lo = prof.log_rm + delta - 40.0;
    piece.s_hi = prof.log_rm + delta;
    piece.u = {{0.0, radial::LogPoly{0.0, {L}}}};
    piece.lap = {};
    prof.pieces.push_back(std::move(piece));
  }
  return prof;
}

}  // namespace mtlab
