#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mtlab/errors.hpp"
#include "mtlab/rng.hpp"
#include "mtlab/special.hpp"

namespace mtlab {

// Kernel evaluator on R^n x R^n, possibly vector-valued (vec_dim components).
// When a homogeneous leading profile g(x, omega) is supplied, the kernel is
// expected to look like g(x, (y-x)/|y-x|) |x-y|^{d-n} plus an
// O(|x-y|^{d-n+error_exponent}) remainder near the diagonal.
struct KernelSpec {
  int dim_n = 1;
  double order_d = 0.5;
  int vec_dim = 1;
  std::function<void(const double* x, const double* y, double* out)> eval;
  std::function<double(const double* x, const double* omega)> leading_profile;  // optional
  double error_exponent = 0.0;
  double holder_sigma = 1.0;
  std::string name;

  void validate() const {
    if (dim_n < 1) throw input_error("kernel: dim_n must be >= 1");
    if (!(order_d > 0.0 && order_d < static_cast<double>(dim_n)))
      throw domain_error("kernel: need 0 < d < n");
    if (!eval) throw input_error("kernel: missing evaluator");
  }

  double scalar(const double* x, const double* y) const {
    double v;
    eval(x, y, &v);
    return v;
  }

  double magnitude(const double* x, const double* y) const {
    if (vec_dim == 1) return std::abs(scalar(x, y));
    std::vector<double> buf(vec_dim);
    eval(x, y, buf.data());
    double s = 0.0;
    for (double v : buf) s += v * v;
    return std::sqrt(s);
  }
};

namespace detail {
inline double dist(const double* x, const double* y, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return std::sqrt(s);
}
}  // namespace detail

// |x-y|^{d-n}
inline KernelSpec riesz_kernel(int n, double d) {
  KernelSpec k;
  k.dim_n = n;
  k.order_d = d;
  k.name = "riesz";
  k.error_exponent = 1.0;
  k.eval = [n, d](const double* x, const double* y, double* out) {
    const double r = detail::dist(x, y, n);
    *out = std::pow(r, d - n);  // +inf at r = 0
  };
  k.leading_profile = [](const double*, const double*) { return 1.0; };
  k.validate();
  return k;
}

// |x-y|^{d-n} (1 + 1/(1 + |log|x-y||)): the log-perturbed kernel whose
// distribution bound carries only a gamma = 1 correction.
inline KernelSpec riesz_log_kernel(int n, double d) {
  KernelSpec k;
  k.dim_n = n;
  k.order_d = d;
  k.name = "riesz-log";
  k.eval = [n, d](const double* x, const double* y, double* out) {
    const double r = detail::dist(x, y, n);
    *out = std::pow(r, d - n) * (1.0 + 1.0 / (1.0 + std::abs(std::log(r))));
  };
  k.leading_profile = [](const double*, const double*) { return 1.0; };
  k.validate();
  return k;
}

// g((y-x)/|y-x|) |x-y|^{d-n} with an optional smooth remainder exponent
inline KernelSpec profile_kernel(int n, double d,
                                 std::function<double(const double*, const double*)> g,
                                 double error_exponent = 1.0) {
  KernelSpec k;
  k.dim_n = n;
  k.order_d = d;
  k.name = "profile";
  k.error_exponent = error_exponent;
  k.leading_profile = g;
  k.eval = [n, d, g](const double* x, const double* y, double* out) {
    const double r = detail::dist(x, y, n);
    std::vector<double> omega(n);
    if (r == 0.0) {
      *out = std::numeric_limits<double>::infinity();
      return;
    }
    for (int kk = 0; kk < n; ++kk) omega[kk] = (y[kk] - x[kk]) / r;
    *out = g(x, omega.data()) * std::pow(r, d - n);
  };
  k.validate();
  return k;
}

// Vector kernel |x-y|^{d-n-1}(x-y), the gradient-representation kernel.
inline KernelSpec riesz_gradient_kernel(int n, double d) {
  KernelSpec k;
  k.dim_n = n;
  k.order_d = d;
  k.vec_dim = n;
  k.name = "riesz-gradient";
  k.error_exponent = 1.0;
  k.eval = [n, d](const double* x, const double* y, double* out) {
    const double r = detail::dist(x, y, n);
    const double scale = std::pow(r, d - n - 1);
    for (int kk = 0; kk < n; ++kk) out[kk] = scale * (x[kk] - y[kk]);
  };
  k.leading_profile = [](const double*, const double*) { return 1.0; };  // |K| profile
  k.validate();
  return k;
}

struct LeadingProfileCheck {
  bool consistent = false;
  double estimated_constant = 0.0;  // sup of |remainder| / |x-y|^{d-n+eps} over samples
};

// Sampled validation of the near-diagonal expansion against the supplied
// leading profile: draws random pairs at shrinking separations and verifies
// the remainder scales no worse than |x-y|^{d-n+eps}.
inline LeadingProfileCheck check_leading_profile(const KernelSpec& k, double domain_halfwidth,
                                                 std::uint64_t seed = default_seed,
                                                 int n_samples = 256) {
  if (!k.leading_profile || !(k.error_exponent > 0.0))
    throw input_error("check_leading_profile: kernel has no leading profile/exponent");
  SplitMix64 rng(seed);
  const int n = k.dim_n;
  std::vector<double> x(n), y(n), omega(n);
  double worst_small = 0.0, worst_large = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    for (int kk = 0; kk < n; ++kk) x[kk] = domain_halfwidth * (2.0 * rng.next_uniform() - 1.0) * 0.5;
    const double rho = std::pow(10.0, -1.0 - 7.0 * rng.next_uniform());  // 1e-8 .. 1e-1
    double norm = 0.0;
    for (int kk = 0; kk < n; ++kk) {
      omega[kk] = rng.next_normal();
      norm += omega[kk] * omega[kk];
    }
    norm = std::sqrt(norm);
    for (int kk = 0; kk < n; ++kk) {
      omega[kk] /= norm;
      y[kk] = x[kk] + rho * omega[kk];
    }
    const double lead = k.leading_profile(x.data(), omega.data()) * std::pow(rho, k.order_d - n);
    const double rem = std::abs(k.magnitude(x.data(), y.data()) - std::abs(lead));
    const double ratio = rem / std::pow(rho, k.order_d - n + k.error_exponent);
    if (rho < 1e-5)
      worst_small = std::max(worst_small, ratio);
    else if (rho > 1e-2)
      worst_large = std::max(worst_large, ratio);
  }
  LeadingProfileCheck rep;
  rep.estimated_constant = std::max(worst_small, worst_large);
  // a genuine O(rho^{d-n+eps}) remainder keeps the ratio bounded as rho -> 0
  rep.consistent = worst_small <= 4.0 * worst_large + 1e-9;
  return rep;
}

}  // namespace mtlab
