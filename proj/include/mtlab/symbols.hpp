#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "mtlab/errors.hpp"
#include "mtlab/rng.hpp"
#include "mtlab/special.hpp"

namespace mtlab {

// Small dense square matrix (n <= 8 in practice).
struct SmallMatrix {
  int n = 0;
  std::vector<double> a;  // row-major

  static SmallMatrix identity(int n) {
    SmallMatrix m;
    m.n = n;
    m.a.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m.a[i * n + i] = 1.0;
    return m;
  }

  static SmallMatrix diag(const std::vector<double>& d) {
    SmallMatrix m;
    m.n = static_cast<int>(d.size());
    m.a.assign(static_cast<std::size_t>(m.n) * m.n, 0.0);
    for (int i = 0; i < m.n; ++i) m.a[i * m.n + i] = d[i];
    return m;
  }

  double& at(int i, int j) { return a[i * n + j]; }
  double at(int i, int j) const { return a[i * n + j]; }

  double quadratic_form(const double* x) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += at(i, j) * x[i] * x[j];
    return s;
  }

  std::vector<double> apply_vec(const double* x) const {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) y[i] += at(i, j) * x[j];
    return y;
  }

  // determinant by LU with partial pivoting
  double det() const {
    std::vector<double> lu = a;
    double d = 1.0;
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(lu[r * n + c]) > std::abs(lu[piv * n + c])) piv = r;
      if (lu[piv * n + c] == 0.0) return 0.0;
      if (piv != c) {
        for (int j = 0; j < n; ++j) std::swap(lu[c * n + j], lu[piv * n + j]);
        d = -d;
      }
      d *= lu[c * n + c];
      for (int r = c + 1; r < n; ++r) {
        const double m = lu[r * n + c] / lu[c * n + c];
        for (int j = c; j < n; ++j) lu[r * n + j] -= m * lu[c * n + j];
      }
    }
    return d;
  }

  bool is_spd() const {
    // symmetric + Cholesky succeeds
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(at(i, j) - at(j, i)) > 1e-10 * (std::abs(at(i, j)) + std::abs(at(j, i)) + 1.0))
          return false;
    std::vector<double> l = a;
    for (int c = 0; c < n; ++c) {
      double diag = l[c * n + c];
      for (int k = 0; k < c; ++k) diag -= l[c * n + k] * l[c * n + k];
      if (!(diag > 0.0)) return false;
      const double root = std::sqrt(diag);
      l[c * n + c] = root;
      for (int r = c + 1; r < n; ++r) {
        double v = l[r * n + c];
        for (int k = 0; k < c; ++k) v -= l[r * n + k] * l[c * n + k];
        l[r * n + c] = v / root;
      }
    }
    return true;
  }

  SmallMatrix inverse() const {
    SmallMatrix inv = identity(n);
    std::vector<double> lu = a;
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(lu[r * n + c]) > std::abs(lu[piv * n + c])) piv = r;
      if (lu[piv * n + c] == 0.0) throw input_error("matrix inverse: singular matrix");
      if (piv != c) {
        for (int j = 0; j < n; ++j) {
          std::swap(lu[c * n + j], lu[piv * n + j]);
          std::swap(inv.a[c * n + j], inv.a[piv * n + j]);
        }
      }
      const double d = lu[c * n + c];
      for (int j = 0; j < n; ++j) {
        lu[c * n + j] /= d;
        inv.a[c * n + j] /= d;
      }
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const double m = lu[r * n + c];
        if (m == 0.0) continue;
        for (int j = 0; j < n; ++j) {
          lu[r * n + j] -= m * lu[c * n + j];
          inv.a[r * n + j] -= m * inv.a[c * n + j];
        }
      }
    }
    return inv;
  }
};

// A strictly homogeneous principal symbol p^0(x, xi), complex-valued,
// homogeneous of degree `order` in xi.
using SymbolEval = std::function<std::complex<double>(const double* x, const double* xi)>;

enum class SymbolFamily {
  RieszPower,
  SPDQuadraticForm,
  FirstOrderMatrix,
  ExplicitSphereProfile,
  VectorPolySymbols,
  WeightedPotentialSum,
};

struct SymbolSpec {
  SymbolFamily family;
  int dim_n = 2;
  double order_d = 1.0;

  // SPDQuadraticForm / FirstOrderMatrix
  std::function<SmallMatrix(const double* x)> matrix_field;

  // ExplicitSphereProfile: g(x, omega)
  std::function<double(const double* x, const double* omega)> sphere_profile;

  // VectorPolySymbols: the strictly homogeneous symbols p_j^0(x, xi)
  std::vector<SymbolEval> symbols;

  // WeightedPotentialSum
  std::vector<std::function<double(const double* x, const double* y)>> weights_g;
  std::vector<std::vector<double>> shifts;

  double symbol_magnitude_sq(const double* x, const double* xi) const {
    double s = 0.0;
    for (const auto& p : symbols) s += std::norm(p(x, xi));
    return s;
  }
};

// p_j^0(x, t xi) = t^d p_j^0(x, xi), sampled
inline bool check_homogeneity(const SymbolSpec& spec, std::uint64_t seed = default_seed,
                              int samples = 64, double tol = 1e-9) {
  SplitMix64 rng(seed);
  const int n = spec.dim_n;
  std::vector<double> x(n, 0.0), xi(n);
  for (int s = 0; s < samples; ++s) {
    double norm = 0.0;
    for (int k = 0; k < n; ++k) {
      xi[k] = rng.next_normal();
      norm += xi[k] * xi[k];
    }
    if (norm == 0.0) continue;
    const double t = 0.5 + 3.0 * rng.next_uniform();
    std::vector<double> txi(n);
    for (int k = 0; k < n; ++k) txi[k] = t * xi[k];
    for (const auto& p : spec.symbols) {
      const auto lhs = p(x.data(), txi.data());
      const auto rhs = std::pow(t, spec.order_d) * p(x.data(), xi.data());
      if (std::abs(lhs - rhs) > tol * (std::abs(lhs) + std::abs(rhs) + 1.0)) return false;
    }
  }
  return true;
}

// sum_j |p_j^0(x, xi)|^2 > 0 for sampled unit xi; the coordinate axes are
// always sampled, so axis-degenerate symbols are caught deterministically.
inline void check_ellipticity(const SymbolSpec& spec, const double* x,
                              std::uint64_t seed = default_seed, int samples = 256,
                              double floor = 1e-9) {
  SplitMix64 rng(seed);
  const int n = spec.dim_n;
  std::vector<double> xi(n);
  for (int k = 0; k < n; ++k) {
    xi.assign(n, 0.0);
    xi[k] = 1.0;
    if (spec.symbol_magnitude_sq(x, xi.data()) < floor)
      throw ellipticity_error("symbol magnitude below floor along a coordinate axis");
  }
  for (int s = 0; s < samples; ++s) {
    double norm = 0.0;
    for (int k = 0; k < n; ++k) {
      xi[k] = rng.next_normal();
      norm += xi[k] * xi[k];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (int k = 0; k < n; ++k) xi[k] /= norm;
    if (spec.symbol_magnitude_sq(x, xi.data()) < floor)
      throw ellipticity_error("symbol magnitude below floor at a sampled direction");
  }
}

// (2 pi i)^d sum_{|alpha|=d} a_alpha xi^alpha for a constant-coefficient
// operator given by (coefficient, multi-index) pairs.
struct PolyTerm {
  std::complex<double> coeff;
  std::vector<int> alpha;
};

inline SymbolEval make_poly_symbol(int n, int d, std::vector<PolyTerm> terms) {
  const std::complex<double> scale = std::pow(std::complex<double>(0.0, 2.0 * pi), d);
  return [n, terms = std::move(terms), scale](const double*, const double* xi) {
    std::complex<double> acc = 0.0;
    for (const auto& t : terms) {
      double mono = 1.0;
      for (int k = 0; k < n; ++k)
        for (int rep = 0; rep < t.alpha[k]; ++rep) mono *= xi[k];
      acc += t.coeff * mono;
    }
    return scale * acc;
  };
}

// The three fourth-order model operators on R^4 used as vector-symbol presets:
//  P1 = (d11, d22, d33, d44), P2 = (d11+d22, d33+d44), P3 = (d11+d22+d33, d44).
inline SymbolSpec fourth_order_system(int which) {
  SymbolSpec s;
  s.family = SymbolFamily::VectorPolySymbols;
  s.dim_n = 4;
  s.order_d = 2.0;
  auto second = [&](std::vector<int> vars) {
    std::vector<PolyTerm> terms;
    for (int v : vars) {
      PolyTerm t;
      t.coeff = 1.0;
      t.alpha.assign(4, 0);
      t.alpha[v] = 2;
      terms.push_back(std::move(t));
    }
    return make_poly_symbol(4, 2, std::move(terms));
  };
  if (which == 1) {
    s.symbols = {second({0}), second({1}), second({2}), second({3})};
  } else if (which == 2) {
    s.symbols = {second({0, 1}), second({2, 3})};
  } else if (which == 3) {
    s.symbols = {second({0, 1, 2}), second({3})};
  } else {
    throw parameter_error("fourth_order_system: which must be 1, 2 or 3");
  }
  return s;
}

}  // namespace mtlab
