#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "mtlab/errors.hpp"

namespace mtlab {

// Axis-aligned box with a coarse search lattice; the default 17 points per
// axis matches the sup/inf search convention used by the sharp-constant ops.
struct SearchBox {
  std::vector<double> lo, hi;
  int points_per_axis = 17;

  int dim() const { return static_cast<int>(lo.size()); }

  static SearchBox cube(int n, double half_width) {
    SearchBox b;
    b.lo.assign(n, -half_width);
    b.hi.assign(n, half_width);
    return b;
  }

  static SearchBox single_point(int n) {
    SearchBox b;
    b.lo.assign(n, 0.0);
    b.hi.assign(n, 0.0);
    b.points_per_axis = 1;
    return b;
  }

  void clamp(std::vector<double>& x) const {
    for (int k = 0; k < dim(); ++k) x[k] = std::min(hi[k], std::max(lo[k], x[k]));
  }

  template <class F>
  void for_each_grid_point(F&& f) const {
    const int n = dim();
    std::vector<double> x(n);
    std::vector<int> idx(n, 0);
    const int ppa = std::max(1, points_per_axis);
    while (true) {
      for (int k = 0; k < n; ++k)
        x[k] = (ppa == 1) ? lo[k] : lo[k] + (hi[k] - lo[k]) * idx[k] / (ppa - 1.0);
      f(x);
      int k = 0;
      while (k < n && ++idx[k] == ppa) idx[k++] = 0;
      if (k == n) break;
    }
  }
};

// Nelder-Mead maximization with box clamping; 200 iterations by default.
template <class F>
std::pair<std::vector<double>, double> nelder_mead_max(F&& f, std::vector<double> x0,
                                                       const SearchBox& box, double step = -1.0,
                                                       int iters = 200) {
  const int n = static_cast<int>(x0.size());
  if (n == 0) return {x0, f(x0)};
  if (step <= 0.0) {
    step = 0.0;
    for (int k = 0; k < n; ++k) step = std::max(step, 0.05 * (box.hi[k] - box.lo[k]));
    if (step == 0.0) return {x0, f(x0)};
  }
  auto eval = [&](std::vector<double> x) {
    box.clamp(x);
    return std::pair<std::vector<double>, double>(x, f(x));
  };
  std::vector<std::pair<std::vector<double>, double>> simplex;
  simplex.push_back(eval(x0));
  for (int k = 0; k < n; ++k) {
    auto x = x0;
    x[k] += step;
    simplex.push_back(eval(x));
  }
  auto by_value = [](const auto& a, const auto& b) { return a.second > b.second; };
  for (int it = 0; it < iters; ++it) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) centroid[k] += simplex[i].first[k] / n;
    const auto& worst = simplex.back();
    std::vector<double> xr(n);
    for (int k = 0; k < n; ++k) xr[k] = centroid[k] + (centroid[k] - worst.first[k]);
    auto r = eval(xr);
    if (r.second > simplex.front().second) {
      std::vector<double> xe(n);
      for (int k = 0; k < n; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - worst.first[k]);
      auto ex = eval(xe);
      simplex.back() = (ex.second > r.second) ? ex : r;
    } else if (r.second > simplex[simplex.size() - 2].second) {
      simplex.back() = r;
    } else {
      std::vector<double> xc(n);
      for (int k = 0; k < n; ++k) xc[k] = centroid[k] + 0.5 * (worst.first[k] - centroid[k]);
      auto c = eval(xc);
      if (c.second > worst.second) {
        simplex.back() = c;
      } else {
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          for (int k = 0; k < n; ++k)
            simplex[i].first[k] = 0.5 * (simplex[i].first[k] + simplex[0].first[k]);
          simplex[i] = eval(simplex[i].first);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  return simplex.front();
}

// Coarse lattice scan followed by local refinement from the best lattice point.
template <class F>
std::pair<std::vector<double>, double> maximize_over_box(F&& f, const SearchBox& box,
                                                         int refine_iters = 200) {
  std::vector<double> best_x;
  double best = -std::numeric_limits<double>::infinity();
  box.for_each_grid_point([&](const std::vector<double>& x) {
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  });
  if (box.dim() == 0 || box.points_per_axis <= 1) return {best_x, best};
  double span = 0.0;
  for (int k = 0; k < box.dim(); ++k) span = std::max(span, box.hi[k] - box.lo[k]);
  if (span == 0.0) return {best_x, best};
  return nelder_mead_max(f, best_x, box, span / std::max(1, box.points_per_axis - 1), refine_iters);
}

template <class F>
std::pair<std::vector<double>, double> minimize_over_box(F&& f, const SearchBox& box,
                                                         int refine_iters = 200) {
  auto neg = [&](const std::vector<double>& x) { return -f(x); };
  auto [x, v] = maximize_over_box(neg, box, refine_iters);
  return {x, -v};
}

}  // namespace mtlab
