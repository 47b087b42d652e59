#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <cstdint>
#include <span>
#include <vector>

#include "mtlab/errors.hpp"
#include "mtlab/measure.hpp"

namespace mtlab {

// Nonincreasing rearrangement as an exact right-continuous step function:
// value is values[k] on [breaks[k-1], breaks[k]), with breaks[-1] = 0.
// A leading +inf block (singular kernel atoms) is allowed.
struct RearrangementProfile {
  std::vector<double> breaks;   // strictly increasing cumulative measures
  std::vector<double> values;   // nonincreasing

  double total() const { return breaks.empty() ? 0.0 : breaks.back(); }

  void canonicalize() {
    std::vector<double> b, v;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      if (!v.empty() && values[i] == v.back())
        b.back() = breaks[i];
      else {
        b.push_back(breaks[i]);
        v.push_back(values[i]);
      }
    }
    breaks = std::move(b);
    values = std::move(v);
  }

  void validate() const {
    if (breaks.size() != values.size()) throw input_error("profile: breaks/values size mismatch");
    double prev_b = 0.0;
    double prev_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      if (!(breaks[i] > prev_b)) throw input_error("profile: breakpoints must increase");
      if (values[i] > prev_v) throw input_error("profile: values must be nonincreasing");
      if (values[i] < 0.0 || std::isnan(values[i])) throw input_error("profile: values must be nonnegative");
      prev_b = breaks[i];
      prev_v = values[i];
    }
  }

  // f*(t) for t > 0; zero past the total mass (right-continuous).
  double value_at(double t) const {
    if (!(t > 0.0)) throw domain_error("profile value: t must be positive");
    auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
    if (it == breaks.end()) return 0.0;
    return values[static_cast<std::size_t>(it - breaks.begin())];
  }

  // exact prefix integral of the step function over (0, t]
  double prefix_integral(double t) const {
    if (!(t >= 0.0)) throw domain_error("profile integral: t must be nonnegative");
    double acc = 0.0, lo = 0.0;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      const double hi = std::min(breaks[i], t);
      if (hi > lo) {
        if (std::isinf(values[i])) return std::numeric_limits<double>::infinity();
        acc += values[i] * (hi - lo);
      }
      if (breaks[i] >= t) break;
      lo = breaks[i];
    }
    return acc;
  }

  double total_integral() const { return prefix_integral(total()); }

  // f**(t) = (1/t) int_0^t f*
  double double_star(double t) const {
    if (!(t > 0.0)) throw domain_error("double_star: t must be positive");
    return prefix_integral(t) / t;
  }

  // distribution function of the profile itself: |{f* > s}|
  double distribution(double s) const {
    if (!(s >= 0.0)) throw domain_error("profile distribution: s must be nonnegative");
    double m = 0.0;
    for (std::size_t i = 0; i < breaks.size(); ++i)
      if (values[i] > s) m = breaks[i];
    return m;
  }
};

// mu({ |f| > s })
inline double distribution(std::span<const double> values, const FiniteMeasureSpace& space, double s) {
  if (!(s >= 0.0)) throw input_error("distribution: s must be nonnegative");
  if (values.size() != space.size()) throw input_error("distribution: values/space size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) throw input_error("distribution: NaN value entry");
    if (std::abs(values[i]) > s) m += space.weights[i];
  }
  return m;
}

// Exact rearrangement by stable descending sort of (|value|, weight) pairs;
// ties keep input order (tie-invariant, any stable rule agrees).
inline RearrangementProfile rearrange(std::span<const double> values, const FiniteMeasureSpace& space) {
  if (space.size() == 0) throw input_error("rearrange: empty space");
  if (values.size() != space.size()) throw input_error("rearrange: values/space size mismatch");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (double v : values)
    if (std::isnan(v)) throw input_error("rearrange: NaN value entry");
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  RearrangementProfile p;
  double cum = 0.0;
  for (std::size_t k : idx) {
    cum += space.weights[k];
    p.breaks.push_back(cum);
    p.values.push_back(std::abs(values[k]));
  }
  if (!p.breaks.empty()) p.breaks.back() = space.total_mass;  // absorb rounding
  p.canonicalize();
  p.validate();
  return p;
}

// Pointwise sup of step profiles, evaluated exactly on the merged breakpoint
// set.  Event sweep: each profile's value only changes at its own breakpoints,
// so a multiset of current values tracks the sup in O(total breaks * log).
inline RearrangementProfile sup_profiles(const std::vector<RearrangementProfile>& profiles) {
  if (profiles.empty()) throw input_error("sup_profiles: empty input");
  struct Event {
    double t;
    std::uint32_t profile;
  };
  std::vector<Event> events;
  for (std::uint32_t p = 0; p < profiles.size(); ++p)
    for (double b : profiles[p].breaks) events.push_back({b, p});
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  std::vector<std::size_t> pos(profiles.size(), 0);  // current block per profile
  std::multiset<double> current;
  for (const auto& p : profiles) current.insert(p.values.empty() ? 0.0 : p.values[0]);
  RearrangementProfile out;
  std::size_t i = 0;
  while (i < events.size()) {
    const double t = events[i].t;
    out.breaks.push_back(t);
    out.values.push_back(*current.rbegin());  // value held on [prev, t)
    while (i < events.size() && events[i].t == t) {
      const auto& p = profiles[events[i].profile];
      std::size_t& k = pos[events[i].profile];
      const double old_v = p.values[k];
      const double new_v = (k + 1 < p.values.size()) ? p.values[k + 1] : 0.0;
      ++k;
      current.erase(current.find(old_v));
      current.insert(new_v);
      ++i;
    }
  }
  out.canonicalize();
  out.validate();
  return out;
}

// Row-major kernel matrix on (N x M).  Returns (k1*, k2*): k1* is the sup over
// rows of the row rearrangements w.r.t. mu on M, k2* the sup over columns
// w.r.t. nu on N.  Infinite entries are admitted and sort above every level.
inline std::pair<RearrangementProfile, RearrangementProfile> kernel_rearrangements(
    const std::vector<double>& kernel, const FiniteMeasureSpace& spaceN,
    const FiniteMeasureSpace& spaceM) {
  const std::size_t nrows = spaceN.size(), ncols = spaceM.size();
  if (kernel.size() != nrows * ncols) throw input_error("kernel_rearrangements: matrix size mismatch");
  for (double v : kernel)
    if (std::isnan(v)) throw input_error("kernel_rearrangements: NaN kernel value");
  std::vector<RearrangementProfile> rows, cols;
  rows.reserve(nrows);
  std::vector<double> buf;
  for (std::size_t i = 0; i < nrows; ++i) {
    buf.assign(kernel.begin() + i * ncols, kernel.begin() + (i + 1) * ncols);
    rows.push_back(rearrange(buf, spaceM));
  }
  cols.reserve(ncols);
  for (std::size_t j = 0; j < ncols; ++j) {
    buf.resize(nrows);
    for (std::size_t i = 0; i < nrows; ++i) buf[i] = kernel[i * ncols + j];
    cols.push_back(rearrange(buf, spaceN));
  }
  return {sup_profiles(rows), sup_profiles(cols)};
}

// exact int_tau^inf f*(u) k*(u) du for two step profiles
inline double product_tail_integral(const RearrangementProfile& f, const RearrangementProfile& k,
                                    double tau) {
  const double hi = std::min(f.total(), k.total());
  if (tau >= hi) return 0.0;
  std::vector<double> cuts;
  cuts.push_back(tau);
  for (double b : f.breaks)
    if (b > tau && b < hi) cuts.push_back(b);
  for (double b : k.breaks)
    if (b > tau && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // right-continuity: value on [cuts[i], cuts[i+1]) is value_at just above cuts[i]
    const double vf = f.value_at(std::nextafter(cuts[i], cuts[i + 1]));
    const double vk = k.value_at(std::nextafter(cuts[i], cuts[i + 1]));
    const double len = cuts[i + 1] - cuts[i];
    if (std::isinf(vf) || std::isinf(vk)) return std::numeric_limits<double>::infinity();
    acc += vf * vk * len;
  }
  return acc;
}

enum class EnvelopeSide { Upper, Lower };

struct EnvelopeReport {
  bool holds = false;
  double witness = 0.0;       // smallest admissible C' over all probes below t0
  double witness_near = 0.0;  // over the small-t half of the probe window
  double witness_far = 0.0;   // over the large-t half
};

// Tests the power-law envelope f*(t) <~ A^{1/beta} t^{-1/beta} (1 +- C' |log t|^{-gamma})
// on the profile's breakpoints below t0 and returns the smallest admissible C'.
// The bound is asymptotic, so "holds" additionally requires the witness not to
// blow up as probes approach t = 0: the near-zero half-window witness must not
// dominate the far half-window one.
inline EnvelopeReport check_power_envelope(const RearrangementProfile& p, double A, double beta,
                                           double gamma, EnvelopeSide side, double t0 = -1.0,
                                           double t_lo = 0.0) {
  if (!(A > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
    throw parameter_error("check_power_envelope: A, beta, gamma must be positive");
  if (t0 <= 0.0) t0 = 0.1 * p.total();
  t0 = std::min(t0, 0.999);  // the envelope form needs |log t| > 0
  std::vector<double> probes;
  for (std::size_t i = 0; i < p.breaks.size(); ++i) {
    const double lo = (i == 0) ? 0.0 : p.breaks[i - 1];
    if (lo > t_lo && lo < t0) probes.push_back(lo);
    if (p.breaks[i] > t_lo && p.breaks[i] < t0) probes.push_back(p.breaks[i] * (1.0 - 1e-12));
  }
  if (probes.empty()) throw inconclusive_error("check_power_envelope: no breakpoints below t0");
  std::sort(probes.begin(), probes.end());
  const double tmin = probes.front();
  const double tsplit = std::sqrt(tmin * t0);  // geometric midpoint of the window
  EnvelopeReport rep;
  for (double t : probes) {
    const double envelope = std::pow(A, 1.0 / beta) * std::pow(t, -1.0 / beta);
    const double ratio = p.value_at(t) / envelope;
    const double dev = (side == EnvelopeSide::Upper) ? (ratio - 1.0) : (1.0 - ratio);
    const double c = std::max(0.0, dev) * std::pow(std::abs(std::log(t)), gamma);
    rep.witness = std::max(rep.witness, c);
    if (t < tsplit)
      rep.witness_near = std::max(rep.witness_near, c);
    else
      rep.witness_far = std::max(rep.witness_far, c);
  }
  rep.holds = !(rep.witness_near > 1.5 * rep.witness_far + 0.5);
  return rep;
}

inline void save_profile_csv(const RearrangementProfile& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write profile file: " + path);
  out << "t,value\n";
  out.precision(15);
  double lo = 0.0;
  for (std::size_t i = 0; i < p.breaks.size(); ++i) {
    out << lo << "," << p.values[i] << "\n";
    out << p.breaks[i] << "," << p.values[i] << "\n";
    lo = p.breaks[i];
  }
}

}  // namespace mtlab
