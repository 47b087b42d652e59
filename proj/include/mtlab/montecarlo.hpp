#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <thread>
#include <vector>

#include "mtlab/errors.hpp"
#include "mtlab/rng.hpp"
#include "mtlab/special.hpp"

namespace mtlab {

struct McResult {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

// Importance-sampled integral over R^n with a centered Gaussian envelope of
// per-axis standard deviations sigma[k].  Batches carry sub-seeds derived from
// the master seed and are reduced in index order, so the result is identical
// for any thread count.
template <class F>
McResult mc_integrate(int n, F&& f, const std::vector<double>& sigma, std::uint64_t samples,
                      std::uint64_t seed = default_seed, int batches = 256, int threads = 1) {
  if (static_cast<int>(sigma.size()) != n) throw parameter_error("mc_integrate: sigma size != n");
  for (double s : sigma)
    if (!(s > 0.0)) throw parameter_error("mc_integrate: sigma must be positive");
  batches = std::max(1, batches);
  const std::uint64_t per_batch = std::max<std::uint64_t>(1, samples / batches);
  double log_norm = 0.5 * n * std::log(2.0 * pi);
  for (double s : sigma) log_norm += std::log(s);

  std::vector<double> batch_mean(batches, 0.0);
  auto run_batch = [&](int b) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    std::vector<double> x(n);
    double acc = 0.0;
    for (std::uint64_t s = 0; s < per_batch; ++s) {
      double q = 0.0;
      for (int k = 0; k < n; ++k) {
        const double z = rng.next_normal();
        x[k] = sigma[k] * z;
        q += 0.5 * z * z;
      }
      // f / phi with phi the Gaussian density
      acc += f(x.data()) * std::exp(q + log_norm);
    }
    batch_mean[b] = acc / static_cast<double>(per_batch);
  };

  if (threads <= 1) {
    for (int b = 0; b < batches; ++b) run_batch(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic_int next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int b = next.fetch_add(1); b < batches; b = next.fetch_add(1)) run_batch(b);
      });
    for (auto& th : pool) th.join();
  }

  McResult r;
  r.samples = per_batch * static_cast<std::uint64_t>(batches);
  for (int b = 0; b < batches; ++b) r.value += batch_mean[b];
  r.value /= batches;
  double var = 0.0;
  for (int b = 0; b < batches; ++b) {
    const double d = batch_mean[b] - r.value;
    var += d * d;
  }
  var /= (batches > 1 ? (batches - 1.0) : 1.0);
  r.std_error = std::sqrt(var / batches);
  return r;
}

}  // namespace mtlab
