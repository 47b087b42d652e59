#include <doctest.h>

#include <cmath>

#include "mtlab/garsia.hpp"
#include "oracles.hpp"

using namespace mtlab;

TEST_CASE("garsia functional closed forms") {
  SUBCASE("phi = 0 makes F the identity and the integral e^{-y1}") {
    GarsiaInstance inst;
    inst.y1 = 0.3;
    inst.phi.edges = {0.3, 1.0};
    inst.phi.vals = {0.0};
    CHECK(garsia_F(inst, 2.0) == doctest::Approx(2.0));
    auto r = garsia_exp_integral(inst, 45.0);
    CHECK(r.value + r.tail_bound == doctest::Approx(std::exp(-0.3)).epsilon(1e-9));
  }
  SUBCASE("H = 0 with an indicator block") {
    GarsiaInstance inst;
    inst.H = 0.0;
    inst.phi = indicator_block(0.0, 1.0);
    for (double y : {0.25, 0.5, 0.9})
      CHECK(garsia_F(inst, y) == doctest::Approx(y - std::pow(y, 2.0)).epsilon(1e-13));
    for (double y : {1.5, 3.0})
      CHECK(garsia_F(inst, y) == doctest::Approx(y - 1.0).epsilon(1e-13));
  }
  SUBCASE("y below y1 is rejected") {
    GarsiaInstance inst;
    CHECK_THROWS_AS(garsia_F(inst, -1.0), domain_error);
  }
}

TEST_CASE("inner integral matches a dense Riemann oracle") {
  SplitMix64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    GarsiaInstance inst;
    inst.H = 0.5 + rng.next_uniform();
    inst.gamma = 1.5 + rng.next_uniform();
    inst.q = 0.8 + 2.0 * rng.next_uniform();
    inst.phi = random_step_phi(rng, 0.0, 2.0);
    const double y = 2.0 + 10.0 * rng.next_uniform();
    // dense Riemann sum over the step support plus the exponential tail
    double direct = 0.0;
    const int N = 400000;
    const double b = inst.phi.support_end();
    for (int i = 0; i < N; ++i) {
      const double x = inst.phi.edges.front() + (b - inst.phi.edges.front()) * (i + 0.5) / N;
      double phi_x = 0.0;
      for (std::size_t k = 0; k < inst.phi.vals.size(); ++k)
        if (x >= inst.phi.edges[k] && x < inst.phi.edges[k + 1]) phi_x = inst.phi.vals[k];
      const double g = (x <= y) ? 1.0 + inst.H * std::pow(1.0 + std::abs(x), -inst.gamma)
                                : inst.H * std::exp((y - x) / inst.q);
      direct += g * phi_x * (b - inst.phi.edges.front()) / N;
    }
    CHECK(garsia_inner_integral(inst, y) == doctest::Approx(direct).epsilon(1e-4));
  }
}

TEST_CASE("level sets of the functional") {
  SUBCASE("phi = 0 has unit slope and inf at y1") {
    GarsiaInstance inst;
    inst.y1 = 0.0;
    inst.phi.edges = {0.0, 1.0};
    inst.phi.vals = {0.0};
    auto rep = garsia_level_sets(inst, linear_grid(-10.0, 50.0, 61));
    CHECK(rep.inf_F == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(rep.slope == doctest::Approx(1.0).epsilon(0.01));
    // |E_lambda| = lambda - y1 exactly for lambda in range
    for (std::size_t i = 0; i < rep.lambda_grid.size(); ++i) {
      const double lam = rep.lambda_grid[i];
      if (lam > 1.0 && lam < 40.0)
        CHECK(rep.level_measures[i] == doctest::Approx(lam).epsilon(0.01));
    }
  }
  SUBCASE("random family: uniform lower bound and linear growth") {
    auto rep = garsia_family_sweep(0.0, 1.0, 2.0, 2.0, 2.0, 120, 99, true);
    CHECK(rep.min_inf_F > -10.0);
    CHECK(rep.max_claim2_slope < 1.2);
    CHECK(std::isfinite(rep.max_integral));
  }
}

TEST_CASE("uniformity of the exponential integral over families") {
  SUBCASE("concentrating blocks stay bounded as the support grows") {
    // phi = L^{-1/beta'} on [y1, y1+L]: the mass-one worst case
    double prev = 0.0;
    for (double L : {2.0, 8.0, 32.0, 128.0}) {
      GarsiaInstance inst;
      inst.phi = indicator_block(0.0, L);
      inst.phi.vals[0] = std::pow(L, -0.5);
      auto r = garsia_exp_integral(inst, L + 60.0);
      CHECK(std::isfinite(r.value));
      CHECK(r.value < 100.0);
      prev = r.value;
    }
    (void)prev;
  }
  SUBCASE("H = 0: the response is monotone in the carried mass and saturates in L") {
    // scaling phi up (toward the unit-norm cap) raises the integral pointwise
    double prev = 0.0;
    for (double scale : {0.4, 0.7, 1.0}) {
      GarsiaInstance inst;
      inst.H = 0.0;
      inst.phi = indicator_block(0.0, 4.0);
      inst.phi.normalize_power(2.0);
      inst.phi.vals[0] *= scale;
      const double v = garsia_exp_integral(inst, 80.0).value;
      CHECK(v > prev);
      prev = v;
    }
    // and the plateau family stays uniformly bounded as the support grows
    std::vector<double> vals;
    for (double L : {16.0, 64.0, 160.0}) {
      GarsiaInstance inst;
      inst.H = 0.0;
      inst.phi = indicator_block(0.0, L);
      inst.phi.normalize_power(2.0);
      vals.push_back(garsia_exp_integral(inst, L + 70.0).value);
    }
    CHECK(vals.back() < vals.front() * 1.05);
  }
}

TEST_CASE("garsia validation and inconclusive paths") {
  GarsiaInstance inst;
  inst.phi = indicator_block(0.0, 1.0);
  inst.phi.vals[0] = 2.0;  // int phi^2 = 4 > 1
  CHECK_THROWS_AS(inst.validate(), input_error);
  GarsiaInstance ok;
  ok.phi = indicator_block(0.0, 1.0);
  CHECK_THROWS_AS(garsia_exp_integral(ok, 3.0), inconclusive_error);  // integrand not decayed
  GarsiaInstance bad_params;
  bad_params.beta = 0.9;
  bad_params.phi = indicator_block(0.0, 1.0);
  CHECK_THROWS_AS(bad_params.validate(), parameter_error);
}
