#include <doctest.h>

#include <cmath>

#include "mtlab/extremal.hpp"
#include "mtlab/operator.hpp"
#include "oracles.hpp"

using namespace mtlab;

namespace {

IntegralOperator random_operator(SplitMix64& rng, int nr, int nc, bool nonneg = true) {
  auto spaceN = make_atomic_space(oracle::random_weights(rng, nr));
  auto spaceM = make_atomic_space(oracle::random_weights(rng, nc));
  std::vector<double> k(static_cast<std::size_t>(nr) * nc);
  for (double& v : k) v = nonneg ? std::abs(rng.next_normal()) : rng.next_normal();
  return IntegralOperator::make(spaceM, spaceN, k);
}

}  // namespace

TEST_CASE("apply: constant kernel integrates f against mu") {
  auto spaceM = make_atomic_space({0.5, 0.25, 0.25});
  auto spaceN = make_atomic_space({1.0, 2.0});
  std::vector<double> k(6, 1.0);
  auto op = IntegralOperator::make(spaceM, spaceN, k);
  std::vector<double> f(3, 1.0);
  auto tf = op.apply(f);
  CHECK(tf[0] == doctest::Approx(1.0));
  CHECK(tf[1] == doctest::Approx(1.0));
  std::vector<double> zero(3, 0.0);
  auto t0 = op.apply(zero);
  CHECK(t0[0] == 0.0);
  CHECK(t0[1] == 0.0);
}

TEST_CASE("apply matches the double-loop oracle") {
  SplitMix64 rng(17);
  auto op = random_operator(rng, 6, 6, false);
  auto f = oracle::random_values(rng, 6);
  auto tf = op.apply(f);
  for (std::size_t i = 0; i < 6; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 6; ++j) acc += op.kernel[i * 6 + j] * f[j] * op.domain.weights[j];
    CHECK(tf[i] == doctest::Approx(acc).epsilon(1e-13));
  }
}

TEST_CASE("apply: infinite kernel entries require f to vanish there") {
  auto space = make_atomic_space({1.0, 1.0});
  std::vector<double> k{std::numeric_limits<double>::infinity(), 1.0, 1.0, 1.0};
  auto op = IntegralOperator::make(space, space, k);
  CHECK_FALSE(op.certified());
  std::vector<double> f{1.0, 1.0};
  CHECK_THROWS_AS(op.apply(f), singularity_error);
  std::vector<double> f0{0.0, 1.0};
  auto tf = op.apply(f0);
  CHECK(tf[0] == doctest::Approx(1.0));
}

TEST_CASE("positivity and modulus bound") {
  SplitMix64 rng(19);
  auto op = random_operator(rng, 7, 5, true);
  auto f = oracle::random_values(rng, 5);
  std::vector<double> absf(f.begin(), f.end());
  for (double& v : absf) v = std::abs(v);
  auto tf = op.apply(f);
  auto tabsf = op.apply(absf);
  for (std::size_t i = 0; i < tf.size(); ++i) {
    CHECK(std::abs(tf[i]) <= tabsf[i] + 1e-12);
    CHECK(tabsf[i] >= -1e-12);
  }
}

TEST_CASE("exponent set validation") {
  auto e = ExponentSet::make(2.0, 1.5, 2.0, 1.0, 1.0, 1.6);
  CHECK(e.q == doctest::Approx(6.0));
  CHECK(e.beta_prime == doctest::Approx(2.0));
  CHECK_THROWS_AS(ExponentSet::make(1.0, 1.0, 2.0, 1.0, 1.0), parameter_error);
  CHECK_THROWS_AS(ExponentSet::make(2.0, 2.5, 2.0, 1.0, 1.0), parameter_error);
  CHECK_THROWS_AS(ExponentSet::make(2.0, 1.5, 0.5, 1.0, 1.0), parameter_error);
  CHECK_THROWS_AS(ExponentSet::make(2.0, 1.5, 2.0, 1.0, 1.0, 2.0), parameter_error);
  CHECK_NOTHROW(ExponentSet::make(2.0, 1.5, 2.0, 1.0, 1.0, 1.99));
  CHECK_THROWS_AS(ExponentSet::make(2.0, 1.5, 2.0, 1.0, 1.0, 0.9), parameter_error);
  // default p = midpoint of the admissible interval
  auto e2 = ExponentSet::make(2.0, 1.5, 2.0, 1.0, 1.0);
  CHECK(e2.p == doctest::Approx(1.5));
}

TEST_CASE("exact two-parameter bound holds with constant one") {
  SplitMix64 rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    auto op = random_operator(rng, 1 + rng.next_u64() % 6, 1 + rng.next_u64() % 6);
    auto f = oracle::random_values(rng, op.cols());
    auto rep = oneil_exact_check(op, f, default_star_grid(op.codomain.total_mass),
                                 default_star_grid(op.domain.total_mass));
    CHECK(rep.holds);
  }
}

TEST_CASE("exact bound: constant kernel at tau = mass is an equality check") {
  auto space = make_atomic_space({0.5, 0.5, 1.0});
  std::vector<double> k(9, 2.0);
  auto op = IntegralOperator::make(space, space, k);
  std::vector<double> f{1.0, -2.0, 0.5};
  double l1 = 0.0;
  for (int j = 0; j < 3; ++j) l1 += std::abs(f[j]) * space.weights[j];
  auto tf_inf = 2.0 * l1;  // |Tf| = c ||f||_1
  std::vector<double> absf{1.0, 2.0, 0.5};
  auto tf = op.apply(absf);
  for (double v : tf) CHECK(v == doctest::Approx(tf_inf));
  auto rep = oneil_exact_check(op, f, {0.3, 1.0, 2.0}, {space.total_mass});
  CHECK(rep.holds);
}

TEST_CASE("single-atom claims: (Tf)** bounded by k1**, weak-type, and k2**") {
  SplitMix64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const int nr = 2 + rng.next_u64() % 6, nc = 2 + rng.next_u64() % 6;
    auto op = random_operator(rng, nr, nc);
    const auto e = ExponentSet::make(2.0, 1.5, 2.0, 1.0, 1.0, 1.6);
    const std::size_t atom = rng.next_u64() % nc;
    const double alpha = 0.5 + rng.next_uniform();
    std::vector<double> f(nc, 0.0);
    f[atom] = alpha * (0.2 + 0.8 * rng.next_uniform());
    const double z = op.domain.weights[atom];
    const auto tf = op.apply(f);
    const auto tfstar = rearrange(tf, op.codomain);
    const double m_dist = profile_distribution_coefficient(op.k1, e.beta);
    const double b_dist = profile_distribution_coefficient(op.k2, e.beta0);
    const double c21 = (e.q * e.q / (e.beta0 * (e.q - e.p))) * std::pow(m_dist, 1.0 - 1.0 / e.p) *
                       std::pow(b_dist, 1.0 / e.q);
    const double c24 = c21 * e.q / (e.q - 1.0);
    for (double t : linear_grid(0.05, op.codomain.total_mass, 20)) {
      const double lhs = tfstar.double_star(t);
      CHECK(lhs <= alpha * z * op.k1.double_star(z) * (1.0 + 1e-10) + 1e-12);      // contraction to one level
      CHECK(lhs <= alpha * z * op.k2.double_star(t) * (1.0 + 1e-10) + 1e-12);      // codomain twin
      CHECK(lhs <= c24 * alpha * std::pow(z, 1.0 / e.p) * std::pow(t, -1.0 / e.q) *
                       (1.0 + 1e-10) + 1e-12);                                     // weak-type chain
    }
  }
}

TEST_CASE("power-form bound: constant kernel and unit f have a finite witness") {
  auto space = make_atomic_space({1.0, 1.0});
  std::vector<double> k(4, 3.0);
  auto op = IntegralOperator::make(space, space, k);
  auto e = ExponentSet::make(2.0, 1.5, 2.0, profile_distribution_coefficient(op.k1, 2.0),
                             profile_distribution_coefficient(op.k2, 1.5), 1.6);
  auto rep = oneil_power_bound_check(op, {{1.0, 1.0}}, e, default_star_grid(2.0),
                                     default_star_grid(2.0));
  CHECK(rep.c_witness > 0.0);
  CHECK(rep.c_witness <= rep.c_chain);
  CHECK(rep.max_violation <= 1e-10);
}

TEST_CASE("power-form bound on the discretized 1-D fractional kernel") {
  // |x-y|^{-1/2} on [0,1] atomized at 512 midpoint cells, f = indicator
  const int n = 512;
  FiniteMeasureSpace space;
  space.dim = 1;
  for (int i = 0; i < n; ++i) {
    space.ids.push_back("c" + std::to_string(i));
    space.weights.push_back(1.0 / n);
    space.coords.push_back((i + 0.5) / n);
    space.cell_lo.push_back(static_cast<double>(i) / n);
    space.cell_hi.push_back((i + 1.0) / n);
    space.diag_radius.push_back(0.5 / n);
  }
  space.total_mass = 1.0;
  space.validate();
  auto kern = riesz_kernel(1, 0.5);
  auto op = atomize_kernel(kern, space, space);
  CHECK(op.certified());
  auto e = ExponentSet::make(2.0, 2.0, 2.0, profile_distribution_coefficient(op.k1, 2.0),
                             profile_distribution_coefficient(op.k2, 2.0), 1.5);
  std::vector<double> f(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (space.coords[i] > 0.25 && space.coords[i] < 0.75) f[i] = 1.0;
  auto t_grid = default_star_grid(1.0);
  auto rep = oneil_power_bound_check(op, {f}, e, t_grid, t_grid);
  CHECK(rep.max_violation <= 1e-10);
  auto exact = oneil_exact_check(op, f, t_grid, t_grid);
  CHECK(exact.holds);
  auto wt = weak_type_check(op, f, e, geometric_grid(1e-3, 10.0, 20));
  CHECK(wt.holds);
}

TEST_CASE("weak-type estimate with the explicit constant") {
  SplitMix64 rng(43);
  SUBCASE("zero f") {
    auto op = random_operator(rng, 4, 4);
    auto e = ExponentSet::make(2.0, 1.5, 2.0, 1.0, 1.0, 1.6);
    std::vector<double> f(4, 0.0);
    auto rep = weak_type_check(op, f, e, {0.5, 1.0});
    CHECK(rep.lhs_max == 0.0);
    CHECK(rep.holds);
  }
  SUBCASE("500 random instances at beta=2, beta0=1.5, p=1.6 (q = 6)") {
    for (int trial = 0; trial < 500; ++trial) {
      auto op = random_operator(rng, 2 + rng.next_u64() % 7, 2 + rng.next_u64() % 7);
      auto e = ExponentSet::make(2.0, 1.5, 2.0, 1.0, 1.0, 1.6);
      CHECK(e.q == doctest::Approx(6.0));
      auto f = oracle::random_values(rng, op.cols());
      std::vector<double> absf(f.begin(), f.end());
      for (double& v : absf) v = std::abs(v);
      auto tf = op.apply(absf);
      double top = 0.0;
      for (double v : tf) top = std::max(top, v);
      auto rep = weak_type_check(op, f, e, geometric_grid(std::max(1e-8, 1e-3 * top), 1.3 * top, 25));
      CHECK(rep.holds);
    }
  }
}

TEST_CASE("pointwise kernel growth never decreases (Tf)** for nonnegative f") {
  SplitMix64 rng(53);
  auto spaceM = make_atomic_space(oracle::random_weights(rng, 6));
  auto spaceN = make_atomic_space(oracle::random_weights(rng, 6));
  std::vector<double> k(36), k2(36);
  for (std::size_t i = 0; i < 36; ++i) {
    k[i] = std::abs(rng.next_normal());
    k2[i] = k[i] + std::abs(0.3 * rng.next_normal());
  }
  auto op1 = IntegralOperator::make(spaceM, spaceN, k);
  auto op2 = IntegralOperator::make(spaceM, spaceN, k2);
  std::vector<double> f(6);
  for (double& v : f) v = std::abs(rng.next_normal());
  auto s1 = rearrange(op1.apply(f), spaceN);
  auto s2 = rearrange(op2.apply(f), spaceN);
  for (double t : linear_grid(0.05, spaceN.total_mass, 30))
    CHECK(s2.double_star(t) >= s1.double_star(t) - 1e-12);
}

TEST_CASE("(T(f+g))** is subadditive across the grid") {
  SplitMix64 rng(59);
  auto op = random_operator(rng, 6, 6, true);
  auto f = oracle::random_values(rng, 6);
  auto g = oracle::random_values(rng, 6);
  std::vector<double> fg(6);
  for (int i = 0; i < 6; ++i) fg[i] = f[i] + g[i];
  auto sf = rearrange(op.apply(f), op.codomain);
  auto sg = rearrange(op.apply(g), op.codomain);
  auto sfg = rearrange(op.apply(fg), op.codomain);
  for (double t : linear_grid(0.05, op.codomain.total_mass, 25))
    CHECK(sfg.double_star(t) <= sf.double_star(t) + sg.double_star(t) + 1e-10);
}
