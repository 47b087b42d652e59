#include <doctest.h>

#include <cmath>

#include "mtlab/sharp.hpp"
#include "oracles.hpp"

using namespace mtlab;

TEST_CASE("riesz coefficient closed forms") {
  CHECK(riesz_coefficient(3, 2.0) == doctest::Approx(1.0 / (4.0 * pi)).epsilon(1e-14));
  CHECK(riesz_coefficient(2, 1.0) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-14));
  CHECK_THROWS_AS(riesz_coefficient(4, 0.0), domain_error);
  CHECK_THROWS_AS(riesz_coefficient(4, 4.0), domain_error);
}

TEST_CASE("coefficient product identity c_d c_{n-d} = (2pi)^{-n}") {
  SplitMix64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 10);
    const double d = n * (0.05 + 0.9 * rng.next_uniform());
    const double prod = riesz_coefficient(n, d) * riesz_coefficient(n, n - d);
    CHECK(prod * std::pow(2.0 * pi, n) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("radial exponential integral recovers Gaussians at p = 2") {
  for (int m = 1; m <= 6; ++m)
    CHECK(radial_exp_integral(m, 2.0) == doctest::Approx(std::pow(pi, 0.5 * m)).epsilon(1e-13));
}

TEST_CASE("trace constants: closed forms and linearity in lambda") {
  CHECK(adams_trace_constant(2, 1, 2.0).constant == doctest::Approx(4.0 * pi).epsilon(1e-13));
  CHECK(adams_trace_constant(4, 2, 4.0).constant == doctest::Approx(32.0 * pi * pi).epsilon(1e-13));
  const double full = adams_trace_constant(4, 2, 4.0).constant;
  const double half = adams_trace_constant(4, 2, 2.0).constant;
  CHECK(half == doctest::Approx(0.5 * full).epsilon(1e-13));
  CHECK_THROWS_AS(adams_trace_constant(4, 5, 4.0), domain_error);
  CHECK_THROWS_AS(adams_trace_constant(4, 2, 5.0), domain_error);
}

TEST_CASE("profile constant: constant profile reduces to the coefficient power") {
  const int n = 2;
  const double d = 1.0;
  const double pprime = 2.0;
  const double c = riesz_coefficient(n, d);
  auto rep = potential_constant_from_profile(
      [c](const double*, const double*) { return c; }, n, d, SearchBox::single_point(n));
  const double expected_A = sphere_area(n) / n * std::pow(c, pprime);
  CHECK(rep.A_value == doctest::Approx(expected_A).epsilon(1e-10));
  // matches the odd-d trace constant route at lambda = n (gradient pair at n=2, d=1)
  CHECK(1.0 / (sphere_area(n) / n * std::pow(riesz_gradient_coefficient(n, d), pprime)) ==
        doctest::Approx(adams_trace_constant(2, 1, 2.0).constant).epsilon(1e-12));
}

TEST_CASE("profile constant: 1 + cos/2 on the circle") {
  auto rep = potential_constant_from_profile(
      [](const double*, const double* w) { return 1.0 + 0.5 * w[0]; }, 2, 1.0,
      SearchBox::single_point(2));
  // (1/2) int_0^{2pi} (1 + cos/2)^2 = (1/2)(2pi + pi/4) = 1.125 pi
  CHECK(rep.A_value == doctest::Approx(1.125 * pi).epsilon(1e-10));
}

TEST_CASE("profile constant: scaling covariance") {
  auto g1 = [](const double*, const double* w) { return 1.0 + 0.25 * w[0] * w[0]; };
  auto g3 = [](const double*, const double* w) { return 3.0 * (1.0 + 0.25 * w[0] * w[0]); };
  const double pprime = 3.0;  // n = 3, d = 1
  auto r1 = potential_constant_from_profile(g1, 3, 2.0, SearchBox::single_point(3));
  auto r3 = potential_constant_from_profile(g3, 3, 2.0, SearchBox::single_point(3));
  CHECK(r3.A_value == doctest::Approx(std::pow(3.0, pprime) * r1.A_value).epsilon(1e-9));
  CHECK(r3.constant == doctest::Approx(std::pow(3.0, -pprime) * r1.constant).epsilon(1e-9));
}

TEST_CASE("second-order constants") {
  auto id4 = [](const double*) { return SmallMatrix::identity(4); };
  auto rep = second_order_constant(id4, 4, SearchBox::single_point(4));
  CHECK(rep.constant == doctest::Approx(32.0 * pi * pi).epsilon(1e-12));
  auto two4 = [](const double*) {
    auto m = SmallMatrix::identity(4);
    for (auto& v : m.a) v *= 2.0;
    return m;
  };
  CHECK(second_order_constant(two4, 4, SearchBox::single_point(4)).constant ==
        doctest::Approx(128.0 * pi * pi).epsilon(1e-12));
  // x-dependent field with the infimum at the origin
  auto field = [](const double* x) {
    auto m = SmallMatrix::identity(4);
    m.at(0, 0) = 1.0 + x[0] * x[0];
    return m;
  };
  auto r2 = second_order_constant(field, 4, SearchBox::cube(4, 0.8));
  CHECK(r2.constant == doctest::Approx(32.0 * pi * pi).epsilon(1e-6));
  auto bad = [](const double*) {
    auto m = SmallMatrix::identity(3);
    m.at(0, 0) = -1.0;
    return m;
  };
  CHECK_THROWS_AS(second_order_constant(bad, 3, SearchBox::single_point(3)), input_error);
  CHECK_THROWS_AS(second_order_constant(id4, 2, SearchBox::single_point(2)), domain_error);
}

TEST_CASE("second-order constant agrees with the even trace constant at identity") {
  for (int n : {3, 4, 5, 6}) {
    auto id = [n](const double*) { return SmallMatrix::identity(n); };
    const double a = second_order_constant(id, n, SearchBox::single_point(n)).constant;
    const double b = adams_trace_constant(n, 2, n).constant;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("first-order constants") {
  auto id2 = [](const double*) { return SmallMatrix::identity(2); };
  CHECK(first_order_vector_constant(id2, 2, SearchBox::single_point(2)).constant ==
        doctest::Approx(4.0 * pi).epsilon(1e-12));
  for (int n : {2, 3, 5}) {
    auto idn = [n](const double*) { return SmallMatrix::identity(n); };
    CHECK(first_order_vector_constant(idn, n, SearchBox::single_point(n)).constant ==
          doctest::Approx(n * std::pow(sphere_area(n), 1.0 / (n - 1))).epsilon(1e-12));
  }
  auto diag21 = [](const double*) { return SmallMatrix::diag({2.0, 1.0}); };
  CHECK(first_order_vector_constant(diag21, 2, SearchBox::single_point(2)).constant ==
        doctest::Approx(8.0 * pi).epsilon(1e-12));
  auto sing = [](const double*) { return SmallMatrix::diag({1.0, 0.0}); };
  CHECK_THROWS_AS(first_order_vector_constant(sing, 2, SearchBox::single_point(2)), input_error);
}

TEST_CASE("volume identity: int |A^{-1/2} w|^{-n} dw = omega_{n-1} sqrt(det A)") {
  SplitMix64 rng(67);
  for (int n : {3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      // random SPD with moderate conditioning
      SmallMatrix A = SmallMatrix::identity(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
          const double v = 0.25 * rng.next_normal();
          A.at(i, j) += v;
          if (i != j) A.at(j, i) += v;
        }
      for (int i = 0; i < n; ++i) A.at(i, i) += 1.0;
      REQUIRE(A.is_spd());
      const SmallMatrix Ainv = A.inverse();
      auto q = sphere_integrate(
          n, [&](const double* w) { return std::pow(Ainv.quadratic_form(w), -0.5 * n); }, 1e-9);
      CHECK(q.value == doctest::Approx(sphere_area(n) * std::sqrt(A.det())).epsilon(1e-6));
    }
  }
}

TEST_CASE("scalar d = n/2 symbol constants") {
  const double scale = std::pow(2.0 * pi, 2);
  SymbolEval laplacian = [scale](const double*, const double* xi) {
    return std::complex<double>(scale * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] + xi[3] * xi[3]), 0.0);
  };
  auto rep = elliptic_p2_constant(laplacian, 4, SearchBox::single_point(4), 400000);
  CHECK(rep.alt_value == doctest::Approx(32.0 * pi * pi).epsilon(1e-8));  // sphere route is exact here
  CHECK(rep.constant == doctest::Approx(32.0 * pi * pi).epsilon(5e-3));
  CHECK(std::abs(rep.constant - rep.alt_value) <= 6.0 * (rep.error_estimate + rep.alt_error) + 1e-9);

  // quadratic form with det 4: constant doubles
  SymbolEval aniso = [scale](const double*, const double* xi) {
    return std::complex<double>(
        scale * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] + 4.0 * xi[3] * xi[3]), 0.0);
  };
  auto rep2 = elliptic_p2_constant(aniso, 4, SearchBox::single_point(4), 400000);
  CHECK(rep2.alt_value == doctest::Approx(64.0 * pi * pi).epsilon(1e-7));
  CHECK(rep2.constant == doctest::Approx(64.0 * pi * pi).epsilon(5e-3));

  // scaling homogeneity: multiplying the symbol by c scales A by c^{-2}
  SymbolEval half = [scale](const double*, const double* xi) {
    return std::complex<double>(0.5 * scale *
                                    (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] + xi[3] * xi[3]),
                                0.0);
  };
  auto rep3 = elliptic_p2_constant(half, 4, SearchBox::single_point(4), 200000);
  CHECK(rep3.alt_value == doctest::Approx(0.25 * 32.0 * pi * pi).epsilon(1e-8));

  SymbolEval degenerate = [scale](const double*, const double* xi) {
    return std::complex<double>(scale * xi[0] * xi[0], 0.0);
  };
  CHECK_THROWS_AS(elliptic_p2_constant(degenerate, 4, SearchBox::single_point(4), 1000),
                  ellipticity_error);
}

TEST_CASE("fourth-order vector systems: dual routes and ordering") {
  double b[4] = {0.0, 0.0, 0.0, 0.0};
  for (int which : {1, 2, 3}) {
    auto spec = fourth_order_system(which);
    CHECK(check_homogeneity(spec));
    auto rep = vector_p2_constant(spec, SearchBox::single_point(4), 400000, default_seed, 2);
    const double closed = fourth_order_closed_form(which);
    CHECK(rep.alt_value == doctest::Approx(closed).epsilon(1e-8));  // sphere route
    CHECK(rep.constant == doctest::Approx(closed).epsilon(5e-3));   // sampled route
    b[which] = rep.constant;
  }
  CHECK(32.0 * pi * pi > b[3]);
  CHECK(b[3] > b[2]);
  CHECK(b[2] > b[1]);
}

TEST_CASE("weighted potential sums") {
  const int n = 2;
  const double d = 1.0;
  auto unit = [](const double*, const double*) { return 1.0; };
  const Domain omega = Domain::ball({0.0, 0.0}, 1.0);
  const Domain omega_prime = Domain::ball({0.0, 0.0}, 1.0);
  const Domain U = Domain::box({-8, -8, -8, -8}, {8, 8, 8, 8});
  SUBCASE("single unshifted unit weight recovers n/omega_{n-1}") {
    auto ws = weighted_sum_constant({unit}, n, d, {{0.0, 0.0}}, omega_prime, omega, U);
    CHECK(ws.M_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ws.report.constant == doctest::Approx(n / sphere_area(n)).epsilon(1e-12));
    CHECK(ws.sup_on_omega_star);
  }
  SUBCASE("two admissible unit weights double M") {
    auto ws = weighted_sum_constant({unit, unit}, n, d, {{0.0, 0.0}, {0.3, 0.0}}, omega_prime,
                                    Domain::ball({0.0, 0.0}, 2.0), U);
    CHECK(ws.M_value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ws.report.constant == doctest::Approx(0.5 * n / sphere_area(n)).epsilon(1e-12));
  }
  SUBCASE("boundary maximizer clears the sharpness flag") {
    auto absx = [](const double* x, const double*) { return std::hypot(x[0], x[1]); };
    auto ws = weighted_sum_constant({absx}, n, d, {{0.6, 0.0}}, omega_prime,
                                    Domain::ball({0.6, 0.0}, 0.5), U);
    CHECK(ws.M_value == doctest::Approx(1.0).epsilon(1e-6));  // sup |x| on the closed unit disc
    CHECK_FALSE(ws.sup_on_omega_star);
    CHECK_FALSE(ws.report.sharpness_attained);
  }
  SUBCASE("identical shifts are rejected and zero M degenerates") {
    CHECK_THROWS_AS(
        weighted_sum_constant({unit, unit}, n, d, {{0.1, 0.0}, {0.1, 0.0}}, omega_prime, omega, U),
        parameter_error);
    auto zero = [](const double*, const double*) { return 0.0; };
    CHECK_THROWS_AS(weighted_sum_constant({zero}, n, d, {{0.0, 0.0}}, omega_prime, omega, U),
                    degenerate_error);
  }
  SUBCASE("adding a nonnegative summand never decreases M") {
    auto ws1 = weighted_sum_constant({unit}, n, d, {{0.0, 0.0}}, omega_prime, omega, U);
    auto bump = [](const double* x, const double*) { return 0.5 * std::exp(-x[0] * x[0]); };
    auto ws2 = weighted_sum_constant({unit, bump}, n, d, {{0.0, 0.0}, {0.2, 0.0}}, omega_prime,
                                     Domain::ball({0.0, 0.0}, 2.0), U);
    CHECK(ws2.M_value >= ws1.M_value - 1e-12);
  }
}

TEST_CASE("spherical transform identity") {
  SUBCASE("constants reduce to the coefficient product identity") {
    for (int n : {3, 4}) {
      auto rep = spherical_parseval_check(SphereFunctionSpec::constant(1.0),
                                          SphereFunctionSpec::constant(1.0), n, 0.4 * n);
      CHECK(rep.residual <= 1e-12);
    }
  }
  SUBCASE("quadratic-form pairs, equal and crossed") {
    SmallMatrix A = SmallMatrix::diag({1.0, 1.6, 0.8});
    A.at(0, 1) = A.at(1, 0) = 0.15;
    SmallMatrix B = SmallMatrix::diag({0.9, 1.2, 1.4});
    auto same = spherical_parseval_check(SphereFunctionSpec::inverse_quad_form(A),
                                         SphereFunctionSpec::inverse_quad_form(A), 3, 2.0);
    CHECK(same.residual <= 1e-8);
    auto crossed = spherical_parseval_check(SphereFunctionSpec::inverse_quad_form(A),
                                            SphereFunctionSpec::inverse_quad_form(B), 3, 2.0);
    CHECK(crossed.residual <= 1e-8);
  }
  SUBCASE("bilinearity under scaling") {
    auto r1 = spherical_parseval_check(SphereFunctionSpec::constant(1.0),
                                       SphereFunctionSpec::constant(1.0), 3, 2.0);
    auto r2 = spherical_parseval_check(SphereFunctionSpec::constant(2.0),
                                       SphereFunctionSpec::constant(1.0), 3, 2.0);
    CHECK(r2.lhs == doctest::Approx(2.0 * r1.lhs).epsilon(1e-12));
    CHECK(r2.rhs == doctest::Approx(2.0 * r1.rhs).epsilon(1e-12));
  }
}

TEST_CASE("distribution asymptotics of singular kernels on the disc") {
  const Domain disc = Domain::ball({0.0, 0.0}, 1.0);
  SUBCASE("power kernel recovers the half-circumference coefficient") {
    auto kernel = riesz_kernel(2, 1.0);
    std::vector<std::vector<double>> probes{{0.0, 0.0}, {0.3, 0.1}};
    auto rep = distribution_asymptotics(kernel, disc, geometric_grid(20.0, 2000.0, 6), probes, 256);
    CHECK(rep.A_hat == doctest::Approx(pi).epsilon(0.02));
    CHECK(rep.exponent_hat == doctest::Approx(2.0).epsilon(0.01));
    CHECK(rep.upper_B > 0.0);
  }
  SUBCASE("angular profile 1 + cos/2") {
    auto kernel = profile_kernel(2, 1.0, [](const double*, const double* w) { return 1.0 + 0.5 * w[0]; });
    std::vector<std::vector<double>> probes{{0.0, 0.0}};
    auto rep = distribution_asymptotics(kernel, disc, geometric_grid(20.0, 2000.0, 6), probes, 512);
    CHECK(rep.A_hat == doctest::Approx(1.125 * pi).epsilon(0.02));
  }
  SUBCASE("vanishing leading profile gives empty level sets") {
    auto kernel = profile_kernel(2, 1.0, [](const double*, const double*) { return 0.0; });
    kernel.eval = [](const double*, const double*, double* out) { *out = 0.0; };
    std::vector<std::vector<double>> probes{{0.0, 0.0}};
    CHECK_THROWS_AS(
        distribution_asymptotics(kernel, disc, geometric_grid(20.0, 2000.0, 6), probes, 64),
        inconclusive_error);
  }
  SUBCASE("below the asymptotic regime the fit is flagged") {
    auto kernel = riesz_kernel(2, 1.0);
    std::vector<std::vector<double>> probes{{0.0, 0.0}};
    // levels so low the level sets clip against the boundary
    CHECK_THROWS_AS(
        distribution_asymptotics(kernel, disc, geometric_grid(0.9, 3.0, 6), probes, 128),
        inconclusive_error);
  }
}

TEST_CASE("leading-profile expansion validation") {
  auto good = profile_kernel(1, 0.5, [](const double*, const double*) { return 1.0; });
  good.eval = [](const double* x, const double* y, double* out) {
    const double r = std::abs(x[0] - y[0]);
    *out = std::pow(r, -0.5) * (1.0 + std::pow(r, 0.3));
  };
  good.error_exponent = 0.3;
  auto rep = check_leading_profile(good, 1.0);
  CHECK(rep.consistent);
  // the log-perturbed kernel violates any power-type remainder bound
  auto bad = riesz_log_kernel(1, 0.5);
  bad.error_exponent = 0.3;
  auto rep2 = check_leading_profile(bad, 1.0);
  CHECK_FALSE(rep2.consistent);
}
