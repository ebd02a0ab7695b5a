#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hyhardy/kernels.hpp"
#include "hyhardy/params.hpp"
#include "hyhardy/radial.hpp"

using namespace hyhardy;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("grid factories: endpoints, ordering, schemes, validation") {
  const auto geo = RadialGrid::hyperbolic(1e-4, 0.9, 51);
  CHECK(geo.size() == 51);
  CHECK(geo.nodes.front() == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(geo.nodes.back() == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(geo.geometry == GridGeometry::HyperbolicBall);
  for (std::size_t i = 1; i < geo.size(); ++i) {
    CHECK(geo.nodes[i] > geo.nodes[i - 1]);
    if (i >= 2) {
      // geometric: constant ratio
      CHECK(geo.nodes[i] / geo.nodes[i - 1] ==
            doctest::Approx(geo.nodes[1] / geo.nodes[0]).epsilon(1e-12));
    }
  }

  const auto uni = RadialGrid::euclidean(2.0, 0.2, 2.0, 10, GridScheme::Uniform);
  CHECK(uni.domain_radius == 2.0);
  CHECK(uni.nodes[1] - uni.nodes[0] ==
        doctest::Approx(uni.nodes[9] - uni.nodes[8]).epsilon(1e-12));

  CHECK_THROWS_AS(RadialGrid::hyperbolic(0.0, 0.9, 11), validation_error);
  CHECK_THROWS_AS(RadialGrid::hyperbolic(0.5, 0.1, 11), validation_error);
  CHECK_THROWS_AS(RadialGrid::hyperbolic(1e-4, 0.9, 1), validation_error);
  CHECK_THROWS_AS(RadialGrid::euclidean(1.0, 1e-3, 1.5, 11), validation_error);
}

TEST_CASE("cubic Hermite interpolation: exact on cubics with analytic slopes") {
  const auto grid = RadialGrid::euclidean(1.0, 0.1, 0.9, 17, GridScheme::Uniform);
  auto poly = [](double r) { return ((r - 2.0) * r + 1.5) * r - 0.25; };
  auto dpoly = [](double r) { return (3.0 * r - 4.0) * r + 1.5; };
  const auto u = sample_radial(grid, poly, dpoly);
  for (double r : {0.1, 0.137, 0.333, 0.5, 0.77777, 0.9}) {
    CHECK(u.value_at(r) == doctest::Approx(poly(r)).epsilon(1e-14));
    CHECK(u.derivative_at(r) == doctest::Approx(dpoly(r)).epsilon(1e-13));
  }
  // synthesized slopes are O(h^2): still a good interpolant, just not exact
  const auto usyn = sample_radial(grid, poly);
  for (double r : {0.25, 0.6}) {
    CHECK(usyn.value_at(r) == doctest::Approx(poly(r)).epsilon(1e-2));
  }
}

TEST_CASE("RadialFunction validation catches inconsistent data") {
  const auto grid = RadialGrid::euclidean(1.0, 0.1, 1.0, 9, GridScheme::Uniform);
  RadialFunction u;
  u.grid = grid;
  u.values.assign(9, 1.0);
  u.derivatives.assign(9, 0.0);
  CHECK_NOTHROW(u.validate());
  u.dirichlet = true; // last value is 1, not 0
  CHECK_THROWS_AS(u.validate(), validation_error);
  u.values.back() = 0.0;
  CHECK_NOTHROW(u.validate());
  u.values.pop_back(); // size mismatch
  CHECK_THROWS_AS(u.validate(), validation_error);
}

TEST_CASE("Euclidean quadrature: closed-form moments, origin head included") {
  // u = r on a geometric grid; the head fit below the first node must
  // recover the exact power so the full-interval moment comes out closed-form
  const int n = 3;
  const auto grid = RadialGrid::euclidean(1.0, 1e-6, 1.0, 201);
  const auto u = sample_radial(grid, [](double r) { return r; },
                               [](double) { return 1.0; });

  // omega_2 \int_0^1 u^2 r^2 dr = 4 pi / 5
  const double plain = integrate_euclidean(u, n, WeightKind::plain());
  CHECK(plain == doctest::Approx(4.0 * kPi / 5.0).epsilon(1e-9));

  // omega_2 \int_0^1 u'^2 r^2 dr = 4 pi / 3
  const double grad = integrate_euclidean(u, n, WeightKind::gradient());
  CHECK(grad == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-9));

  // omega_2 \int_0^1 (u^2/r^2) r^2 dr = 4 pi / 3
  const double hardy = integrate_euclidean(u, n, WeightKind::euclidean_hardy());
  CHECK(hardy == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-9));

  // s=1, 2*(s)=4: omega_2 \int_0^1 r^4/r * r^2 dr = 4 pi / 6
  const double hs = integrate_euclidean(u, n, WeightKind::euclidean_hs(1.0));
  CHECK(hs == doctest::Approx(4.0 * kPi / 6.0).epsilon(1e-9));

  // perturbation weight: h = r -> omega_2 \int_0^1 r * r^2 * r^2 dr = 4 pi / 6
  const double pert = integrate_euclidean(
      u, n, WeightKind::euclidean_perturbation([](double r) { return r; }));
  CHECK(pert == doctest::Approx(4.0 * kPi / 6.0).epsilon(1e-9));
}

TEST_CASE("quadrature head fit refuses a non-integrable origin") {
  const auto grid = RadialGrid::euclidean(1.0, 1e-3, 1.0, 401);
  const auto u = sample_radial(grid, [](double r) { return 1.0 / r; },
                               [](double r) { return -1.0 / (r * r); });
  // u^2/r^2 * r^{n-1} = r^{-2} for n=3: divergent below the first node
  CHECK_THROWS_AS(
      integrate_euclidean(u, 3, WeightKind::euclidean_hardy()), numerics_error);
  // with the head extension disabled the truncated integral is finite
  IntegrateOptions opt;
  opt.extend_to_origin = false;
  const double truncated = integrate_euclidean(u, 3, WeightKind::euclidean_hardy(), opt);
  // omega_2 \int_{1e-3}^1 r^{-2} dr = 4 pi (1000 - 1)
  CHECK(truncated == doctest::Approx(4.0 * kPi * 999.0).epsilon(1e-6));
}

TEST_CASE("hyperbolic quadrature matches a hand-computed volume integral") {
  // n=3 ball of radius 1/2: vol = omega_2 \int_0^{1/2} r^2 (2/(1-r^2))^3 dr.
  // Substituting u == 1 with the plain weight must reproduce it. The exact
  // value is 4 pi [ (2 r^3 - r)/... ]; evaluate by high-resolution Richardson
  // here instead: Simpson at 1e-5 step is exact to far beyond the tolerance.
  const auto grid = RadialGrid::hyperbolic(1e-6, 0.5, 401);
  const auto one = sample_radial(grid, [](double) { return 1.0; },
                                 [](double) { return 0.0; });
  const double got = integrate_hyperbolic(one, 3, WeightKind::plain());

  double simpson = 0.0;
  const int N = 200000; // even
  auto f = [](double r) {
    const double m = 2.0 / (1.0 - r * r);
    return r * r * m * m * m;
  };
  const double a = 0.0, b = 0.5, h = (b - a) / N;
  for (int i = 0; i <= N; ++i) {
    const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    simpson += w * f(a + i * h);
  }
  simpson *= 4.0 * kPi * h / 3.0;
  CHECK(got == doctest::Approx(simpson).epsilon(5e-8));
}

TEST_CASE("sigma transform: G itself becomes the identity line") {
  const int n = 4;
  const auto grid = RadialGrid::hyperbolic(1e-3, 0.99, 301);
  const auto u = sample_radial(
      grid, [n](double r) { return green_G(n, r); },
      [n](double r) { return -f_weight(n, r); });
  const auto v = sigma_transform(u, n);

  REQUIRE(v.sigma.size() == u.values.size());
  for (std::size_t i = 1; i < v.sigma.size(); ++i) CHECK(v.sigma[i] > v.sigma[i - 1]);
  for (std::size_t i = 0; i < v.sigma.size(); ++i) {
    CHECK(v.values[i] == doctest::Approx(v.sigma[i]).epsilon(1e-12));
    // dv/dsigma = -u'/f = 1
    CHECK(v.derivatives[i] == doctest::Approx(1.0).epsilon(1e-12));
  }

  // line integrals of the identity function: gradient = \int 1 dsigma and
  // hardy = \int (sigma/sigma)^2 dsigma both equal the sigma span
  const double span = v.sigma.back() - v.sigma.front();
  CHECK(sigma_line_gradient(v) == doctest::Approx(span).epsilon(1e-10));
  CHECK(sigma_line_hardy(v) == doctest::Approx(span).epsilon(1e-10));
}

TEST_CASE("sigma identity ratios are function-independent and consistent") {
  const int n = 3;
  const double p = 4.0;
  const auto grid = RadialGrid::hyperbolic(1e-4, 0.9, 801);
  auto bump1 = [](double r) {
    const double t = r / 0.9;
    return t * t * (1.0 - t) * (1.0 - t);
  };
  auto dbump1 = [](double r) {
    const double t = r / 0.9;
    return (2.0 * t * (1.0 - t) * (1.0 - t) - 2.0 * t * t * (1.0 - t)) / 0.9;
  };
  auto bump2 = [](double r) {
    const double t = r / 0.9;
    return std::sin(kPi * t) * t;
  };
  auto dbump2 = [](double r) {
    const double t = r / 0.9;
    return (kPi * std::cos(kPi * t) * t + std::sin(kPi * t)) / 0.9;
  };
  const auto u1 = sample_radial(grid, bump1, dbump1);
  const auto u2 = sample_radial(grid, bump2, dbump2);
  const auto r1 = identity_ratio(u1, n, p);
  const auto r2 = identity_ratio(u2, n, p);

  // internal consistency (vp vs gradient) is enforced to 1e-5 by the
  // library; across unrelated functions the shared constant must agree too
  CHECK(r1.vp_ratio == doctest::Approx(r1.gradient_ratio).epsilon(1e-5));
  CHECK(r2.vp_ratio == doctest::Approx(r2.gradient_ratio).epsilon(1e-5));
  CHECK(r1.vp_ratio == doctest::Approx(r2.vp_ratio).epsilon(1e-4));
  // for n = 3 the shared constant converges to 8 pi under grid refinement
  CHECK(r1.vp_ratio == doctest::Approx(8.0 * kPi).epsilon(1e-4));
}
