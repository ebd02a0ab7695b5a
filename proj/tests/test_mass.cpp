#include <doctest.h>

#include <cmath>
#include <tuple>

#include "hyhardy/conformal.hpp"
#include "hyhardy/mass.hpp"
#include "hyhardy/params.hpp"

using namespace hyhardy;

namespace {

// h == 0, b == 1 on a ball of radius R: the singular combination with a
// Dirichlet zero at R is exactly r^{-beta_+} - R^{-Delta} r^{-beta_-}, so
// the mass is -R^{-Delta} in closed form.
EuclideanProblem unperturbed_problem(const ProblemParams& params, double R) {
  EuclideanProblem problem;
  problem.params = params;
  problem.R = R;
  problem.h = [](double) { return 0.0; };
  problem.b = [](double) { return 1.0; };
  return problem;
}

} // namespace

TEST_CASE("shooting config validation") {
  ShootingConfig config;
  config.R = 1.0;
  config.r0 = 0.5; // must stay below R/100
  CHECK_THROWS_AS(config.validate(), validation_error);
  config.r0 = 1e-6;
  CHECK_NOTHROW(config.validate());
  config.tolerance = 1.0;
  CHECK_THROWS_AS(config.validate(), validation_error);
  config.tolerance = 1e-12;
  config.correction_order = 2;
  CHECK_THROWS_AS(config.validate(), validation_error);
}

TEST_CASE("Frobenius initialization: pure powers when h vanishes") {
  const auto params = make_params(4, 0.84, 0.0, 0.0, 0.0);
  const auto problem = unperturbed_problem(params, 1.0);
  const auto e = exponents(params);
  const double r0 = 1e-5;
  for (auto [sign, beta] : {std::pair{SolutionSign::Plus, e.beta_plus},
                            std::pair{SolutionSign::Minus, e.beta_minus}}) {
    const auto [k, dk] = frobenius_init(params, problem, sign, r0, 1);
    CHECK(k == doctest::Approx(std::pow(r0, -beta)).epsilon(1e-13));
    CHECK(dk == doctest::Approx(-beta * std::pow(r0, -beta - 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("basis solve tracks the exact power solutions of the h=0 equation") {
  const auto params = make_params(3, 0.09, 0.0, 0.0, 0.0); // Delta = 0.8
  const auto problem = unperturbed_problem(params, 1.0);
  ShootingConfig config;
  config.R = 1.0;
  const auto [kp, km] = solve_basis(params, problem, config);
  const auto e = exponents(params);
  for (double r : {0.01, 0.1, 0.5, 1.0}) {
    CHECK(kp.value_at(r) == doctest::Approx(std::pow(r, -e.beta_plus)).epsilon(3e-9));
    CHECK(km.value_at(r) == doctest::Approx(std::pow(r, -e.beta_minus)).epsilon(3e-9));
  }
}

TEST_CASE("unperturbed mass equals -R^{-Delta} in closed form") {
  for (auto [n, gamma, R] : {std::tuple<int, double, double>{3, 0.09, 0.5},
                             {3, 0.21, 2.0},
                             {4, 0.84, 1.0},
                             {5, 2.0, 2.0}}) {
    const auto params = make_params(n, gamma, 0.0, 0.0, 0.0);
    const auto problem = unperturbed_problem(params, R);
    ShootingConfig config;
    config.R = R;
    const auto rep = euclidean_mass(params, problem, config);
    const auto e = exponents(params);
    const double exact = -std::pow(R, -(e.beta_plus - e.beta_minus));
    INFO("n=", n, " gamma=", gamma, " R=", R);
    CHECK(rep.c1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rep.mass == doctest::Approx(exact).epsilon(1e-6));
    CHECK(rep.mass < 0.0);
    // self-certification: halving r0 barely moves the mass
    CHECK(rep.r0_halved_delta < 1e-4 * std::max(1.0, std::abs(rep.mass)));
  }
}

TEST_CASE("mass regime boundary: n=4, gamma=0 is refused (branch gap = 2)") {
  const auto params = make_params(4, 0.0, 0.0, 0.0, 0.0);
  const auto problem = unperturbed_problem(params, 1.0);
  ShootingConfig config;
  config.R = 1.0;
  CHECK_THROWS_AS(euclidean_mass(params, problem, config), refusal_error);
}

TEST_CASE("hyperbolic mass: frozen regression and normalization factor") {
  const auto params = make_params(3, 0.1875, 0.0, 2.0, 0.0);
  const auto rep = hyperbolic_mass(params, 0.5);
  CHECK(rep.mass == doctest::Approx(0.07087050656382779).epsilon(1e-8));
  // n=3: (n-2)^{-Delta/(n-2)} = 1, so both normalizations coincide
  CHECK(hyperbolic_mass_factor(params) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rep.mass_hyperbolic == doctest::Approx(rep.mass).epsilon(1e-14));
  CHECK(rep.r0_halved_delta < 1e-4);

  const auto p5 = make_params(5, 2.0, 0.0, 4.0, 0.0);
  const auto e5 = exponents(p5);
  const double factor5 = std::pow(3.0, -(e5.beta_plus - e5.beta_minus) / 3.0);
  CHECK(hyperbolic_mass_factor(p5) == doctest::Approx(factor5).epsilon(1e-14));
  const auto rep5 = hyperbolic_mass(p5, 0.5);
  CHECK(rep5.mass == doctest::Approx(4.0818331).epsilon(1e-6));
  CHECK(rep5.mass_hyperbolic == doctest::Approx(rep5.mass * factor5).epsilon(1e-13));
}

TEST_CASE("hyperbolic mass is strictly increasing in lambda and in radius") {
  double prev = -1e9;
  for (double lam : {1.0, 2.0, 3.0, 4.0}) {
    const auto rep = hyperbolic_mass(make_params(3, 0.1875, 0.0, lam, 0.0), 0.5);
    CHECK(rep.mass > prev);
    prev = rep.mass;
  }
  prev = -1e9;
  for (double B : {0.3, 0.4, 0.5, 0.6}) {
    const auto rep = hyperbolic_mass(make_params(3, 0.1875, 0.0, 2.0, 0.0), B);
    CHECK(rep.mass > prev);
    prev = rep.mass;
  }
}

TEST_CASE("small ball with weak coupling keeps a negative mass") {
  const auto rep = hyperbolic_mass(make_params(3, 0.2, 0.0, 0.0, 0.0), 0.1);
  CHECK(rep.mass < 0.0);
  CHECK(rep.mass_hyperbolic < 0.0);
}

TEST_CASE("log-type potential (n=4): mass solve accepts and self-certifies") {
  const auto params = make_params(4, 0.84, 0.0, 2.0, 0.0);
  const auto rep = hyperbolic_mass(params, 0.5);
  CHECK(std::isfinite(rep.mass));
  CHECK(rep.c1 == doctest::Approx(1.0).epsilon(1e-15));
  // log-type acceptance gate is 1e-3 (the correction varies slowly)
  CHECK(rep.r0_halved_delta < 1e-3 * std::max(1.0, std::abs(rep.mass)));
}

TEST_CASE("refusals: non-coercive coupling and out-of-regime dimensions") {
  // strong coupling flips the subcritical branch's sign: Sturm criterion
  CHECK_THROWS_AS(hyperbolic_mass(make_params(3, 0.1875, 0.0, 9.0, 0.0), 0.5),
                  refusal_error);
  // n=5 needs gamma > n(n-4)/4 = 1.25 for the hyperbolic route
  CHECK_THROWS_AS(hyperbolic_mass(make_params(5, 1.0, 0.0, 2.0, 0.0), 0.5),
                  refusal_error);
}

TEST_CASE("lambda*: frozen regression, sign certificate, bad brackets") {
  const auto params = make_params(3, 0.1875, 0.0, 0.0, 0.0);
  const double star = lambda_star(params, 0.5, {0.5, 3.5});
  CHECK(star == doctest::Approx(1.8688206672668457).epsilon(1e-5));
  CHECK(star > 0.0);

  const double below =
      hyperbolic_mass(make_params(3, 0.1875, 0.0, star - 1e-3, 0.0), 0.5).mass;
  const double above =
      hyperbolic_mass(make_params(3, 0.1875, 0.0, star + 1e-3, 0.0), 0.5).mass;
  CHECK(below < 0.0);
  CHECK(above > 0.0);

  // both endpoints on the same side of the sign change
  CHECK_THROWS_AS(lambda_star(params, 0.5, {4.0, 5.0}), refusal_error);
  CHECK_THROWS_AS(lambda_star(params, 0.5, {3.5, 0.5}), validation_error);
}
