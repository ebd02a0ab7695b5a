#include <doctest.h>

#include <cmath>
#include <tuple>

#include "hyhardy/explicit_solutions.hpp"
#include "hyhardy/kernels.hpp"
#include "hyhardy/params.hpp"
#include "hyhardy/radial.hpp"

using namespace hyhardy;

TEST_CASE("fundamental solutions are G^{alpha_pm}") {
  for (auto [n, gamma] : {std::tuple<int, double>{3, 0.1}, {4, 0.5}, {6, 3.0}}) {
    const auto params = make_params(n, gamma, 0.0, 0.0, 0.0);
    const auto e = exponents(params);
    for (double r : {0.01, 0.3, 0.7, 0.99}) {
      const double G = green_G(n, r);
      CHECK(fundamental_solution(params, SolutionSign::Plus, r) ==
            doctest::Approx(std::pow(G, e.alpha_plus)).epsilon(1e-13));
      CHECK(fundamental_solution(params, SolutionSign::Minus, r) ==
            doctest::Approx(std::pow(G, e.alpha_minus)).epsilon(1e-13));
    }
  }
}

TEST_CASE("profile_w: log-evaluated form matches the naive formula") {
  const auto params = make_params(5, 1.0, 0.5, 0.0, 0.0);
  const auto e = exponents(params);
  const double c = 1.7;
  for (double tau : {1e-2, 0.5, 1.0, 3.0, 1e2}) {
    const double naive =
        c * std::pow(std::pow(tau, (2.0 - params.s) * e.beta_minus / (params.n - 2.0)) +
                         std::pow(tau, (2.0 - params.s) * e.beta_plus / (params.n - 2.0)),
                     -(params.n - 2.0) / (2.0 - params.s));
    CHECK(profile_w(params, c, tau) == doctest::Approx(naive).epsilon(1e-13));
  }
  // extreme arguments neither overflow nor produce garbage (the profile
  // decays like tau^{-beta_+} ~ 1e-262 at tau = 1e100, still normal)
  const double far = profile_w(params, 1.0, 1e100);
  const double near0 = profile_w(params, 1.0, 1e-100);
  CHECK(std::isfinite(far));
  CHECK(far > 0.0);
  CHECK(std::isfinite(near0));
  CHECK(near0 > 0.0);
  // decay exponents: w ~ tau^{-beta_+} at infinity, tau^{-beta_-} at zero.
  // The subleading branch is down by tau^{-+(2-s)Delta/(n-2)}, ~1e-11 at 1e10.
  const double slope_far =
      std::log(profile_w(params, 1.0, 1e12) / profile_w(params, 1.0, 1e10)) / std::log(1e2);
  CHECK(slope_far == doctest::Approx(-e.beta_plus).epsilon(1e-9));
  const double slope_near =
      std::log(profile_w(params, 1.0, 1e-10) / profile_w(params, 1.0, 1e-12)) / std::log(1e2);
  CHECK(slope_near == doctest::Approx(-e.beta_minus).epsilon(1e-9));
}

TEST_CASE("profile derivatives agree with high-order finite differences") {
  const auto params = make_params(4, 0.7, 0.3, 0.0, 0.0);
  for (double tau : {0.2, 1.0, 4.0}) {
    const double h = tau * 1e-5;
    auto w = [&](double t) { return profile_w(params, 1.0, t); };
    const double fd1 = (w(tau + h) - w(tau - h)) / (2.0 * h);
    const double fd2 = (w(tau + h) - 2.0 * w(tau) + w(tau - h)) / (h * h);
    CHECK(profile_w_derivative(params, 1.0, tau) == doctest::Approx(fd1).epsilon(1e-8));
    CHECK(profile_w_second_derivative(params, 1.0, tau) ==
          doctest::Approx(fd2).epsilon(1e-5));
  }
}

TEST_CASE("extremal on the ball is the profile composed with G^{-1/(n-2)}") {
  const auto params = make_params(3, 0.1, 0.5, 0.0, 0.0);
  for (double r : {0.05, 0.4, 0.9}) {
    const double tau = std::pow(green_G(3, r), -1.0 / (3 - 2.0));
    CHECK(extremal_hyperbolic(params, 2.0, r) ==
          doctest::Approx(profile_w(params, 2.0, tau)).epsilon(1e-13));
  }
}

TEST_CASE("bubble family: exact concentration scaling") {
  const auto params = make_params(5, 1.0, 0.0, 0.0, 0.0);
  for (double eps : {0.1, 0.01}) {
    for (double rho : {0.05, 0.2, 0.8}) {
      const double direct = bubble_U_eps(params, eps, rho);
      const double scaled =
          std::pow(eps, -(params.n - 2.0) / 2.0) * bubble_U_eps(params, 1.0, rho / eps);
      CHECK(direct == doctest::Approx(scaled).epsilon(1e-13));
    }
  }
}

TEST_CASE("sigma-equation: linear residual of G^{alpha_pm} vanishes") {
  for (auto [n, gamma] : {std::tuple<int, double>{3, 0.1}, {5, 2.0}, {7, -1.0}}) {
    const auto params = make_params(n, gamma, 0.0, 0.0, 0.0);
    const auto e = exponents(params);
    for (double alpha : {e.alpha_plus, e.alpha_minus}) {
      auto v = [alpha](double sig) { return std::pow(sig, alpha); };
      for (double sig : {1e-3, 1.0, 1e3}) {
        const double scale =
            (n - 2.0) * (n - 2.0) * std::abs(v(sig)) / (sig * sig) +
            std::abs(gamma) * std::abs(v(sig)) / (sig * sig);
        const double res = residual_sigma_ode(v, params, sig, false);
        INFO("n=", n, " gamma=", gamma, " alpha=", alpha, " sigma=", sig);
        CHECK(std::abs(res) / scale < 1e-8);
      }
    }
  }
}

TEST_CASE("sigma-equation: nonlinear residual of the chi-normalized extremal") {
  for (auto [n, gamma, s] : {std::tuple<int, double, double>{3, 0.1, 0.5}, {5, 2.0, 0.0}}) {
    const auto params = make_params(n, gamma, s, 0.0, 0.0);
    const double p = exponents(params).two_star_s;
    const double chi = multiplier_chi(params);
    const double amp =
        std::pow(chi * std::pow(n - 2.0, -(2.0 - s) / (n - 2.0)), 1.0 / (p - 2.0));
    auto v = [&](double sig) {
      const double tau = std::pow((n - 2.0) * sig, -1.0 / (n - 2.0));
      return amp * profile_w(params, 1.0, tau);
    };
    for (double sig : {0.3, 1.0, 3.0}) {
      const double nl = std::pow(sig, -(p + 2.0) / 2.0) * std::pow(v(sig), p - 1.0);
      const double res = residual_sigma_ode(v, params, sig, true);
      INFO("n=", n, " gamma=", gamma, " s=", s, " sigma=", sig);
      CHECK(std::abs(res) / nl < 1e-6);
    }
  }
}

TEST_CASE("multiplier chi: unperturbed value n(n-2), domain restriction") {
  for (int n = 3; n <= 8; ++n) {
    const double chi = multiplier_chi(make_params(n, 0.0, 0.0, 0.0, 0.0));
    CHECK(chi == doctest::Approx(n * (n - 2.0)).epsilon(1e-10));
  }
  CHECK(multiplier_chi(make_params(4, 0.5, 0.3, 0.0, 0.0)) > 0.0);
  CHECK_THROWS_AS(multiplier_chi(make_params(4, -0.5, 0.0, 0.0, 0.0)),
                  validation_error);
}

TEST_CASE("make_extremal_profile carries the c=1 multiplier") {
  const auto params = make_params(5, 1.0, 0.0, 0.0, 0.0);
  const auto prof = make_extremal_profile(params, 2.5);
  CHECK(prof.c == 2.5);
  CHECK(prof.chi == doctest::Approx(multiplier_chi(params)).epsilon(1e-14));
}

namespace {

RadialFunction smooth_support_bump(double r_max_grid, double support, std::size_t count) {
  const auto grid = RadialGrid::hyperbolic(1e-6, r_max_grid, count);
  auto shape = [support](double r) {
    if (r >= support) return 0.0;
    const double t = r / support;
    return t * t * (1.0 - t) * (1.0 - t) * (1.0 - t);
  };
  auto dshape = [support](double r) {
    if (r >= support) return 0.0;
    const double t = r / support;
    return (2.0 * t * (1.0 - t) * (1.0 - t) * (1.0 - t) -
            3.0 * t * t * (1.0 - t) * (1.0 - t)) /
           support;
  };
  return sample_radial(grid, shape, dshape);
}

} // namespace

TEST_CASE("hyperbolic rescale: lambda = 1 is the identity") {
  const auto u = smooth_support_bump(0.97, 0.8, 801);
  const auto same = hyperbolic_rescale(u, 3, 1.0);
  for (std::size_t i = 0; i < u.values.size(); i += 37) {
    CHECK(same.values[i] == doctest::Approx(u.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("hyperbolic rescale: pointwise definition via G and G^{-1}") {
  const int n = 3;
  const double lam = 2.0;
  const auto u = smooth_support_bump(0.97, 0.8, 1601);
  const auto ul = hyperbolic_rescale(u, n, lam);
  // u_lambda(r) = lambda^{-1/2} u(G^{-1}(lambda G(r)))
  for (double r : {0.3, 0.5, 0.7}) {
    const double rl = green_G_inverse(n, lam * green_G(n, r));
    const double expected = u.value_at(rl) / std::sqrt(lam);
    CHECK(ul.value_at(r) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("hyperbolic rescale: energy and V_p mass invariance at lambda = 2") {
  const int n = 4;
  const auto u = smooth_support_bump(0.97, 0.8, 2401);
  const auto ul = hyperbolic_rescale(u, n, 2.0);
  for (double p : {2.0, 2.0 * n / (n - 2.0)}) {
    const double before = integrate_hyperbolic(u, n, WeightKind::sobolev_vp(p));
    const double after = integrate_hyperbolic(ul, n, WeightKind::sobolev_vp(p));
    CHECK(after == doctest::Approx(before).epsilon(1e-6));
  }
  const double g_before = integrate_hyperbolic(u, n, WeightKind::gradient());
  const double g_after = integrate_hyperbolic(ul, n, WeightKind::gradient());
  CHECK(g_after == doctest::Approx(g_before).epsilon(1e-6));
}
