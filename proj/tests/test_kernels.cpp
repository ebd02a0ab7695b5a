#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hyhardy/kernels.hpp"
#include "hyhardy/params.hpp"

using namespace hyhardy;

TEST_CASE("f: closed form and domain") {
  // n=3: f = (1-r^2)/r^2
  CHECK(f_weight(3, 0.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(f_weight(3, 0.25) == doctest::Approx(15.0).epsilon(1e-15));
  // n=4: f = (1-r^2)^2/r^3
  CHECK(f_weight(4, 0.5) == doctest::Approx(0.5625 / 0.125).epsilon(1e-15));
  // the density lives on the open interval
  CHECK_THROWS_AS(f_weight(3, 0.0), std::domain_error);
  CHECK_THROWS_AS(f_weight(3, 1.0), std::domain_error);
  CHECK_THROWS_AS(f_weight(3, -0.2), std::domain_error);
  CHECK_THROWS_AS(f_weight(3, 1.5), std::domain_error);
}

TEST_CASE("G: n=3 closed form (1-r)^2/r") {
  std::mt19937 rng(111);
  std::uniform_real_distribution<double> unif(1e-4, 0.9999);
  for (int k = 0; k < 500; ++k) {
    const double r = unif(rng);
    const double exact = (1.0 - r) * (1.0 - r) / r;
    CHECK(green_G(3, r) == doctest::Approx(exact).epsilon(1e-13));
  }
  CHECK(green_G(3, 1.0) == 0.0);
  CHECK_THROWS_AS(green_G(3, 0.0), std::domain_error);
  CHECK_THROWS_AS(green_G(3, -1.0), std::domain_error);
}

TEST_CASE("G: frozen 50-digit reference values, n = 3..8") {
  // Independent arbitrary-precision quadrature of \int_r^1 (1-t^2)^{n-2} t^{1-n} dt
  // (tools/make_reference_values.py), rounded to double.
  struct Ref { int n; double r; double G; };
  const Ref table[] = {
      {3, 0.1, 8.1},
      {3, 0.3, 1.6333333333333333},
      {3, 0.5, 0.5},
      {3, 0.7, 0.12857142857142857},
      {3, 0.9, 0.011111111111111111},
      {3, 0.95, 0.0026315789473684211},
      {3, 0.99, 0.00010101010101010101},
      {4, 0.1, 45.389829814011909},
      {4, 0.3, 3.1026099469036836},
      {4, 0.5, 0.48870563888010938},
      {4, 0.7, 0.062058275387841365},
      {4, 0.9, 0.0015629193016313482},
      {4, 0.95, 0.0001800317235138916},
      {4, 0.99, 1.3535965375726885e-6},
      {5, 0.1, 308.367},
      {5, 0.3, 6.7880123456790123},
      {5, 0.5, 0.54166666666666667},
      {5, 0.7, 0.033769679300291545},
      {5, 0.9, 0.0002473708276177412},
      {5, 0.95, 1.3856490256111192e-5},
      {5, 0.99, 2.0406424548858994e-8},
      {6, 0.1, 2313.8354855579643},
      {6, 0.3, 16.043787134597591},
      {6, 0.5, 0.64325808335967186},
      {6, 0.7, 0.019624830229645419},
      {6, 0.9, 4.1767167503455894e-5},
      {6, 0.95, 1.1376195497149332e-6},
      {6, 0.99, 3.2815100760308203e-10},
      {7, 0.1, 18417.265002},
      {7, 0.3, 39.798284353909465},
      {7, 0.5, 0.79791666666666667},
      {7, 0.7, 0.011888825965371571},
      {7, 0.9, 7.3464749614726752e-6},
      {7, 0.95, 9.7291840579341402e-8},
      {7, 0.99, 5.4967956841921528e-12},
      {8, 0.1, 152370.54011464012},
      {8, 0.3, 102.0294059754383},
      {8, 0.5, 1.0198688888010938},
      {8, 0.7, 0.0074117776397715838},
      {8, 0.9, 1.3291577979863311e-6},
      {8, 0.95, 8.5584433740627172e-9},
      {8, 0.99, 9.470656334288338e-14},
  };
  for (const auto& ref : table) {
    INFO("n=", ref.n, " r=", ref.r);
    CHECK(green_G(ref.n, ref.r) == doctest::Approx(ref.G).epsilon(2e-14));
  }
}

TEST_CASE("G: agrees with its own adaptive quadrature across the series switch") {
  // the boundary series takes over at r > 0.9; both sides must agree with
  // direct quadrature of f
  for (int n = 3; n <= 8; ++n) {
    for (double r : {0.85, 0.8999, 0.9001, 0.93, 0.97, 0.995}) {
      INFO("n=", n, " r=", r);
      const double closed = green_G(n, r);
      const double quad = green_G_by_quadrature(n, r);
      CHECK(closed == doctest::Approx(quad).epsilon(1e-10));
    }
  }
}

TEST_CASE("G is strictly decreasing and G(1) = 0") {
  for (int n = 3; n <= 6; ++n) {
    double prev = green_G(n, 1e-4);
    for (double r = 0.01; r < 1.0; r += 0.01) {
      const double g = green_G(n, r);
      CHECK(g < prev);
      prev = g;
    }
    CHECK(green_G(n, 1.0) == 0.0);
  }
}

TEST_CASE("G inverse: contract tolerance and roundtrips") {
  // postcondition: |G(r) - sigma| <= 1e-12 max(1, sigma)
  for (int n : {3, 4, 5, 7}) {
    for (double sigma = 1e-6; sigma < 1.1e6; sigma *= 10.0) {
      const double r = green_G_inverse(n, sigma);
      REQUIRE(r > 0.0);
      REQUIRE(r < 1.0);
      CHECK(std::abs(green_G(n, r) - sigma) <= 1e-12 * std::max(1.0, sigma));
    }
  }
  // r-side roundtrip: G then G^{-1} recovers r to 1e-10 relative
  std::mt19937 rng(222);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const int n = 3 + static_cast<int>(unif(rng) * 5.999);
    const double r = 1e-4 + (0.9999 - 1e-4) * unif(rng);
    const double back = green_G_inverse(n, green_G(n, r));
    CHECK(back == doctest::Approx(r).epsilon(1e-10));
  }
  CHECK_THROWS_AS(green_G_inverse(3, 0.0), std::domain_error);
  CHECK_THROWS_AS(green_G_inverse(3, -2.0), std::domain_error);
}

TEST_CASE("V_2 closed form for n=3: (1+r)^4/(4 r^2)") {
  std::mt19937 rng(333);
  std::uniform_real_distribution<double> unif(1e-4, 0.999999);
  for (int k = 0; k < 300; ++k) {
    const double r = unif(rng);
    const double exact = std::pow(1.0 + r, 4) / (4.0 * r * r);
    CHECK(weight_V_p(3, 2.0, r) == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(weight_V_p(3, 2.0, 0.5) == doctest::Approx(5.0625).epsilon(1e-15));
  // boundary limit V_2 -> 4
  CHECK(weight_V_p(3, 2.0, 1.0 - 1e-9) == doctest::Approx(4.0).epsilon(1e-7));
  CHECK_THROWS_AS(weight_V_p(3, 2.0, 1.0), std::domain_error);
}

TEST_CASE("V_p Hoelder interpolation identity") {
  // V_{2*(s)} = V_2^{s/2} V_{2*}^{(2-s)/2} exactly, for every n, s, r
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const int n = 3 + static_cast<int>(unif(rng) * 5.999);
    const double s = 1.999 * unif(rng);
    const double r = 1e-4 + (0.9999 - 1e-4) * unif(rng);
    const auto e = exponents(make_params(n, 0.0, s, 0.0, 0.0));
    const double lhs = weight_V_p(n, e.two_star_s, r);
    const double rhs = std::pow(weight_V_p(n, 2.0, r), 0.5 * s) *
                       std::pow(weight_V_p(n, 2.0 * n / (n - 2.0), r), 0.5 * (2.0 - s));
    INFO("n=", n, " s=", s, " r=", r);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("V_p origin/boundary asymptotics match the evaluated kernel") {
  for (int n : {3, 4, 5, 6}) {
    for (double p : {2.0, 2.0 * n / (n - 2.0), 3.0}) {
      const auto a = asymptotics_V_p(n, p);
      INFO("n=", n, " p=", p);
      {
        const double r = 1e-7;
        const double predicted = a.origin_constant * std::pow(r, -a.origin_exponent);
        CHECK(weight_V_p(n, p, r) == doctest::Approx(predicted).epsilon(1e-5));
      }
      {
        const double r = 1.0 - 1e-7;
        const double predicted =
            a.boundary_constant * std::pow(1.0 - r, -a.boundary_exponent);
        CHECK(weight_V_p(n, p, r) == doctest::Approx(predicted).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("V_p scaling-invariance exponent: origin power is n(1 - p/2*)") {
  // the p for which V_p is integrable at the origin against r^{n-1} dr is
  // exactly p < 2*; at p = 2* the origin exponent equals n
  for (int n : {3, 5, 8}) {
    const double two_star = 2.0 * n / (n - 2.0);
    const auto crit = asymptotics_V_p(n, two_star);
    CHECK(crit.origin_exponent == doctest::Approx(0.0).epsilon(1e-14));
    const auto sub = asymptotics_V_p(n, 2.0);
    CHECK(sub.origin_exponent ==
          doctest::Approx(n * (1.0 - 2.0 / two_star)).epsilon(1e-14));
  }
}
