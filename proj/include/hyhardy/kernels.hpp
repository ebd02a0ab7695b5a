// kernels.hpp — exact evaluation of the radial kernels on the hyperbolic
// ball: the density f(r) = (1-r^2)^{n-2}/r^{n-1}, its antiderivative
// G(r) = \int_r^1 f, the inverse G^{-1}, and the scaling-invariant weight
// family V_p(r) = f^2 (1-r^2)^2 / (4 (n-2)^2 G^{(p+2)/2}), together with
// their origin/boundary asymptotics.
#pragma once

namespace hyhardy {

// f(r) = (1-r^2)^{n-2} / r^{n-1} on (0,1); throws std::domain_error outside.
double f_weight(int n, double r);

// G(r) = \int_r^1 (1-t^2)^{n-2} t^{1-n} dt on (0,1], G(1)=0, strictly
// decreasing, G -> +inf as r -> 0+. Evaluated by the exact finite binomial
// expansion (a log term appears when n is even); for r > 0.9 a boundary
// series in (1-r) is used to dodge the cancellation in the expansion.
double green_G(int n, double r);

// Unique r in (0,1) with G(r) = sigma, for sigma > 0. Safeguarded Newton
// (derivative -f) with asymptotic seeds; |G(r)-sigma| <= 1e-12 max(1,sigma).
double green_G_inverse(int n, double sigma);

// V_p(r) for 0 < r < 1, p >= 1.
double weight_V_p(int n, double p, double r);

struct KernelAsymptotics {
  // V_p(r) ~ origin_constant   / r^{origin_exponent}      as r -> 0
  // V_p(r) ~ boundary_constant / (1-r)^{boundary_exponent} as r -> 1
  double origin_exponent;   // n (1 - p/2*) with 2* = 2n/(n-2)
  double origin_constant;   // (n-2)^{(p+2)/2 - 2} / 4
  double boundary_exponent; // (n-1)(p-2)/2
  double boundary_constant; // 2^{2n-2} (n-1)^{(p+2)/2} / (4(n-2)^2 2^{(n-2)(p+2)/2})
};

// Exact exponents and constants from the leading behaviors
// G ~ r^{2-n}/(n-2) (origin) and G ~ 2^{n-2}(1-r)^{n-1}/(n-1) (boundary).
KernelAsymptotics asymptotics_V_p(int n, double p);

// Cross-check helper: G by adaptive quadrature of f on [r,1] (used in tests
// and the verify suite; the closed form is the production path).
double green_G_by_quadrature(int n, double r);

} // namespace hyhardy
