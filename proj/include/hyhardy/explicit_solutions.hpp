// explicit_solutions.hpp — closed-form fundamental solutions G^{alpha_pm},
// the extremal profile w and its hyperbolic/Euclidean incarnations, the
// scaled bubble family, the hyperbolic rescaling operator, the nonlinear
// multiplier chi, and pointwise ODE residual checks in the sigma variable.
#pragma once

#include <functional>

#include "hyhardy/params.hpp"
#include "hyhardy/radial.hpp"

namespace hyhardy {

enum class SolutionSign { Plus, Minus };

// G(r)^{alpha_pm}: the two radial solutions of the linear equation on the
// hyperbolic ball.
double fundamental_solution(const ProblemParams& params, SolutionSign sign, double r);

// w(tau) = c (tau^{(2-s)beta_-/(n-2)} + tau^{(2-s)beta_+/(n-2)})^{-(n-2)/(2-s)}.
// Evaluated through logs so extreme tau neither overflows nor loses the
// small exponent.
double profile_w(const ProblemParams& params, double c, double tau);
// Analytic first/second derivatives of the same profile (no finite
// differences anywhere near the multiplier computation).
double profile_w_derivative(const ProblemParams& params, double c, double tau);
double profile_w_second_derivative(const ProblemParams& params, double c, double tau);

// U(r) = w(G(r)^{-1/(n-2)}): the extremal written on the hyperbolic ball.
double extremal_hyperbolic(const ProblemParams& params, double c, double r);

// U_eps(rho) = eps^{-(n-2)/2} U(rho/eps) for the c=1 Euclidean profile.
double bubble_U_eps(const ProblemParams& params, double eps, double rho);

// u_lambda(r) = lambda^{-1/2} u(G^{-1}(lambda G(r))), resampled onto u's own
// grid; derivatives transform by u_lambda' = lambda^{1/2} u'(r_l) f(r)/f(r_l).
RadialFunction hyperbolic_rescale(const RadialFunction& u, int n, double lam);

// chi for the c=1 profile, computed as the ratio
//   [-w'' - (n-1)w'/tau - gamma w/tau^2] tau^s / w^{2*(s)-1}
// at tau = 1, with a constancy diagnostic across tau in [1e-2, 1e2]
// (relative spread beyond 1e-6 throws numerics_error). Requires gamma >= 0.
double multiplier_chi(const ProblemParams& params);

struct ExtremalProfile {
  ProblemParams params;
  double c;   // free positive amplitude
  double chi; // multiplier of the c=1 profile
};

ExtremalProfile make_extremal_profile(const ProblemParams& params, double c = 1.0);

// Left-hand side of the sigma-variable ODE
//   (n-2)^2 v'' + gamma sigma^{-2} v [+ sigma^{-(2*(s)+2)/2} v^{2*(s)-1}]
// at one point; derivatives by a 7-point O(h^6) central stencil with
// relative step h = sigma/100 (the O(h^2) textbook step cannot reach the
// 1e-8 residual floor: its roundoff term alone is ~1e-6 scaled).
double residual_sigma_ode(const std::function<double(double)>& v, const ProblemParams& params,
                          double sigma, bool nonlinear);

} // namespace hyhardy
