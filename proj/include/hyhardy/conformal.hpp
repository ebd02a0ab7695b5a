// conformal.hpp — the conformal reduction from the hyperbolic ball to a
// Euclidean ball: the factor phi, the transported potential h_{gamma,lambda}
// with its origin singularity classification, the boundary weight b, and
// the bundled Euclidean problem consumed by the mass solver.
#pragma once

#include <functional>

#include "hyhardy/params.hpp"
#include "hyhardy/radial.hpp"

namespace hyhardy {

// phi(r) = (2/(1-r^2))^{(n-2)/2}; phi(0) = 2^{(n-2)/2}.
double conformal_phi(int n, double r);
// phi'(r) = (n-2) r phi/(1-r^2).
double conformal_phi_derivative(int n, double r);

// v = phi u (with the chain-rule derivative); the result lives on a
// Euclidean ball whose radius is the function's outermost node.
RadialFunction push_forward(const RadialFunction& u, int n);
// u = v/phi; inverse of push_forward (exact roundtrip up to roundoff).
RadialFunction pull_back(const RadialFunction& v, int n);

// (2/(1-r^2))^2 V_2(r) = (f/((n-2)G))^2.
double expanded_V2_euclidean(int n, double r);

// a(r) = expanded_V2_euclidean - 1/r^2. Both terms are ~1/r^2 near the
// origin, so the naive difference cancels catastrophically; we use the
// exact factorization a = N.M/((n-2) r G)^2 with
//   N(r) = r f(r) - (n-2) G(r)   (binomial series, the r^{2-n} term drops),
//   M(r) = r f(r) + (n-2) G(r)   (all positive, no cancellation),
// below r = 0.5 and the direct difference above it.
double perturbation_a(int n, double r);

// h_{gamma,lambda}(r) = gamma a(r) + (4 lambda - n(n-2))/(1-r^2)^2.
double potential_h(const ProblemParams& params, double r);

// b(r) = V_{2*(s)}(r) r^s phi(r)^{2s/(n-2)}, extended continuously to r=0.
double weight_b(const ProblemParams& params, double r);
// The two candidate closed forms for b(0): the limit our transform derives,
// (n-2)^{(2-s)/(n-2)} 2^{s-2}, and the constant printed in the source
// analysis, (n-2)^{(n-s)/(n-2)} 2^{s-2}. They differ by a factor (n-2);
// the verify suite reports the measured ratio instead of hard-coding one.
double weight_b_derived_constant(const ProblemParams& params);
double weight_b_reference_constant(const ProblemParams& params);

// Origin behaviour of h: h ~ lead/r^theta (theta=1, n=3), or
// h ~ lead*log(1/r) + next (n=4, log_type), or h(0) = lead (theta=0, n>=5).
// With gamma = 0 the a-term is absent and h is smooth (theta=0) in every
// dimension. `next` is the following constant term where the expansion
// needs it (n=3 and n=4); 0 otherwise.
struct SingularityInfo {
  double theta = 0.0;
  bool log_type = false;
  double lead = 0.0;
  double next = 0.0;
};

struct EuclideanProblem {
  ProblemParams params;
  double R; // Euclidean/ball radius (< 1: the domain is a centered ball)
  SingularityInfo h_singularity;
  std::function<double(double)> h;
  std::function<double(double)> b;
};

EuclideanProblem build_euclidean_problem(const ProblemParams& params, double R);

// Pointwise residual of -v'' - (n-1)v'/r - (gamma/r^2 + h)v = b v^{2*(s)-1}/r^s
// for a callable v (7-point stencils, relative step r/100).
double residual_euclidean_equation(const EuclideanProblem& problem,
                                   const std::function<double(double)>& v, double r);

} // namespace hyhardy
