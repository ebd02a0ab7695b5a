// mass.hpp — Euclidean and hyperbolic masses of centered balls by dual
// shooting on the singular radial equation
//
//   K'' + (n-1) K'/r + (gamma/r^2 + h(r)) K = 0  on (0, R),  K(R) = 0,
//
// plus the lambda* threshold where the hyperbolic mass changes sign.
//
// Near the origin every solution is a combination of the two Frobenius
// branches r^{-beta_+}(1 + ...) and r^{-beta_-}(1 + ...). The singular
// solution normalized to K ~ r^{-beta_+} expands as
//
//   K(r) = c1 r^{-beta_+} + c2 r^{-beta_-} + o(r^{-beta_-}),   c1 = 1,
//
// and the mass of the ball is m = c2/c1. It is well defined exactly when
// the first correction to each branch (at relative order r^{2-theta},
// theta = singularity order of h) stays below the branch gap
// Delta = beta_+ - beta_-, i.e. when gamma > (n-2)^2/4 - (2-theta)^2/4.
#pragma once

#include <array>
#include <utility>

#include "hyhardy/conformal.hpp"
#include "hyhardy/explicit_solutions.hpp"
#include "hyhardy/params.hpp"
#include "hyhardy/radial.hpp"

namespace hyhardy {

// Result of a mass computation.
struct MassReport {
  double c1 = 1.0;   // leading singular coefficient (normalized to 1)
  double c2 = 0.0;   // subcritical coefficient
  double mass = 0.0; // c2/c1
  // Hyperbolic normalization m^H (coefficient of G^{alpha_-} when the
  // G^{alpha_+} coefficient is 1); filled by hyperbolic_mass, 0 otherwise.
  double mass_hyperbolic = 0.0;
  double r0_used = 0.0;         // inner start radius actually used
  double r0_halved_delta = 0.0; // |mass(r0) - mass(r0/2)|, acceptance diagnostic
  // K = K_+ + mass * K_- on [r0, R] (Dirichlet at R). Euclidean geometry for
  // euclidean_mass; for hyperbolic_mass the profile is the hyperbolic-side
  // solution normalized so that K ~ G(r)^{alpha_+} at the origin.
  RadialFunction profile;
};

struct ShootingConfig {
  double r0 = 0.0;          // inner start radius; 0 selects the default 1e-6 * R
  double R = 1.0;           // outer (Dirichlet) radius
  double tolerance = 1e-12; // per-step relative error target
  int correction_order = 1; // Frobenius terms beyond the pure power head (0 or 1)

  // Throws validation_error unless 0 < r0 < R/100, 0 < tolerance <= 1e-2,
  // and correction_order is 0 or 1. (Call after the r0 default is resolved.)
  void validate() const;
};

// Series initialization of the +/- singular branch at r0:
//   power-type h (h ~ lead * r^{-theta}):
//     K = r^{-beta}(1 + a1 r^{2-theta}),
//     a1 = -lead / Qt(beta - (2-theta)),  Qt(x) = (x - beta_+)(x - beta_-),
//   log-type h (h ~ lead * log(1/r) + next):
//     K = r^{-beta}(1 + r^2 (A log(1/r) + B)),
//     A = -lead / Qt(beta-2),  B = -(next + A Qt'(beta-2)) / Qt(beta-2).
// Returns {K(r0), K'(r0)}. correction_order = 0 gives the pure power head.
std::pair<double, double> frobenius_init(const ProblemParams& params,
                                         const EuclideanProblem& problem,
                                         SolutionSign sign, double r0,
                                         int correction_order = 1);

// Integrates both branches outward from Frobenius data at config.r0 to
// config.R and returns them as (K_plus, K_minus) on a geometric grid
// (Euclidean geometry, radius config.R). The integration runs in t = log r,
// where the equation reads x'' + (n-2) x' + (gamma + r^2 h(r)) x = 0, so the
// r^{-2} stiffness of the Hardy term disappears. Requires config.R <=
// problem.R. Abel's identity (r^{n-1} W(r) constant, W the Wronskian) is
// monitored along the solve and a violation raises numerics_error.
std::pair<RadialFunction, RadialFunction> solve_basis(
    const ProblemParams& params, const EuclideanProblem& problem,
    const ShootingConfig& config);

// Mass of the centered ball of radius config.R: the Dirichlet combination
// K_+ + m K_- vanishing at R gives m = -K_+(R)/K_-(R), with c1 normalized by
// the Frobenius head of K_+.
//
// Method choice (dual solution over single-solution asymptotic fitting): an
// initialization contamination delta at r0 shifts m by exactly delta — the
// combination is linear in the basis, so there is no amplification — and the
// contamination of the + branch by the - branch scales like
// r0^{(2-theta) - Delta}, which vanishes as r0 -> 0 precisely in the mass
// regime gamma > (n-2)^2/4 - (2-theta)^2/4. The computation is therefore
// self-certifying: the report is accepted only if halving r0 moves the mass
// by less than 1e-4 * max(1, |m|) (1e-3 for log-type h, whose correction
// varies slowly), else numerics_error.
//
// Refuses (refusal_error) outside the mass regime, and when either basis
// branch changes sign on (r0, R]: positivity of both branches is the Sturm
// disconjugacy criterion, i.e. the coercivity of the operator on the ball.
MassReport euclidean_mass(const ProblemParams& params,
                          const EuclideanProblem& problem,
                          ShootingConfig config);

// Mass of the hyperbolic centered ball of coordinate radius ball_radius
// (0 < ball_radius < 1): builds the transformed Euclidean problem, computes
// its mass, and rescales
//           mass_hyperbolic = mass * (n-2)^{-(beta_+ - beta_-)/(n-2)},
// which is the coefficient normalization in powers of G: near the origin
// G(r)^{alpha_pm} = ((n-2) r^{n-2})^{-alpha_pm} (1 + O(r^2 log r)), and the
// conformal factor phi contributes only an overall positive multiple, so the
// hyperbolic and Euclidean masses always share their sign.
// Requires gamma > max{n(n-4)/4, 0} (else refusal_error).
MassReport hyperbolic_mass(const ProblemParams& params, double ball_radius);

// The positive multiple relating the two normalizations:
// (n-2)^{-(beta_+-beta_-)/(n-2)}.
double hyperbolic_mass_factor(const ProblemParams& params);

// Largest lambda with nonpositive hyperbolic mass, by bisection on the sign
// of mass(lambda) (increasing in lambda, since h is) to a final bracket
// width of 1e-6 * |bracket|. params.lambda is ignored; the bracket endpoints
// must produce masses of opposite sign (else refusal_error). A coercivity
// refusal at some lambda is treated as the positive side: the operator loses
// coercivity only above the sign change. Requires the same regime as
// hyperbolic_mass.
double lambda_star(const ProblemParams& params, double ball_radius,
                   std::array<double, 2> bracket);

} // namespace hyhardy
