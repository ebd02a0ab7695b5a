// variational.hpp — Rayleigh quotients on the hyperbolic/Euclidean ball,
// their itemized energy breakdowns, discrete minimization with coercivity
// prechecks, the best constant mu_{gamma,0}(R^n) of the unperturbed
// problem, concentration test functions (plain bubble and mass-corrected),
// and the existence certificate that combines them.
#pragma once

#include <optional>
#include <vector>

#include "hyhardy/conformal.hpp"
#include "hyhardy/mass.hpp"
#include "hyhardy/params.hpp"
#include "hyhardy/radial.hpp"

namespace hyhardy {

// One integral together with the weight that produced it, so a breakdown
// is auditable term by term.
struct WeightedTerm {
  double value = 0.0;
  WeightKind kind;
};

// Itemized Rayleigh quotient. The quotient is reproducible from the raw
// terms:
//   quotient = (gradient - gamma*hardy - perturbation - lambda*l2)
//              / denominator^{2/2*(s)}.
// Hyperbolic breakdowns use perturbation_term = 0 (the linear coupling is
// the explicit lambda*l2 piece); Euclidean breakdowns use l2_term = 0 (the
// lambda-dependence is folded into the potential h by the conformal
// transform).
struct EnergyBreakdown {
  ProblemParams params;
  WeightedTerm gradient_term;      // \int |grad u|^2
  WeightedTerm hardy_term;         // \int V_2 u^2, resp. \int u^2/r^2 (coefficient gamma NOT included)
  WeightedTerm perturbation_term;  // \int h u^2 (full, Euclidean only)
  WeightedTerm l2_term;            // \int u^2 (coefficient lambda NOT included, hyperbolic only)
  WeightedTerm denominator_term;   // \int V_p |u|^p, resp. \int b |u|^p / r^s
  double numerator = 0.0;          // gradient - gamma*hardy - perturbation - lambda*l2
  double quotient = 0.0;           // numerator / denominator^{2/p}
};

// Recombines the stored terms; tests assert |recombine - quotient| <= 1e-12
// relative.
double recombine_quotient(const EnergyBreakdown& b);

// Itemized quotient of a Dirichlet function on the hyperbolic ball of
// Euclidean radius ball_radius (grid must be hyperbolic, last node at the
// ball edge, value pinned to 0 there). Throws validation_error on a
// degenerate (zero-denominator) input.
EnergyBreakdown rayleigh_hyperbolic(const RadialFunction& u, const ProblemParams& params,
                                    double ball_radius);

// Same for the transformed problem on the Euclidean ball [0, R]: numerator
// \int (|grad v|^2 - (gamma/r^2 + h) v^2), denominator \int b |v|^p / r^s.
EnergyBreakdown rayleigh_euclidean(const RadialFunction& v, const EuclideanProblem& problem);

struct MinimizeOptions {
  int max_iterations = 4000;   // per restart
  double tolerance = 1e-8;     // stationarity: |grad J| relative to |J| scale
  int restarts = 5;            // pencil ground state, bubble-like, linear, random starts
  unsigned seed = 9001;        // RNG seed for the random restarts
  int gauss_points = 4;        // per-cell Gauss order for the precomputed forms
  void validate() const;       // throws validation_error on nonsensical values
};

struct MinimizeResult {
  double mu_est = 0.0;           // discrete minimum of the quotient
  RadialFunction minimizer;      // normalized so the denominator term is 1
  std::vector<double> history;   // accepted quotient values of the winning restart
  double stationarity = 0.0;     // final projected-gradient norm (relative)
};

// Projected gradient descent on the constraint surface {denominator = 1}
// with Armijo backtracking, restarted from 5 seeded initial profiles. All
// quadratic forms and the nonlinear denominator use per-cell Gauss tables
// precomputed once from the grid (no adaptive quadrature inside the
// iteration). Refuses (refusal_error) when the discrete operator is not
// coercive; throws numerics_error when every restart stagnates without
// reaching stationarity.
MinimizeResult minimize_quotient(const EuclideanProblem& problem, const RadialGrid& grid,
                                 const MinimizeOptions& opt = {});
MinimizeResult minimize_quotient(const ProblemParams& params, double ball_radius,
                                 const RadialGrid& grid, const MinimizeOptions& opt = {});

// Smallest generalized eigenvalue of the numerator quadratic form Q
// relative to the H^1 form \int (|grad u|^2 + u^2) on the discrete
// Dirichlet space of the grid (P1 elements, Sturm-count bisection on the
// tridiagonal pencil). margin > 0 <=> the discrete operator is coercive.
double coercivity_margin(const EuclideanProblem& problem, const RadialGrid& grid);
double coercivity_margin(const ProblemParams& params, double ball_radius,
                         const RadialGrid& grid);

// Best constant mu_{gamma,0}(R^n) of the unperturbed Hardy–Sobolev
// quotient, evaluated as the quotient of the explicit extremal profile:
//   mu = chi * Den^{(p-2)/p},  Den = omega_{n-1} \int_0^inf w^p tau^{n-1-s} dtau,
// where chi is the profile's multiplier. Requires gamma >= 0 (the infimum
// is attained by the profile only there; validation_error otherwise).
double mu_gamma_rn(const ProblemParams& params);

// The attainment threshold mu_{gamma,0}(R^n) / b(0)^{2/2*(s)} of the
// transformed problem (b(0) is taken from problem.b).
double attainment_threshold(const ProblemParams& params, const EuclideanProblem& problem);

// Quintic cutoff: 1 on [0, delta/2], 0 on [delta, inf), C^2 across both
// joints, strictly decreasing in between.
double cutoff_eta(double r, double delta);
double cutoff_eta_derivative(double r, double delta);

// Quotient of the plain concentration bubble u_eps = eta * U_eps on the
// Euclidean problem. Requires eps <= cutoff_radius/10 (validation_error)
// and 0 < cutoff_radius <= problem.R. As eps -> 0 the denominator tends to
// b(0) \int U^p/|x|^s and the quotient approaches the attainment threshold
// from the side dictated by the sign structure of h near the origin.
EnergyBreakdown test_function_case1(const ProblemParams& params, const EuclideanProblem& problem,
                                    double eps, double cutoff_radius);

// Quotient of the mass-corrected test function
//   u_eps = eta * U_eps + eps^{(beta+-beta-)/2} * (K - eta r^{-beta+}),
// evaluated in the equivalent, cancellation-free form
//   u_eps / eps^{Delta/2} = K + eta * (U_eps/eps^{Delta/2} - r^{-beta+}),
// where K = K_plus + m K_minus is the singular profile carried by the mass
// report. The quotient expands as
//   threshold - m * omega_{n-1} Delta / (b(0) \int U^p/|x|^s)^{2/p} * eps^Delta + o(eps^Delta).
// Requires a report with a profile on the problem's ball (validation_error
// otherwise) and eps <= R/20.
EnergyBreakdown test_function_case2(const ProblemParams& params, const EuclideanProblem& problem,
                                    double eps, const MassReport& mass_report);

// Existence certificate for the hyperbolic problem on the ball.
struct Certificate {
  Regime regime;
  double mu_estimate = 0.0;       // best exhibited test-function quotient
  double threshold = 0.0;         // mu_{gamma,0}(R^n)/b(0)^{2/2*(s)}
  double eps_used = 0.0;          // concentration parameter of the exhibit (0 if none)
  bool satisfied = false;         // strict inequality resolved beyond 10x quadrature error
  bool inconclusive = false;      // inequality present but inside the numerical margin
  double numerical_margin = 0.0;  // threshold - mu_estimate
  std::optional<MassReport> mass_input; // mass report when the regime needs one
};

// Classifies the regime; checks discrete coercivity first (refusal_error
// when the operator is not coercive, or when gamma < 0 puts the problem
// outside the certificate machinery). In the high-dimension regime the
// explicit lambda threshold decides and a plain-bubble quotient exhibits
// the inequality; in the low-dimension regime the hyperbolic mass decides
// and, when positive, a mass-corrected quotient exhibits it. 'satisfied'
// demands a margin of at least 10x the estimated quadrature error; a
// positive-but-smaller margin reports inconclusive instead.
Certificate existence_certificate(const ProblemParams& params, double ball_radius);

} // namespace hyhardy
