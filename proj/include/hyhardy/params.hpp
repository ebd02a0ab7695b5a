// params.hpp — validated problem parameters and the exponent algebra
// (beta/alpha exponents, critical exponent 2*(s), dimension-regime split)
// that every other component consumes.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace hyhardy {

// Distinct rejection reasons for parameter validation; the CLI maps any of
// these to exit code 2.
enum class ParamErrorCode {
  DimensionTooSmall,   // n < 3
  GammaSupercritical,  // gamma >= (n-2)^2/4 (the strict inequality is required)
  SOutOfRange,         // s not in [0,2)
  ThetaOutOfRange,     // theta not in [0,2)
  BadArgument,         // any other rejected input (grids, functions, options)
};

class validation_error : public std::invalid_argument {
public:
  validation_error(ParamErrorCode code, const std::string& what)
      : std::invalid_argument(what), code_(code) {}
  explicit validation_error(const std::string& what)
      : std::invalid_argument(what), code_(ParamErrorCode::BadArgument) {}
  ParamErrorCode code() const noexcept { return code_; }

private:
  ParamErrorCode code_;
};

// Thrown when a computation refuses a mathematically out-of-scope request
// (non-coercive operator, wrong mass regime, bad bisection bracket, ...).
// The CLI maps it to exit code 3.
class refusal_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Internal numerical failure (divergent quadrature, inconsistent cross-checks,
// step-size collapse, ...). Distinct from bad input.
class numerics_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ProblemParams {
  int n;         // dimension, >= 3
  double gamma;  // Hardy coupling, < (n-2)^2/4 (may be negative)
  double s;      // Hardy–Sobolev parameter in [0,2)
  double lambda; // linear perturbation coupling
  double theta;  // declared singularity order of the perturbation, in [0,2)
};

struct Exponents {
  double beta_plus;   // (n-2)/2 + sqrt((n-2)^2/4 - gamma)
  double beta_minus;  // (n-2)/2 - sqrt((n-2)^2/4 - gamma)
  double alpha_plus;  // beta_plus  / (n-2)
  double alpha_minus; // beta_minus / (n-2)
  double two_star_s;  // 2(n-s)/(n-2)
  double gamma_H;     // (n-2)^2/4
};

enum class RegimeKind {
  HighDim,          // gamma <= (n-2)^2/4 - (2-theta)^2/4: bubble alone decides
  LowDimMassNeeded, // above that threshold: positivity of the mass decides
  Infeasible,       // gamma < 0: the certificate machinery is out of scope
};

struct Regime {
  RegimeKind kind;
  // Explicit perturbation threshold for the n>=5 hyperbolic case:
  // lambda > (n-2)/(n-4) * (n(n-4)/4 - gamma).
  std::optional<double> threshold_lambda;
  bool log_type = false; // n=4 hyperbolic: h has a log (not power) singularity
};

// Validates raw inputs; throws validation_error with a distinct code per
// violated constraint.
ProblemParams make_params(int n, double gamma, double s, double lambda,
                          double theta);

// Derived exponents; the sum/product identities
//   beta+ + beta- = n-2,  beta+ * beta- = gamma,  alpha+ + alpha- = 1
// hold to machine precision by construction.
Exponents exponents(const ProblemParams& p);

// Dimension-regime split using params.theta as the declared singularity order.
Regime classify_regime(const ProblemParams& p);

// Same split with theta dictated by the hyperbolic ball context:
// theta=1 for n=3, log-type for n=4, theta=0 for n>=5.
Regime classify_regime_hyperbolic(const ProblemParams& p);

// Surface area of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

} // namespace hyhardy
