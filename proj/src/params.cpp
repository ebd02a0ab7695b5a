#include "hyhardy/params.hpp"

#include <numbers>
#include <sstream>

namespace hyhardy {

ProblemParams make_params(int n, double gamma, double s, double lambda,
                          double theta) {
  if (n < 3) {
    std::ostringstream msg;
    msg << "dimension n=" << n << " rejected: need n >= 3";
    throw validation_error(ParamErrorCode::DimensionTooSmall, msg.str());
  }
  const double gamma_H = 0.25 * (n - 2.0) * (n - 2.0);
  if (!(gamma < gamma_H)) { // also rejects NaN
    std::ostringstream msg;
    msg << "gamma=" << gamma << " rejected: need gamma < (n-2)^2/4 = "
        << gamma_H << " strictly";
    throw validation_error(ParamErrorCode::GammaSupercritical, msg.str());
  }
  if (!(s >= 0.0 && s < 2.0)) {
    std::ostringstream msg;
    msg << "s=" << s << " rejected: need 0 <= s < 2";
    throw validation_error(ParamErrorCode::SOutOfRange, msg.str());
  }
  if (!(theta >= 0.0 && theta < 2.0)) {
    std::ostringstream msg;
    msg << "theta=" << theta << " rejected: need 0 <= theta < 2";
    throw validation_error(ParamErrorCode::ThetaOutOfRange, msg.str());
  }
  return ProblemParams{n, gamma, s, lambda, theta};
}

Exponents exponents(const ProblemParams& p) {
  const double m = p.n - 2.0;
  const double gamma_H = 0.25 * m * m;
  const double root = std::sqrt(gamma_H - p.gamma);
  Exponents e;
  e.gamma_H = gamma_H;
  e.beta_plus = 0.5 * m + root;
  e.beta_minus = 0.5 * m - root;
  e.alpha_plus = e.beta_plus / m;
  e.alpha_minus = e.beta_minus / m;
  e.two_star_s = 2.0 * (p.n - p.s) / m;
  return e;
}

namespace {

Regime classify_with_theta(const ProblemParams& p, double theta,
                           bool log_type) {
  Regime reg;
  reg.log_type = log_type;
  if (p.gamma < 0.0) {
    // The existence machinery compares against mu_{gamma,0}(R^n), which is
    // attained only for gamma >= 0; negative couplings are out of scope.
    reg.kind = RegimeKind::Infeasible;
    return reg;
  }
  const double m = p.n - 2.0;
  // For a log singularity the power order is effectively 0 (any power theta>0
  // dominates a log), so the threshold is evaluated at theta=0.
  const double t = log_type ? 0.0 : theta;
  const double high_dim_bound = 0.25 * m * m - 0.25 * (2.0 - t) * (2.0 - t);
  if (p.gamma <= high_dim_bound) {
    reg.kind = RegimeKind::HighDim;
  } else {
    reg.kind = RegimeKind::LowDimMassNeeded;
  }
  if (p.n >= 5) {
    // Positivity threshold of h(0) after the conformal reduction:
    // lambda > (n-2)/(n-4) * (n(n-4)/4 - gamma).
    reg.threshold_lambda =
        m / (p.n - 4.0) * (p.n * (p.n - 4.0) / 4.0 - p.gamma);
  }
  return reg;
}

} // namespace

Regime classify_regime(const ProblemParams& p) {
  return classify_with_theta(p, p.theta, false);
}

Regime classify_regime_hyperbolic(const ProblemParams& p) {
  switch (p.n) {
  case 3:
    return classify_with_theta(p, 1.0, false);
  case 4:
    return classify_with_theta(p, 0.0, /*log_type=*/p.gamma != 0.0);
  default:
    return classify_with_theta(p, 0.0, false);
  }
}

double unit_sphere_area(int n) {
  // 2 pi^{n/2} / Gamma(n/2); tgamma is exact enough for the modest n here.
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

} // namespace hyhardy
