// mass.cpp — dual-shooting mass solver for centered balls.
//
// The radial equation K'' + (n-1)K'/r + (gamma/r^2 + h)K = 0 is integrated
// in t = log r, where it becomes
//
//   x'' + (n-2) x' + (gamma + r^2 h(r)) x = 0,   r = e^t,
//
// with constant leading coefficients (no r^{-2} stiffness left). Both
// Frobenius branches are carried in one 4-dimensional state, each scaled by
// r0^{beta_pm} so the heads start at O(1); the scale factors re-enter only
// in the final ratio m = -K_+(R)/K_-(R) = -(x_+/x_-)(T) * r0^{-Delta} and in
// the unscaled profile values.

#include "hyhardy/mass.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint/integrate/integrate_times.hpp>
#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

namespace hyhardy {

namespace {

using State = std::array<double, 4>; // {x_+, x_+', x_-, x_-'} (scaled, log variable)

constexpr std::size_t kProfileNodes = 481;
// Internal guard on Abel's identity; actual drift at tolerance 1e-12 sits
// around 1e-10, so a violation here means the solve went genuinely wrong.
constexpr double kWronskianGuard = 1e-7;

struct RadialLogOde {
  int n;
  double gamma;
  const std::function<double(double)>* h;

  void operator()(const State& y, State& dydt, double t) const {
    const double r = std::exp(t);
    const double w = gamma + r * r * (*h)(r);
    const double damp = -(n - 2.0);
    dydt[0] = y[1];
    dydt[1] = damp * y[1] - w * y[0];
    dydt[2] = y[3];
    dydt[3] = damp * y[3] - w * y[2];
  }
};

// Scaled Frobenius data at r0: v = K r0^{beta} and dv = d/dt [K(e^t)] r0^{beta}
// evaluated at t = log r0, i.e. dv = r0 K'(r0) r0^{beta}.
struct ScaledHead {
  double v;
  double dv;
};

ScaledHead scaled_head(const Exponents& ex, const SingularityInfo& sing,
                       double beta, double r0, int order) {
  if (order <= 0 || sing.lead == 0.0) return {1.0, -beta};
  // Qt(x) = (x - beta_+)(x - beta_-) = x^2 - (n-2)x + gamma, the polynomial
  // annihilated by the head exponents.
  const auto qt = [&ex](double x) {
    return (x - ex.beta_plus) * (x - ex.beta_minus);
  };
  const double n2 = ex.beta_plus + ex.beta_minus; // n - 2
  if (sing.log_type) {
    // h = lead log(1/r) + next + ...; the correction is
    // r^2 (A log(1/r) + B): applying the gamma-part of the operator to
    // r^{-beta+2} log(1/r) produces Qt(beta-2) log(1/r) + Qt'(beta-2) at
    // order r^{-beta}, which fixes A and B in turn.
    const double den = qt(beta - 2.0);
    if (std::fabs(den) < 1e-10)
      throw numerics_error("log-type Frobenius correction resonant: "
                           "beta_+ - beta_- is too close to 2");
    const double a = -sing.lead / den;
    const double b = -(sing.next + a * (2.0 * (beta - 2.0) - n2)) / den;
    const double r2 = r0 * r0;
    const double corr = r2 * (a * std::log(1.0 / r0) + b);
    return {1.0 + corr, -beta + (2.0 - beta) * corr - a * r2};
  }
  // h = lead r^{-theta} + ...; balancing at order r^{-beta - theta} gives
  // a1 = -lead / Qt(beta - (2-theta)).
  const double m = 2.0 - sing.theta;
  const double den = qt(beta - m);
  if (std::fabs(den) < 1e-10)
    throw numerics_error("Frobenius correction resonant: 2-theta is too "
                         "close to beta_+ - beta_-");
  const double corr = -sing.lead / den * std::pow(r0, m);
  return {1.0 + corr, -beta - (beta - m) * corr};
}

struct SolveResult {
  RadialGrid grid;           // geometric nodes on [r0, R]
  std::vector<State> states; // scaled states at the nodes
};

SolveResult integrate_scaled(const ProblemParams& params,
                             const EuclideanProblem& problem, double r0,
                             double big_r, double tolerance, int order,
                             std::size_t node_count) {
  const Exponents ex = exponents(params);
  if (ex.beta_plus - ex.beta_minus < 1e-8)
    throw numerics_error("branch exponents nearly coincide (gamma within "
                         "1e-16 of (n-2)^2/4); the shooting basis is "
                         "degenerate");
  if (ex.beta_plus * std::log(1.0 / r0) > 600.0)
    throw numerics_error("mass solve out of double range: "
                         "beta_+ * log(1/r0) exceeds 600");

  SolveResult out;
  out.grid = RadialGrid::euclidean(big_r, r0, big_r, node_count,
                                   GridScheme::Geometric);
  std::vector<double> times(out.grid.nodes.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    times[i] = std::log(out.grid.nodes[i]);

  const ScaledHead head_p =
      scaled_head(ex, problem.h_singularity, ex.beta_plus, r0, order);
  const ScaledHead head_m =
      scaled_head(ex, problem.h_singularity, ex.beta_minus, r0, order);
  State y{head_p.v, head_p.dv, head_m.v, head_m.dv};

  out.states.reserve(times.size());
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(0.0, tolerance,
                                      ode::runge_kutta_fehlberg78<State>());
  const RadialLogOde sys{params.n, params.gamma, &problem.h};
  try {
    ode::integrate_times(stepper, sys, y, times.begin(), times.end(), 1e-3,
                         [&out](const State& s, double) {
                           out.states.push_back(s);
                         });
  } catch (const std::overflow_error& e) {
    throw numerics_error(std::string("adaptive step-size collapse during "
                                     "the mass solve: ") +
                         e.what());
  }

  // Abel's identity: r^{n-1} W(r) is constant, i.e. in the log variable
  // W_t(t) e^{(n-2)(t - t0)} is, with W_t = x_+ x_-' - x_+' x_-. The scale
  // factors multiply W_t by the constant r0^{n-2} and drop out of the check.
  const auto wronskian = [](const State& s) {
    return s[0] * s[3] - s[1] * s[2];
  };
  const double w0 = wronskian(out.states.front());
  for (std::size_t i = 1; i < out.states.size(); ++i) {
    const double scaled = wronskian(out.states[i]) *
                          std::exp((params.n - 2.0) * (times[i] - times[0]));
    if (!(std::fabs(scaled / w0 - 1.0) < kWronskianGuard))
      throw numerics_error("Wronskian conservation violated during the mass "
                           "solve (integration is untrustworthy)");
  }
  return out;
}

double mass_from(const SolveResult& sr, double r0, double delta_exp) {
  const State& last = sr.states.back();
  if (last[2] == 0.0)
    throw numerics_error("K_- vanishes exactly at the boundary (Dirichlet "
                         "eigenvalue hit); the mass is undefined here");
  return -(last[0] / last[2]) * std::pow(r0, -delta_exp);
}

// Sturm disconjugacy surrogate for coercivity: the operator is coercive on
// the ball exactly while the subcritical branch K_- (the H^1-admissible,
// principal solution at the singular end) is positive on (0, R]; its first
// zero marks the first Dirichlet eigenvalue. The singular branch K_+ is NOT
// a valid indicator: K_+(R) changes sign precisely where the mass does
// (m = -K_+(R)/K_-(R)), well before coercivity is lost.
void check_coercivity_surrogate(const SolveResult& sr) {
  for (const State& s : sr.states)
    if (!(s[2] > 0.0))
      throw refusal_error("operator is not coercive on this ball: the "
                          "subcritical branch changes sign");
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

} // namespace

void ShootingConfig::validate() const {
  if (!(R > 0.0) || !std::isfinite(R))
    throw validation_error("shooting config: R must be positive and finite");
  if (!(r0 > 0.0) || !(r0 < R / 100.0))
    throw validation_error("shooting config: need 0 < r0 < R/100, got r0=" +
                           format_double(r0) + ", R=" + format_double(R));
  if (!(tolerance > 0.0) || !(tolerance <= 1e-2))
    throw validation_error("shooting config: tolerance must lie in (0, 1e-2]");
  if (correction_order != 0 && correction_order != 1)
    throw validation_error("shooting config: correction_order must be 0 or 1");
}

std::pair<double, double> frobenius_init(const ProblemParams& params,
                                         const EuclideanProblem& problem,
                                         SolutionSign sign, double r0,
                                         int correction_order) {
  if (!(r0 > 0.0) || !(r0 < 1.0))
    throw validation_error("frobenius_init: r0 must lie in (0, 1)");
  const Exponents ex = exponents(params);
  const double beta =
      sign == SolutionSign::Plus ? ex.beta_plus : ex.beta_minus;
  if (beta * std::log(1.0 / r0) > 600.0)
    throw numerics_error("frobenius_init out of double range: "
                         "beta * log(1/r0) exceeds 600");
  const ScaledHead head =
      scaled_head(ex, problem.h_singularity, beta, r0, correction_order);
  const double unscale = std::pow(r0, -beta);
  return {head.v * unscale, head.dv * unscale / r0};
}

std::pair<RadialFunction, RadialFunction> solve_basis(
    const ProblemParams& params, const EuclideanProblem& problem,
    const ShootingConfig& config) {
  ShootingConfig cfg = config;
  if (cfg.r0 == 0.0) cfg.r0 = 1e-6 * cfg.R;
  cfg.validate();
  if (cfg.R > problem.R * (1.0 + 1e-12))
    throw validation_error("solve_basis: config.R exceeds the problem's "
                           "domain radius");
  const Exponents ex = exponents(params);
  const SolveResult sr =
      integrate_scaled(params, problem, cfg.r0, cfg.R, cfg.tolerance,
                       cfg.correction_order, kProfileNodes);
  const double scale_p = std::pow(cfg.r0, -ex.beta_plus);
  const double scale_m = std::pow(cfg.r0, -ex.beta_minus);
  RadialFunction k_plus, k_minus;
  k_plus.grid = sr.grid;
  k_minus.grid = sr.grid;
  const std::size_t count = sr.grid.nodes.size();
  k_plus.values.resize(count);
  k_plus.derivatives.resize(count);
  k_minus.values.resize(count);
  k_minus.derivatives.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = sr.grid.nodes[i];
    const State& s = sr.states[i];
    k_plus.values[i] = s[0] * scale_p;
    k_plus.derivatives[i] = s[1] * scale_p / r;
    k_minus.values[i] = s[2] * scale_m;
    k_minus.derivatives[i] = s[3] * scale_m / r;
  }
  return {std::move(k_plus), std::move(k_minus)};
}

MassReport euclidean_mass(const ProblemParams& params,
                          const EuclideanProblem& problem,
                          ShootingConfig config) {
  if (params.n != problem.params.n || params.gamma != problem.params.gamma)
    throw validation_error("euclidean_mass: params disagree with the "
                           "problem's n or gamma");
  if (config.r0 == 0.0) config.r0 = 1e-6 * config.R;
  config.validate();
  if (config.R > problem.R * (1.0 + 1e-12))
    throw validation_error("euclidean_mass: config.R exceeds the problem's "
                           "domain radius");

  const Exponents ex = exponents(params);
  // Mass regime: the branch corrections (relative order 2 - theta) must stay
  // below the branch gap Delta, else the subcritical coefficient is not
  // separable from the correction tail. A log singularity counts as theta=0.
  const double theta_eff =
      problem.h_singularity.log_type ? 0.0 : problem.h_singularity.theta;
  const double gap = 2.0 - theta_eff;
  const double bound = ex.gamma_H - 0.25 * gap * gap;
  if (!(params.gamma > bound))
    throw refusal_error(
        "mass undefined: need gamma > (n-2)^2/4 - (2-theta)^2/4 = " +
        format_double(bound) + ", got gamma = " + format_double(params.gamma));

  const double delta_exp = ex.beta_plus - ex.beta_minus;
  const SolveResult sr =
      integrate_scaled(params, problem, config.r0, config.R, config.tolerance,
                       config.correction_order, kProfileNodes);
  check_coercivity_surrogate(sr);
  const double mass = mass_from(sr, config.r0, delta_exp);

  // Self-certification: the initialization contamination scales like
  // r0^{(2-theta) - Delta}, so halving r0 must barely move the answer.
  const SolveResult sr_half =
      integrate_scaled(params, problem, config.r0 / 2.0, config.R,
                       config.tolerance, config.correction_order,
                       kProfileNodes);
  check_coercivity_surrogate(sr_half);
  const double mass_half = mass_from(sr_half, config.r0 / 2.0, delta_exp);
  const double halved_delta = std::fabs(mass - mass_half);
  const double accept_tol = (problem.h_singularity.log_type ? 1e-3 : 1e-4) *
                            std::max(1.0, std::fabs(mass));
  if (!(halved_delta < accept_tol))
    throw numerics_error(
        "mass did not converge in r0: halving moved it by " +
        format_double(halved_delta) + " (tolerance " +
        format_double(accept_tol) +
        "); adjust r0 (larger r0 tames the r0^{-Delta} roundoff "
        "amplification, smaller r0 tames the series truncation)");

  MassReport rep;
  rep.c1 = 1.0;
  rep.c2 = mass;
  rep.mass = mass;
  rep.mass_hyperbolic = 0.0;
  rep.r0_used = config.r0;
  rep.r0_halved_delta = halved_delta;

  rep.profile.grid = sr.grid;
  rep.profile.dirichlet = true;
  const std::size_t count = sr.grid.nodes.size();
  rep.profile.values.resize(count);
  rep.profile.derivatives.resize(count);
  const double scale_p = std::pow(config.r0, -ex.beta_plus);
  const double scale_m = std::pow(config.r0, -ex.beta_minus);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = sr.grid.nodes[i];
    const State& s = sr.states[i];
    rep.profile.values[i] = s[0] * scale_p + mass * s[2] * scale_m;
    rep.profile.derivatives[i] = (s[1] * scale_p + mass * s[3] * scale_m) / r;
  }
  // The combination is built to vanish at R; pin the rounding residue.
  rep.profile.values.back() = 0.0;
  // The Dirichlet mass solution is positive inside the ball on a coercive
  // domain; a violation means the solve is inconsistent, not merely refused.
  for (std::size_t i = 0; i + 1 < count; ++i)
    if (!(rep.profile.values[i] > 0.0))
      throw numerics_error("mass profile lost positivity inside the ball; "
                           "the solve is inconsistent");
  return rep;
}

double hyperbolic_mass_factor(const ProblemParams& params) {
  const Exponents ex = exponents(params);
  return std::pow(params.n - 2.0,
                  -(ex.beta_plus - ex.beta_minus) / (params.n - 2.0));
}

MassReport hyperbolic_mass(const ProblemParams& params, double ball_radius) {
  if (!(ball_radius > 0.0) || !(ball_radius < 1.0))
    throw validation_error("hyperbolic_mass: ball_radius must lie in (0, 1)");
  if (classify_regime_hyperbolic(params).kind !=
      RegimeKind::LowDimMassNeeded)
    throw refusal_error("hyperbolic mass requires gamma > max{n(n-4)/4, 0} "
                        "(got gamma = " + format_double(params.gamma) +
                        " in dimension " + std::to_string(params.n) + ")");

  const EuclideanProblem problem =
      build_euclidean_problem(params, ball_radius);
  ShootingConfig config;
  config.R = ball_radius;
  MassReport rep = euclidean_mass(params, problem, config);
  rep.mass_hyperbolic = rep.mass * hyperbolic_mass_factor(params);

  // Transform the profile back to the hyperbolic side and normalize so the
  // head is exactly G(r)^{alpha_+}: u = K/phi has head r^{-beta_+}/phi(0) and
  // G^{alpha_+} = ((n-2) r^{n-2})^{-alpha_+} (1 + O(r^2 log r)), so the
  // normalizing multiple is phi(0) (n-2)^{-alpha_+}.
  const Exponents ex = exponents(params);
  const double norm = std::pow(2.0, (params.n - 2.0) / 2.0) *
                      std::pow(params.n - 2.0, -ex.alpha_plus);
  RadialFunction hyp;
  hyp.grid = rep.profile.grid;
  hyp.grid.geometry = GridGeometry::HyperbolicBall;
  hyp.grid.domain_radius = 1.0;
  hyp.dirichlet = true;
  const std::size_t count = hyp.grid.nodes.size();
  hyp.values.resize(count);
  hyp.derivatives.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = hyp.grid.nodes[i];
    const double phi = conformal_phi(params.n, r);
    const double dphi = conformal_phi_derivative(params.n, r);
    const double k = rep.profile.values[i];
    const double dk = rep.profile.derivatives[i];
    hyp.values[i] = k * norm / phi;
    hyp.derivatives[i] = (dk - k * dphi / phi) * norm / phi;
  }
  hyp.values.back() = 0.0;
  rep.profile = std::move(hyp);
  return rep;
}

double lambda_star(const ProblemParams& params, double ball_radius,
                   std::array<double, 2> bracket) {
  if (!(ball_radius > 0.0) || !(ball_radius < 1.0))
    throw validation_error("lambda_star: ball_radius must lie in (0, 1)");
  if (classify_regime_hyperbolic(params).kind !=
      RegimeKind::LowDimMassNeeded)
    throw refusal_error("lambda_star requires gamma > max{n(n-4)/4, 0}");
  double lo = bracket[0];
  double hi = bracket[1];
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw validation_error("lambda_star: bracket must be finite with "
                           "bracket[0] < bracket[1]");

  const auto mass_sign = [&](double lam) -> int {
    ProblemParams q = params;
    q.lambda = lam;
    try {
      const EuclideanProblem problem =
          build_euclidean_problem(q, ball_radius);
      ShootingConfig config;
      config.R = ball_radius;
      const MassReport rep = euclidean_mass(q, problem, config);
      return rep.mass < 0.0 ? -1 : 1;
    } catch (const refusal_error&) {
      // Coercivity is lost only above the Dirichlet eigenvalue, which sits
      // strictly above the mass sign change: count it as the positive side.
      return 1;
    }
  };

  if (mass_sign(lo) != -1)
    throw refusal_error("lambda_star: mass at bracket[0] is not negative; "
                        "the bracket does not straddle the sign change");
  if (mass_sign(hi) != 1)
    throw refusal_error("lambda_star: mass at bracket[1] is not positive; "
                        "the bracket does not straddle the sign change");

  const double width_target = 1e-6 * (hi - lo);
  while (hi - lo > width_target) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break; // double precision exhausted
    (mass_sign(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace hyhardy
