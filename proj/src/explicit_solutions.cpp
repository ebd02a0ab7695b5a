// explicit_solutions.cpp — extremal profiles and their exact calculus.
//
// Everything here reduces to the two-exponent sum S = tau^{a-} + tau^{a+}
// with a_pm = (2-s) beta_pm/(n-2). Writing L = (a+ - a-) ln(tau) and
// sig = 1/(1+e^{-L}) (the logistic weight of the upper branch):
//   log S        = a- ln(tau) + softplus(L)
//   tau S'/S     = a- + (a+ - a-) sig          =: rho1
//   tau^2 S''/S  = rho1^2 - rho1 + (a+-a-)^2 sig(1-sig)  (not needed directly)
// which gives, for w = c S^{-q}, q = (n-2)/(2-s):
//   w'  = -(q/tau) rho1 w
//   w'' = (w/tau^2) [ q^2 rho1^2 + q rho1 - q (a+-a-)^2 sig (1-sig) ]
// All stable for tau from 1e-300 to 1e300.
#include "hyhardy/explicit_solutions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hyhardy/kernels.hpp"

namespace hyhardy {

namespace {

struct ProfileParts {
  double q, a_minus, a_plus;
};

ProfileParts profile_parts(const ProblemParams& params) {
  const Exponents e = exponents(params);
  const double two_minus_s = 2.0 - params.s;
  ProfileParts p;
  p.q = double(params.n - 2) / two_minus_s;
  p.a_minus = two_minus_s * e.beta_minus / double(params.n - 2);
  p.a_plus = two_minus_s * e.beta_plus / double(params.n - 2);
  return p;
}

double softplus(double x) { return (x > 0.0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_positive(double x, const char* who) {
  if (!(x > 0.0))
    throw std::domain_error(std::string(who) + ": argument must be positive, got " + std::to_string(x));
}

} // namespace

double fundamental_solution(const ProblemParams& params, SolutionSign sign, double r) {
  if (!(r > 0.0) || !(r < 1.0))
    throw std::domain_error("fundamental_solution: radius must lie in (0,1)");
  const Exponents e = exponents(params);
  const double alpha = (sign == SolutionSign::Plus) ? e.alpha_plus : e.alpha_minus;
  return std::pow(green_G(params.n, r), alpha);
}

double profile_w(const ProblemParams& params, double c, double tau) {
  require_positive(tau, "profile_w");
  require_positive(c, "profile_w amplitude");
  const ProfileParts p = profile_parts(params);
  const double lt = std::log(tau);
  const double log_S = p.a_minus * lt + softplus((p.a_plus - p.a_minus) * lt);
  return c * std::exp(-p.q * log_S);
}

double profile_w_derivative(const ProblemParams& params, double c, double tau) {
  require_positive(tau, "profile_w_derivative");
  const ProfileParts p = profile_parts(params);
  const double L = (p.a_plus - p.a_minus) * std::log(tau);
  const double sig = logistic(L);
  const double rho1 = p.a_minus + (p.a_plus - p.a_minus) * sig;
  return -(p.q / tau) * rho1 * profile_w(params, c, tau);
}

double profile_w_second_derivative(const ProblemParams& params, double c, double tau) {
  require_positive(tau, "profile_w_second_derivative");
  const ProfileParts p = profile_parts(params);
  const double da = p.a_plus - p.a_minus;
  const double sig = logistic(da * std::log(tau));
  const double rho1 = p.a_minus + da * sig;
  const double w = profile_w(params, c, tau);
  return (w / (tau * tau)) *
         (p.q * p.q * rho1 * rho1 + p.q * rho1 - p.q * da * da * sig * (1.0 - sig));
}

double extremal_hyperbolic(const ProblemParams& params, double c, double r) {
  if (!(r > 0.0) || !(r < 1.0))
    throw std::domain_error("extremal_hyperbolic: radius must lie in (0,1)");
  const double tau = std::pow(green_G(params.n, r), -1.0 / double(params.n - 2));
  return profile_w(params, c, tau);
}

double bubble_U_eps(const ProblemParams& params, double eps, double rho) {
  require_positive(eps, "bubble_U_eps scale");
  require_positive(rho, "bubble_U_eps radius");
  return std::pow(eps, -0.5 * double(params.n - 2)) * profile_w(params, 1.0, rho / eps);
}

RadialFunction hyperbolic_rescale(const RadialFunction& u, int n, double lam) {
  u.validate();
  if (u.grid.geometry != GridGeometry::HyperbolicBall)
    throw validation_error("hyperbolic_rescale: function must live on the hyperbolic ball");
  if (!(lam > 0.0))
    throw validation_error("hyperbolic_rescale: lambda must be positive");
  if (u.derivatives.empty())
    throw validation_error("hyperbolic_rescale: function has no derivatives");

  RadialFunction out;
  out.grid = u.grid;
  out.dirichlet = u.dirichlet;
  const std::size_t N = u.grid.nodes.size();
  out.values.resize(N);
  out.derivatives.resize(N);
  const double inv_sqrt = 1.0 / std::sqrt(lam);
  for (std::size_t i = 0; i < N; ++i) {
    const double r = u.grid.nodes[i];
    const double r_l = green_G_inverse(n, lam * green_G(n, r));
    out.values[i] = inv_sqrt * u.value_at(r_l);
    out.derivatives[i] =
        std::sqrt(lam) * u.derivative_at(r_l) * f_weight(n, r) / f_weight(n, r_l);
  }
  return out;
}

double multiplier_chi(const ProblemParams& params) {
  if (params.gamma < 0.0)
    throw validation_error("multiplier_chi: requires gamma >= 0");
  const Exponents e = exponents(params);

  const auto ratio_at = [&](double tau) {
    const double w = profile_w(params, 1.0, tau);
    const double w1 = profile_w_derivative(params, 1.0, tau);
    const double w2 = profile_w_second_derivative(params, 1.0, tau);
    const double lhs = -w2 - double(params.n - 1) * w1 / tau - params.gamma * w / (tau * tau);
    return lhs * std::pow(tau, params.s) / std::pow(w, e.two_star_s - 1.0);
  };

  const double chi = ratio_at(1.0);
  // constancy of the ratio across four decades is the internal proof that
  // the profile actually solves the equation
  double worst = 0.0;
  for (double lt = -2.0; lt <= 2.0 + 1e-9; lt += 0.5) {
    const double dev = std::abs(ratio_at(std::pow(10.0, lt)) / chi - 1.0);
    worst = std::max(worst, dev);
  }
  if (worst > 1e-6)
    throw numerics_error("multiplier_chi: ratio varies by " + std::to_string(worst) +
                         " across tau in [1e-2,1e2]");
  if (!(chi > 0.0)) throw numerics_error("multiplier_chi: nonpositive multiplier");
  return chi;
}

ExtremalProfile make_extremal_profile(const ProblemParams& params, double c) {
  require_positive(c, "make_extremal_profile amplitude");
  return ExtremalProfile{params, c, multiplier_chi(params)};
}

double residual_sigma_ode(const std::function<double(double)>& v, const ProblemParams& params,
                          double sigma, bool nonlinear) {
  require_positive(sigma, "residual_sigma_ode");
  const Exponents e = exponents(params);
  const double h = sigma * 1e-2;
  // 7-point O(h^6) second derivative
  const double vm3 = v(sigma - 3 * h), vm2 = v(sigma - 2 * h), vm1 = v(sigma - h);
  const double v0 = v(sigma);
  const double vp1 = v(sigma + h), vp2 = v(sigma + 2 * h), vp3 = v(sigma + 3 * h);
  const double v2 =
      (2.0 * (vp3 + vm3) - 27.0 * (vp2 + vm2) + 270.0 * (vp1 + vm1) - 490.0 * v0) /
      (180.0 * h * h);

  double res = double(params.n - 2) * double(params.n - 2) * v2 +
               params.gamma * v0 / (sigma * sigma);
  if (nonlinear) {
    const double expo = 0.5 * (e.two_star_s + 2.0);
    const double nl = std::copysign(std::pow(std::abs(v0), e.two_star_s - 1.0), v0);
    res += std::pow(sigma, -expo) * nl;
  }
  return res;
}

} // namespace hyhardy
