// conformal.cpp — the hyperbolic-to-Euclidean reduction.
//
// The load-bearing piece is the cancellation-free form of
//   a(r) = (f/((n-2)G))^2 - 1/r^2
//        = N(r) M(r) / ((n-2) r G(r))^2,
//   N = r f - (n-2) G,   M = r f + (n-2) G.
// Expanding r f binomially and integrating G term by term, the r^{2-n}
// singularities cancel EXACTLY inside N (the k=0 coefficient is zero):
//   N(r) = sum_{k, m != 0} C(n-2,k)(-1)^k [ (2k/m) r^m - (n-2)/m ],
//   m = 2k-(n-2), plus C(n-2,k0)(-1)^{k0} (1 - (n-2) ln(1/r)) at the
// log index k0 = (n-2)/2 when n is even. For n=3 this reduces to
// N = 2-2r, M = 2(1-r)/r, a = 4/(r(1-r)^2) — the exact identity.
#include "hyhardy/conformal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hyhardy/detail/math_util.hpp"
#include "hyhardy/kernels.hpp"

namespace hyhardy {

namespace {

void require_unit(double r, const char* who, bool allow_zero) {
  const bool low_ok = allow_zero ? (r >= 0.0) : (r > 0.0);
  if (!low_ok || !(r < 1.0))
    throw std::domain_error(std::string(who) + ": radius out of range, got " + std::to_string(r));
}

// N(r) = r f(r) - (n-2) G(r) via the cancellation-free series.
double n_series(int n, double r) {
  const int nm2 = n - 2;
  const double log_inv_r = std::log(1.0 / r);
  double sum = 0.0;
  for (int k = 0; k <= nm2; ++k) {
    const double c = detail::binomial(nm2, k) * detail::neg_one_pow(k);
    const int m = 2 * k - nm2;
    if (m == 0)
      sum += c * (1.0 - nm2 * log_inv_r);
    else
      sum += c * ((2.0 * k / m) * std::pow(r, double(m)) - double(nm2) / m);
  }
  return sum;
}

} // namespace

double conformal_phi(int n, double r) {
  require_unit(r, "conformal_phi", /*allow_zero=*/true);
  return std::pow(2.0 / ((1.0 - r) * (1.0 + r)), 0.5 * double(n - 2));
}

double conformal_phi_derivative(int n, double r) {
  require_unit(r, "conformal_phi_derivative", /*allow_zero=*/true);
  return double(n - 2) * r * conformal_phi(n, r) / ((1.0 - r) * (1.0 + r));
}

RadialFunction push_forward(const RadialFunction& u, int n) {
  u.validate();
  if (u.grid.geometry != GridGeometry::HyperbolicBall)
    throw validation_error("push_forward: input must live on the hyperbolic ball");
  if (u.derivatives.empty())
    throw validation_error("push_forward: input has no derivatives");
  RadialFunction v;
  v.grid = u.grid;
  v.grid.geometry = GridGeometry::EuclideanBall;
  v.grid.domain_radius = u.grid.nodes.back();
  v.dirichlet = u.dirichlet;
  const std::size_t N = u.grid.nodes.size();
  v.values.resize(N);
  v.derivatives.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double r = u.grid.nodes[i];
    const double phi = conformal_phi(n, r);
    const double dphi = conformal_phi_derivative(n, r);
    v.values[i] = phi * u.values[i];
    v.derivatives[i] = dphi * u.values[i] + phi * u.derivatives[i];
  }
  return v;
}

RadialFunction pull_back(const RadialFunction& v, int n) {
  v.validate();
  if (v.grid.geometry != GridGeometry::EuclideanBall)
    throw validation_error("pull_back: input must live on a Euclidean ball");
  if (v.derivatives.empty())
    throw validation_error("pull_back: input has no derivatives");
  RadialFunction u;
  u.grid = v.grid;
  u.grid.geometry = GridGeometry::HyperbolicBall;
  u.grid.domain_radius = 1.0;
  u.dirichlet = v.dirichlet;
  const std::size_t N = v.grid.nodes.size();
  u.values.resize(N);
  u.derivatives.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double r = v.grid.nodes[i];
    const double phi = conformal_phi(n, r);
    const double dphi = conformal_phi_derivative(n, r);
    u.values[i] = v.values[i] / phi;
    u.derivatives[i] = v.derivatives[i] / phi - v.values[i] * dphi / (phi * phi);
  }
  return u;
}

double expanded_V2_euclidean(int n, double r) {
  require_unit(r, "expanded_V2_euclidean", /*allow_zero=*/false);
  const double x = f_weight(n, r) / (double(n - 2) * green_G(n, r));
  return x * x;
}

double perturbation_a(int n, double r) {
  require_unit(r, "perturbation_a", /*allow_zero=*/false);
  if (r >= 0.5) return expanded_V2_euclidean(n, r) - 1.0 / (r * r);
  const double G = green_G(n, r);
  const double rf = r * f_weight(n, r);
  const double N = n_series(n, r);
  const double M = rf + double(n - 2) * G;
  const double denom = double(n - 2) * r * G;
  return N * M / (denom * denom);
}

double potential_h(const ProblemParams& params, double r) {
  require_unit(r, "potential_h", /*allow_zero=*/false);
  const int n = params.n;
  const double om = (1.0 - r) * (1.0 + r);
  double h = (4.0 * params.lambda - double(n) * double(n - 2)) / (om * om);
  if (params.gamma != 0.0) h += params.gamma * perturbation_a(n, r);
  return h;
}

double weight_b(const ProblemParams& params, double r) {
  require_unit(r, "weight_b", /*allow_zero=*/true);
  if (r == 0.0) return weight_b_derived_constant(params);
  const Exponents e = exponents(params);
  const double phi_pow = std::pow(conformal_phi(params.n, r), 2.0 * params.s / double(params.n - 2));
  return weight_V_p(params.n, e.two_star_s, r) * std::pow(r, params.s) * phi_pow;
}

double weight_b_derived_constant(const ProblemParams& params) {
  const double n = params.n, s = params.s;
  return std::pow(n - 2.0, (2.0 - s) / (n - 2.0)) * std::pow(2.0, s - 2.0);
}

double weight_b_reference_constant(const ProblemParams& params) {
  const double n = params.n, s = params.s;
  return std::pow(n - 2.0, (n - s) / (n - 2.0)) * std::pow(2.0, s - 2.0);
}

EuclideanProblem build_euclidean_problem(const ProblemParams& params, double R) {
  if (!(R > 0.0) || !(R < 1.0))
    throw validation_error("build_euclidean_problem: ball radius must lie in (0,1)");
  EuclideanProblem prob;
  prob.params = params;
  prob.R = R;

  const int n = params.n;
  const double g = params.gamma, l = params.lambda;
  SingularityInfo& sing = prob.h_singularity;
  if (g == 0.0) {
    // no Hardy term: h = (4l - n(n-2))/(1-r^2)^2 is smooth
    sing.theta = 0.0;
    sing.log_type = false;
    sing.lead = 4.0 * l - double(n) * double(n - 2);
    sing.next = 0.0;
  } else if (n == 3) {
    sing.theta = 1.0;
    sing.log_type = false;
    sing.lead = 4.0 * g;               // lim r h(r)
    sing.next = 8.0 * g + 4.0 * l - 3.0; // following constant term
  } else if (n == 4) {
    sing.theta = 0.0;
    sing.log_type = true;
    sing.lead = 8.0 * g;                 // lim h / log(1/r)
    sing.next = -4.0 * g + 4.0 * l - 8.0; // constant under the log
  } else {
    sing.theta = 0.0;
    sing.log_type = false;
    sing.lead = 4.0 * double(n - 2) * g / double(n - 4) + 4.0 * l - double(n) * double(n - 2);
    sing.next = 0.0;
  }

  ProblemParams p = params;
  prob.h = [p](double r) { return potential_h(p, r); };
  prob.b = [p](double r) { return weight_b(p, r); };
  return prob;
}

double residual_euclidean_equation(const EuclideanProblem& problem,
                                   const std::function<double(double)>& v, double r) {
  require_unit(r, "residual_euclidean_equation", /*allow_zero=*/false);
  const ProblemParams& P = problem.params;
  const Exponents e = exponents(P);
  const double h = r * 1e-2;
  const double vm3 = v(r - 3 * h), vm2 = v(r - 2 * h), vm1 = v(r - h);
  const double v0 = v(r);
  const double vp1 = v(r + h), vp2 = v(r + 2 * h), vp3 = v(r + 3 * h);
  // 7-point O(h^6) first and second derivatives
  const double d1 = (-vm3 + 9 * vm2 - 45 * vm1 + 45 * vp1 - 9 * vp2 + vp3) / (60.0 * h);
  const double d2 =
      (2.0 * (vp3 + vm3) - 27.0 * (vp2 + vm2) + 270.0 * (vp1 + vm1) - 490.0 * v0) /
      (180.0 * h * h);
  const double nl = std::copysign(std::pow(std::abs(v0), e.two_star_s - 1.0), v0);
  return -(d2 + double(P.n - 1) * d1 / r) - (P.gamma / (r * r) + problem.h(r)) * v0 -
         problem.b(r) * nl / std::pow(r, P.s);
}

} // namespace hyhardy
