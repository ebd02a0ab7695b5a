// radial.cpp — grids, cubic-Hermite radial functions, weighted singular
// quadrature, and the sigma = G(r) transform.
//
// Quadrature strategy: the grid nodes are the primary breakpoints (the
// interpolant is only piecewise-smooth there); each cell gets a 7/15
// Gauss–Kronrod estimate, and cells whose error exceeds their share of the
// budget are refined adaptively. Power-law head/tail fits account for the
// unsampled (0, r_first) and (r_last, r_max) slivers, where every integrand
// in this library is asymptotically a pure power.
#include "hyhardy/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hyhardy/detail/gauss_kronrod.hpp"
#include "hyhardy/kernels.hpp"

namespace hyhardy {

namespace {

std::size_t cell_index(const std::vector<double>& x, double r) {
  // index i such that evaluation uses cell [x[i], x[i+1]]; end cells extend
  auto it = std::upper_bound(x.begin(), x.end(), r);
  if (it == x.begin()) return 0;
  std::size_t i = std::size_t(it - x.begin()) - 1;
  return std::min(i, x.size() - 2);
}

double hermite_value(double x0, double x1, double y0, double y1, double d0, double d1, double r) {
  const double h = x1 - x0;
  const double t = (r - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

double hermite_derivative(double x0, double x1, double y0, double y1, double d0, double d1, double r) {
  const double h = x1 - x0;
  const double t = (r - x0) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) / h * y0 + (3 * t2 - 4 * t + 1) * d0 +
         (6 * t - 6 * t2) / h * y1 + (3 * t2 - 2 * t) * d1;
}

// 3-point first derivatives on a non-uniform grid (O(h^2) everywhere).
std::vector<double> fd_derivatives(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
    d[i] = -hp / (hm * (hm + hp)) * y[i - 1] + (hp - hm) / (hm * hp) * y[i] +
           hm / (hp * (hm + hp)) * y[i + 1];
  }
  {
    const double h1 = x[1] - x[0], h2 = x[2] - x[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] -
           h1 / (h2 * (h1 + h2)) * y[2];
  }
  {
    const double h1 = x[n - 1] - x[n - 2], h2 = x[n - 2] - x[n - 3];
    d[n - 1] = (2 * h1 + h2) / (h1 * (h1 + h2)) * y[n - 1] - (h1 + h2) / (h1 * h2) * y[n - 2] +
               h1 / (h2 * (h1 + h2)) * y[n - 3];
  }
  return d;
}

std::vector<double> make_nodes(double r_min, double r_max, std::size_t count, GridScheme scheme) {
  if (!(r_min > 0.0) || !(r_max > r_min))
    throw validation_error("radial grid: need 0 < r_min < r_max");
  if (count < 4) throw validation_error("radial grid: need at least 4 nodes");
  std::vector<double> nodes(count);
  if (scheme == GridScheme::Geometric) {
    const double lr = std::log(r_max / r_min);
    for (std::size_t i = 0; i < count; ++i)
      nodes[i] = r_min * std::exp(lr * double(i) / double(count - 1));
  } else {
    for (std::size_t i = 0; i < count; ++i)
      nodes[i] = r_min + (r_max - r_min) * double(i) / double(count - 1);
  }
  nodes.front() = r_min;
  nodes.back() = r_max;
  return nodes;
}

struct IntegrandSpec {
  // F(r): full integrand including the measure; nonnegative for every
  // WeightKind in this library (squares and absolute powers only).
  std::function<double(double)> F;
};

const char* tag_name(WeightKind::Tag t) {
  switch (t) {
    case WeightKind::Tag::Gradient: return "Gradient";
    case WeightKind::Tag::HardyV2: return "HardyV2";
    case WeightKind::Tag::SobolevVp: return "SobolevVp";
    case WeightKind::Tag::Plain: return "Plain";
    case WeightKind::Tag::EuclideanHardy: return "EuclideanHardy";
    case WeightKind::Tag::EuclideanHS: return "EuclideanHS";
    case WeightKind::Tag::EuclideanPerturbation: return "EuclideanPerturbation";
  }
  return "?";
}

IntegrandSpec build_integrand(const RadialFunction& u, int n, const WeightKind& kind, bool hyperbolic) {
  using Tag = WeightKind::Tag;
  const bool hyp_only = kind.tag == Tag::HardyV2 || kind.tag == Tag::SobolevVp;
  const bool euc_only = kind.tag == Tag::EuclideanHardy || kind.tag == Tag::EuclideanHS ||
                        kind.tag == Tag::EuclideanPerturbation;
  if (hyp_only && !hyperbolic)
    throw validation_error(std::string("weight ") + tag_name(kind.tag) + " requires the hyperbolic ball");
  if (euc_only && hyperbolic)
    throw validation_error(std::string("weight ") + tag_name(kind.tag) + " requires a Euclidean ball");
  if (kind.tag == Tag::EuclideanPerturbation && !kind.h)
    throw validation_error("EuclideanPerturbation needs a potential callable");

  const double omega = unit_sphere_area(n);
  const double p = kind.p, s = kind.s;
  const double two_star_s = 2.0 * (n - s) / double(n - 2);
  auto factor = kind.factor;
  auto h = kind.h;
  const auto* fn = &u;
  const auto tag = kind.tag;

  IntegrandSpec spec;
  spec.F = [=](double r) -> double {
    double base = 0.0;
    switch (tag) {
      case Tag::Gradient: {
        const double d = fn->derivative_at(r);
        base = d * d;
        if (hyperbolic) {
          const double m = 0.5 * (1.0 - r * r);
          base *= m * m;
        }
        break;
      }
      case Tag::HardyV2: {
        const double v = fn->value_at(r);
        base = weight_V_p(n, 2.0, r) * v * v;
        break;
      }
      case Tag::SobolevVp: {
        const double v = fn->value_at(r);
        base = weight_V_p(n, p, r) * std::pow(std::abs(v), p);
        break;
      }
      case Tag::Plain: {
        const double v = fn->value_at(r);
        base = v * v;
        break;
      }
      case Tag::EuclideanHardy: {
        const double v = fn->value_at(r);
        base = v * v / (r * r);
        break;
      }
      case Tag::EuclideanHS: {
        const double v = fn->value_at(r);
        base = std::pow(std::abs(v), two_star_s) / std::pow(r, s);
        break;
      }
      case Tag::EuclideanPerturbation: {
        const double v = fn->value_at(r);
        base = h(r) * v * v;
        break;
      }
    }
    if (factor) base *= factor(r);
    double measure = omega * std::pow(r, double(n - 1));
    if (hyperbolic) measure *= std::pow(2.0 / ((1.0 - r) * (1.0 + r)), double(n));
    return base * measure;
  };
  return spec;
}

// Fit F ~ C w^q from two samples (w measured from the singular end) and
// integrate the fitted power over (0, w0]. Returns 0 when no positive
// power-law signal is present; throws on a non-integrable exponent.
double power_law_sliver(double w0, double F0, double w1, double F1, const char* where) {
  if (!(F0 > 0.0) || !(F1 > 0.0) || !std::isfinite(F0) || !std::isfinite(F1)) return 0.0;
  const double q = std::log(F1 / F0) / std::log(w1 / w0);
  if (!std::isfinite(q)) return 0.0;
  if (q <= -1.0 + 1e-9)
    throw numerics_error(std::string("integral diverges: fitted exponent ") + std::to_string(q) +
                         " <= -1 at the " + where);
  return F0 * w0 / (q + 1.0);
}

double integrate_cells(const IntegrandSpec& spec, const std::vector<double>& nodes,
                       const IntegrateOptions& opt, double domain_radius, bool hyperbolic) {
  const std::size_t ncell = nodes.size() - 1;

  // pass 1: single GK estimate per cell fixes the magnitude scale
  std::vector<detail::QuadResult> cell(ncell);
  double total = 0.0;
  for (std::size_t i = 0; i < ncell; ++i) {
    cell[i] = detail::gk15_cell(spec.F, nodes[i], nodes[i + 1]);
    total += cell[i].value;
  }

  // pass 2: refine cells that exceed their share of the error budget
  const double scale = std::max(std::abs(total), std::numeric_limits<double>::min());
  const double budget = opt.rel_tol * scale;
  const double per_cell = budget / double(ncell);
  double err = 0.0;
  double refined_total = 0.0;
  for (std::size_t i = 0; i < ncell; ++i) {
    if (cell[i].error > per_cell) {
      auto q = detail::integrate_adaptive(spec.F, nodes[i], nodes[i + 1], opt.rel_tol, per_cell, 4000);
      refined_total += q.value;
      err += q.error;
    } else {
      refined_total += cell[i].value;
      err += cell[i].error;
    }
  }
  total = refined_total;

  // unsampled slivers at the two ends
  if (opt.extend_to_origin && nodes.front() > 0.0) {
    const double F0 = spec.F(nodes.front());
    const double F1 = spec.F(nodes[1]);
    total += power_law_sliver(nodes.front(), F0, nodes[1], F1, "origin");
  }
  if (opt.extend_to_boundary && nodes.back() < domain_radius) {
    const double w0 = domain_radius - nodes.back();
    const double w1 = domain_radius - nodes[nodes.size() - 2];
    const double F0 = spec.F(nodes.back());
    const double F1 = spec.F(nodes[nodes.size() - 2]);
    total += power_law_sliver(w0, F0, w1, F1, hyperbolic ? "boundary r=1" : "outer boundary");
  }

  if (!std::isfinite(total))
    throw numerics_error("integral is not finite");
  if (err > 10.0 * std::max(budget, opt.rel_tol * std::abs(total)))
    throw numerics_error("quadrature failed to converge to the requested tolerance "
                         "(likely a non-integrable singularity)");
  return total;
}

} // namespace

RadialGrid RadialGrid::hyperbolic(double r_min, double r_max, std::size_t count, GridScheme scheme) {
  RadialGrid g;
  g.geometry = GridGeometry::HyperbolicBall;
  g.scheme = scheme;
  g.domain_radius = 1.0;
  if (!(r_max < 1.0))
    throw validation_error("hyperbolic grid: r_max must be < 1");
  g.nodes = make_nodes(r_min, r_max, count, scheme);
  return g;
}

RadialGrid RadialGrid::euclidean(double radius, double r_min, double r_max, std::size_t count,
                                 GridScheme scheme) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw validation_error("euclidean grid: radius must be positive and finite");
  if (!(r_max <= radius))
    throw validation_error("euclidean grid: r_max must be <= radius");
  RadialGrid g;
  g.geometry = GridGeometry::EuclideanBall;
  g.scheme = scheme;
  g.domain_radius = radius;
  g.nodes = make_nodes(r_min, r_max, count, scheme);
  return g;
}

void RadialGrid::validate() const {
  if (nodes.size() < 4)
    throw validation_error("radial grid: need at least 4 nodes");
  if (!(nodes.front() > 0.0))
    throw validation_error("radial grid: first node must be > 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw validation_error("radial grid: nodes must be strictly increasing");
  const double cap = (geometry == GridGeometry::HyperbolicBall)
                         ? std::nextafter(1.0, 0.0)
                         : domain_radius;
  if (!(nodes.back() <= cap))
    throw validation_error("radial grid: last node exceeds the domain");
}

void RadialFunction::validate() const {
  grid.validate();
  if (values.size() != grid.nodes.size())
    throw validation_error("radial function: values/nodes size mismatch");
  if (!derivatives.empty() && derivatives.size() != values.size())
    throw validation_error("radial function: derivatives size mismatch");
  for (double v : values)
    if (!std::isfinite(v))
      throw validation_error("radial function: non-finite value");
  if (dirichlet && std::abs(values.back()) > 0.0)
    throw validation_error("radial function: Dirichlet tag requires value 0 at r_max");
}

double RadialFunction::value_at(double r) const {
  if (derivatives.empty())
    throw std::logic_error("RadialFunction::value_at: derivatives not set (use sample_radial)");
  const auto& x = grid.nodes;
  const std::size_t i = cell_index(x, r);
  const std::vector<double>& d = derivatives;
  return hermite_value(x[i], x[i + 1], values[i], values[i + 1], d[i], d[i + 1], r);
}

double RadialFunction::derivative_at(double r) const {
  if (derivatives.empty())
    throw std::logic_error("RadialFunction::derivative_at: derivatives not set (use sample_radial)");
  const auto& x = grid.nodes;
  const std::size_t i = cell_index(x, r);
  const std::vector<double>& d = derivatives;
  return hermite_derivative(x[i], x[i + 1], values[i], values[i + 1], d[i], d[i + 1], r);
}

RadialFunction sample_radial(const RadialGrid& grid, const std::function<double(double)>& f,
                             const std::function<double(double)>& df, bool dirichlet) {
  grid.validate();
  RadialFunction u;
  u.grid = grid;
  u.dirichlet = dirichlet;
  u.values.resize(grid.nodes.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) u.values[i] = f(grid.nodes[i]);
  if (df) {
    u.derivatives.resize(grid.nodes.size());
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) u.derivatives[i] = df(grid.nodes[i]);
  } else {
    u.derivatives = fd_derivatives(grid.nodes, u.values);
  }
  u.validate();
  return u;
}

double integrate_hyperbolic(const RadialFunction& u, int n, const WeightKind& kind,
                            const IntegrateOptions& opt) {
  u.validate();
  if (u.grid.geometry != GridGeometry::HyperbolicBall)
    throw validation_error("integrate_hyperbolic: function lives on a Euclidean grid");
  if (u.derivatives.empty())
    throw validation_error("integrate_hyperbolic: function has no derivatives");
  auto spec = build_integrand(u, n, kind, /*hyperbolic=*/true);
  return integrate_cells(spec, u.grid.nodes, opt, 1.0, true);
}

double integrate_euclidean(const RadialFunction& v, int n, const WeightKind& kind,
                           const IntegrateOptions& opt) {
  v.validate();
  if (v.grid.geometry != GridGeometry::EuclideanBall)
    throw validation_error("integrate_euclidean: function lives on a hyperbolic grid");
  if (v.derivatives.empty())
    throw validation_error("integrate_euclidean: function has no derivatives");
  auto spec = build_integrand(v, n, kind, /*hyperbolic=*/false);
  return integrate_cells(spec, v.grid.nodes, opt, v.grid.domain_radius, false);
}

SigmaFunction sigma_transform(const RadialFunction& u, int n) {
  u.validate();
  if (u.grid.geometry != GridGeometry::HyperbolicBall)
    throw validation_error("sigma_transform: function must live on the hyperbolic ball");
  if (u.derivatives.empty())
    throw validation_error("sigma_transform: function has no derivatives");
  const std::size_t N = u.grid.nodes.size();
  SigmaFunction v;
  v.sigma.resize(N);
  v.values.resize(N);
  v.derivatives.resize(N);
  // sigma = G(r) decreases in r; reverse so sigma increases
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t j = N - 1 - i;
    const double r = u.grid.nodes[j];
    v.sigma[i] = green_G(n, r);
    v.values[i] = u.values[j];
    v.derivatives[i] = -u.derivatives[j] / f_weight(n, r); // dv/dsigma = u'/G' = -u'/f
  }
  return v;
}

double SigmaFunction::value_at(double s) const {
  const std::size_t i = cell_index(sigma, s);
  return hermite_value(sigma[i], sigma[i + 1], values[i], values[i + 1], derivatives[i],
                       derivatives[i + 1], s);
}

double SigmaFunction::derivative_at(double s) const {
  const std::size_t i = cell_index(sigma, s);
  return hermite_derivative(sigma[i], sigma[i + 1], values[i], values[i + 1], derivatives[i],
                            derivatives[i + 1], s);
}

namespace {

double sigma_line_integral(const SigmaFunction& v, const std::function<double(double)>& F,
                           double rel_tol) {
  if (v.sigma.size() < 4)
    throw validation_error("sigma-line integral: too few samples");
  IntegrandSpec spec{F};
  IntegrateOptions opt;
  opt.rel_tol = rel_tol;
  opt.extend_to_origin = false; // sampled range is the support by contract
  opt.extend_to_boundary = false;
  return integrate_cells(spec, v.sigma, opt, v.sigma.back(), false);
}

} // namespace

double sigma_line_gradient(const SigmaFunction& v, double rel_tol) {
  return sigma_line_integral(
      v, [&v](double s) { const double d = v.derivative_at(s); return d * d; }, rel_tol);
}

double sigma_line_hardy(const SigmaFunction& v, double rel_tol) {
  return sigma_line_integral(
      v, [&v](double s) { const double w = v.value_at(s); return w * w / (s * s); }, rel_tol);
}

double sigma_line_vp(const SigmaFunction& v, double p, double rel_tol) {
  return sigma_line_integral(
      v,
      [&v, p](double s) {
        const double w = v.value_at(s);
        return std::pow(std::abs(w), p) * std::pow(s, -0.5 * (p + 2.0));
      },
      rel_tol);
}

IdentityRatios identity_ratio(const RadialFunction& u, int n, double p) {
  const double hyp_vp = integrate_hyperbolic(u, n, WeightKind::sobolev_vp(p));
  const double hyp_grad = integrate_hyperbolic(u, n, WeightKind::gradient());
  const SigmaFunction v = sigma_transform(u, n);
  const double cnm2 = 1.0 / (double(n - 2) * double(n - 2));
  const double line_vp = cnm2 * sigma_line_vp(v, p);
  const double line_grad = sigma_line_gradient(v);

  IdentityRatios out{hyp_vp / line_vp, hyp_grad / line_grad};
  const double rel = std::abs(out.vp_ratio - out.gradient_ratio) /
                     std::max(std::abs(out.gradient_ratio), 1e-300);
  if (rel > 1e-5)
    throw numerics_error("integral identity ratios disagree beyond 1e-5 (rel diff " +
                         std::to_string(rel) + ")");
  return out;
}

} // namespace hyhardy
