// radial.hpp — radial grids, interpolated radial functions, weighted
// quadrature on the hyperbolic/Euclidean ball, and the sigma = G(r)
// change of variable with its integral identities.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hyhardy/params.hpp"

namespace hyhardy {

enum class GridGeometry { HyperbolicBall, EuclideanBall };
enum class GridScheme { Geometric, Uniform };

// Strictly increasing radii in (0, domain_radius]. Geometric grids
// equidistribute log r, which matches the power-law behaviour of every
// weight in this library near r = 0.
struct RadialGrid {
  GridGeometry geometry = GridGeometry::HyperbolicBall;
  GridScheme scheme = GridScheme::Geometric;
  double domain_radius = 1.0; // 1 for the hyperbolic ball, R for Euclidean
  std::vector<double> nodes;

  static RadialGrid hyperbolic(double r_min, double r_max, std::size_t count,
                               GridScheme scheme = GridScheme::Geometric);
  static RadialGrid euclidean(double radius, double r_min, double r_max, std::size_t count,
                              GridScheme scheme = GridScheme::Geometric);

  std::size_t size() const { return nodes.size(); }
  void validate() const; // throws validation_error on ordering/range violations
};

// Nodal values plus nodal derivatives; evaluation is cubic Hermite per
// cell. If no derivatives are supplied they are synthesized by 3-point
// finite differences (O(h^2) at the nodes, which keeps interpolation at
// O(h^3); analytic derivatives restore full O(h^4)).
struct RadialFunction {
  RadialGrid grid;
  std::vector<double> values;
  std::vector<double> derivatives;
  bool dirichlet = false; // pinned to 0 at the last node (= r_max)

  double value_at(double r) const;
  double derivative_at(double r) const;
  void validate() const;
};

// Sample a callable onto a grid; pass the analytic derivative when you
// have one (quadrature accuracy is noticeably better with it).
RadialFunction sample_radial(const RadialGrid& grid, const std::function<double(double)>& f,
                             const std::function<double(double)>& df = nullptr,
                             bool dirichlet = false);

// Integrand selector. Parameters beyond the tag:
//   SobolevVp(p), EuclideanHS(s), EuclideanPerturbation(h callable);
//   `factor` multiplies any integrand pointwise (used e.g. for the
//   boundary-singular weight b in the Euclidean Hardy–Sobolev term).
struct WeightKind {
  enum class Tag {
    Gradient,               // u'^2, with the metric factor on the hyperbolic ball
    HardyV2,                // V_2 u^2            (hyperbolic only)
    SobolevVp,              // V_p |u|^p          (hyperbolic only)
    Plain,                  // u^2
    EuclideanHardy,         // u^2 / r^2          (Euclidean only)
    EuclideanHS,            // |u|^{2*(s)} / r^s  (Euclidean only)
    EuclideanPerturbation   // h(r) u^2           (Euclidean only)
  };
  Tag tag = Tag::Plain;
  double p = 2.0;
  double s = 0.0;
  std::function<double(double)> h;
  std::function<double(double)> factor;

  static WeightKind gradient() { return {Tag::Gradient, 2, 0, {}, {}}; }
  static WeightKind hardy_v2() { return {Tag::HardyV2, 2, 0, {}, {}}; }
  static WeightKind sobolev_vp(double p) { return {Tag::SobolevVp, p, 0, {}, {}}; }
  static WeightKind plain() { return {Tag::Plain, 2, 0, {}, {}}; }
  static WeightKind euclidean_hardy() { return {Tag::EuclideanHardy, 2, 0, {}, {}}; }
  static WeightKind euclidean_hs(double s, std::function<double(double)> factor = {}) {
    return {Tag::EuclideanHS, 2, s, {}, std::move(factor)};
  }
  static WeightKind euclidean_perturbation(std::function<double(double)> h) {
    return {Tag::EuclideanPerturbation, 2, 0, std::move(h), {}};
  }
};

struct IntegrateOptions {
  double rel_tol = 1e-8;
  bool extend_to_origin = true;   // power-law head for (0, first node)
  bool extend_to_boundary = false; // power-law tail for (last node, r_max)
};

// omega_{n-1} \int (integrand) (2/(1-r^2))^n r^{n-1} dr over the sampled
// support; Gradient carries the inverse metric factor ((1-r^2)/2)^2 u'^2.
// Throws numerics_error if the integral diverges under refinement or the
// head/tail fit detects a non-integrable exponent.
double integrate_hyperbolic(const RadialFunction& u, int n, const WeightKind& kind,
                            const IntegrateOptions& opt = {});

// omega_{n-1} \int (integrand) r^{n-1} dr, same contract.
double integrate_euclidean(const RadialFunction& v, int n, const WeightKind& kind,
                           const IntegrateOptions& opt = {});

// v(sigma) = u(r) under sigma = G(r); samples reversed so sigma increases.
// Derivatives transform by dv/dsigma = -u'(r)/f(r).
struct SigmaFunction {
  std::vector<double> sigma;
  std::vector<double> values;
  std::vector<double> derivatives;

  double value_at(double s) const;
  double derivative_at(double s) const;
};

SigmaFunction sigma_transform(const RadialFunction& u, int n);

// One-dimensional line integrals in the sigma variable over the sampled
// range (the functions fed here vanish at the ends by construction).
double sigma_line_gradient(const SigmaFunction& v, double rel_tol = 1e-10);
double sigma_line_hardy(const SigmaFunction& v, double rel_tol = 1e-10);
double sigma_line_vp(const SigmaFunction& v, double p, double rel_tol = 1e-10);

// Both ratios equal the same u-independent constant (the measured value of
// the volume-element normalization); they are returned for inspection and
// a mismatch beyond 1e-5 relative throws numerics_error.
struct IdentityRatios {
  double vp_ratio;       // (hyperbolic V_p integral) / ((n-2)^{-2} sigma-line V_p integral)
  double gradient_ratio; // (hyperbolic gradient integral) / (sigma-line gradient integral)
};

IdentityRatios identity_ratio(const RadialFunction& u, int n, double p);

} // namespace hyhardy
