// kernels.cpp — closed-form radial kernels f, G, G^{-1}, V_p.
//
// G(r) = \int_r^1 (1-t^2)^{n-2} t^{1-n} dt has two exact representations:
//
//  * interior: expand (1-t^2)^{n-2} binomially and integrate term by term,
//        G(r) = sum_k C(n-2,k)(-1)^k (1 - r^{2k-n+2})/(2k-n+2),
//    with the k = (n-2)/2 term replaced by C(n-2,k)(-1)^k ln(1/r) when n
//    is even.  Near r = 1 every term is O(1-r) while the sum is
//    O((1-r)^{n-1}), so the expansion cancels catastrophically there;
//
//  * boundary: substitute t = 1-w, giving
//        G(r) = \int_0^{1-r} w^{n-2} (2-w)^{n-2} (1-w)^{1-n} dw,
//    and integrate the (convergent for 1-r < 1) power series of
//    (2-w)^{n-2}(1-w)^{1-n} term by term.  All-positive leading terms, no
//    cancellation.
//
// We switch forms at r = 0.7: the interior form then loses at most
// ~(0.3)^{n-2} of relative precision, and the boundary series still
// converges geometrically (ratio 0.3).
#include "hyhardy/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hyhardy/detail/gauss_kronrod.hpp"
#include "hyhardy/detail/math_util.hpp"
#include "hyhardy/params.hpp"

namespace hyhardy {

namespace {

void require_dimension(int n) {
  if (n < 3) throw std::domain_error("kernels: dimension must be at least 3, got " + std::to_string(n));
}

void require_open_unit(double r, const char* who) {
  if (!(r > 0.0) || !(r < 1.0))
    throw std::domain_error(std::string(who) + ": radius must lie in (0,1), got " + std::to_string(r));
}

// Interior finite expansion; exact up to the cancellation discussed above.
double green_interior(int n, double r) {
  const int nm2 = n - 2;
  const double log_inv_r = std::log(1.0 / r);
  double sum = 0.0;
  for (int k = 0; k <= nm2; ++k) {
    const double c = detail::binomial(nm2, k) * detail::neg_one_pow(k);
    const int m = 2 * k - nm2; // integrand term t^{m-1}
    if (m == 0)
      sum += c * log_inv_r;
    else
      sum += c * (1.0 - std::pow(r, double(m))) / double(m);
  }
  return sum;
}

// Boundary series: G(r) = sum_j c_j (1-r)^{n-1+j}/(n-1+j) where the c_j
// are the power-series coefficients of (2-w)^{n-2} (1-w)^{1-n}.
double green_boundary(int n, double r) {
  const int nm2 = n - 2;
  const double w = 1.0 - r;
  // Coefficients of (1-w)^{-(n-1)} are C(n-2+m, m) (all positive); those of
  // (2-w)^{n-2} are C(n-2,i) 2^{n-2-i} (-1)^i, i <= n-2.
  double sum = 0.0;
  double wpow = std::pow(w, double(n - 1));
  // running binomial C(n-2+m, m), updated multiplicatively
  constexpr int kMaxTerms = 600;
  // poly part cached once
  double poly[64]; // n <= 64 is far beyond any use here
  if (nm2 + 1 > 64) throw std::domain_error("kernels: dimension too large for boundary series");
  for (int i = 0; i <= nm2; ++i)
    poly[i] = detail::binomial(nm2, i) * detail::ipow(2.0, nm2 - i) * detail::neg_one_pow(i);

  double prev_term = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kMaxTerms; ++j) {
    // c_j = sum_{i=0}^{min(j,n-2)} poly[i] * C(n-2 + j - i, j - i)
    double cj = 0.0;
    for (int i = 0; i <= std::min(j, nm2); ++i) {
      const int m = j - i;
      cj += poly[i] * detail::binomial(nm2 + m, m);
    }
    const double term = cj * wpow / double(n - 1 + j);
    sum += term;
    // two consecutive negligible terms => converged (series is eventually
    // single-signed, but be safe about early sign wiggles)
    const double scale = std::abs(sum);
    if (std::abs(term) <= 1e-17 * scale && std::abs(prev_term) <= 1e-17 * scale && j > nm2) return sum;
    prev_term = term;
    wpow *= w;
  }
  return sum; // w <= 0.3 always converges long before kMaxTerms
}

} // namespace

double f_weight(int n, double r) {
  require_dimension(n);
  require_open_unit(r, "f_weight");
  const double one_minus_r2 = (1.0 - r) * (1.0 + r); // exact-ish near r=1
  return detail::ipow(one_minus_r2, n - 2) / std::pow(r, double(n - 1));
}

double green_G(int n, double r) {
  require_dimension(n);
  if (r == 1.0) return 0.0;
  require_open_unit(r, "green_G");
  return (r > 0.7) ? green_boundary(n, r) : green_interior(n, r);
}

double green_G_by_quadrature(int n, double r) {
  require_dimension(n);
  if (r == 1.0) return 0.0;
  require_open_unit(r, "green_G_by_quadrature");
  const auto f = [n](double t) { return f_weight(n, t); };
  // Geometric grading from the left endpoint keeps the t^{1-n} growth well
  // resolved even for r ~ 1e-4 (the integrand spans many decades there).
  double total = 0.0;
  double a = r;
  while (a < 0.5) {
    const double b = std::min(2.0 * a, 0.5);
    total += detail::integrate_adaptive(f, a, b, 1e-14).value;
    a = b;
  }
  if (a < 1.0) total += detail::integrate_adaptive(f, a, 1.0, 1e-14).value;
  return total;
}

double green_G_inverse(int n, double sigma) {
  require_dimension(n);
  if (!(sigma > 0.0))
    throw std::domain_error("green_G_inverse: sigma must be positive, got " + std::to_string(sigma));
  // Relative residual target: near the boundary f -> 0, so an absolute
  // residual floor would leave r-errors of size residual/f; relative to
  // sigma the final Newton step lands within a few ULP of r instead. The
  // quantization floor f(r)*ulp(r) (neighboring representable radii move G
  // by that much) caps what any iteration can reach, so it joins the target.
  const double tol = 1e-13 * sigma;

  // Asymptotic seeds: G ~ r^{2-n}/(n-2) near the origin and
  // G ~ 2^{n-2}(1-r)^{n-1}/(n-1) near the boundary.
  const double g_half = green_G(n, 0.5);
  double r;
  if (sigma >= g_half) {
    r = std::pow((n - 2) * sigma, -1.0 / double(n - 2));
  } else {
    const double w = std::pow((n - 1) * sigma / detail::ipow(2.0, n - 2), 1.0 / double(n - 1));
    r = 1.0 - w;
  }
  r = std::clamp(r, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));

  // Bracket [lo, hi] with G(lo) >= sigma >= G(hi); G is strictly decreasing.
  double lo = r, hi = r;
  if (green_G(n, lo) < sigma) {
    while (green_G(n, lo) < sigma) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) throw numerics_error("green_G_inverse: failed to bracket (sigma too large?)");
    }
  } else {
    while (green_G(n, hi) > sigma) {
      lo = hi;
      const double next = 0.5 * (hi + 1.0);
      if (next <= hi || next >= 1.0) {
        hi = std::nextafter(1.0, 0.0);
        break;
      }
      hi = next;
    }
  }

  // Safeguarded Newton on G(r) - sigma with G' = -f.
  const double eps = std::numeric_limits<double>::epsilon();
  double fval = green_G(n, r) - sigma;
  double stop = tol;
  for (int it = 0; it < 200 && std::abs(fval) > stop; ++it) {
    if (fval > 0.0) lo = std::max(lo, r);
    else hi = std::min(hi, r);
    const double deriv = f_weight(n, r);
    double step = fval / deriv; // r_new = r + (G-sigma)/f
    double r_new = r + step;
    if (!(r_new > lo) || !(r_new < hi)) r_new = 0.5 * (lo + hi);
    if (r_new == r) break;
    r = r_new;
    fval = green_G(n, r) - sigma;
    stop = std::max(tol, 8.0 * eps * r * deriv);
  }
  if (std::abs(fval) > stop)
    throw numerics_error("green_G_inverse: did not reach |G(r)-sigma| <= 1e-12*max(1,sigma)");
  return r;
}

double weight_V_p(int n, double p, double r) {
  require_dimension(n);
  require_open_unit(r, "weight_V_p");
  if (!(p > 0.0)) throw std::domain_error("weight_V_p: p must be positive");
  const double q = 0.5 * (p + 2.0);
  const double denom4 = 4.0 * double(n - 2) * double(n - 2);
  if (r > 1e-8) {
    const double f = f_weight(n, r);
    const double om = (1.0 - r) * (1.0 + r);
    return f * f * om * om / (denom4 * std::pow(green_G(n, r), q));
  }
  // log-space evaluation dodges overflow of f^2 for extreme radii
  const double lf = (n - 2) * std::log1p(-r * r) - (n - 1) * std::log(r);
  const double lG = std::log(green_G(n, r));
  return std::exp(2.0 * lf + 2.0 * std::log1p(-r * r) - q * lG) / denom4;
}

KernelAsymptotics asymptotics_V_p(int n, double p) {
  require_dimension(n);
  if (!(p > 0.0)) throw std::domain_error("asymptotics_V_p: p must be positive");
  const double q = 0.5 * (p + 2.0);
  KernelAsymptotics a{};
  // Origin: f ~ r^{1-n}, G ~ r^{2-n}/(n-2).
  a.origin_exponent = double(n) - 0.5 * p * double(n - 2);
  a.origin_constant = std::pow(double(n - 2), q - 2.0) / 4.0;
  // Boundary: f ~ (2(1-r))^{n-2}, G ~ 2^{n-2}(1-r)^{n-1}/(n-1).
  a.boundary_exponent = 0.5 * double(n - 1) * (p - 2.0);
  a.boundary_constant = detail::ipow(2.0, 2 * n - 4) * std::pow(double(n - 1), q) /
                        (double(n - 2) * double(n - 2) * std::pow(2.0, double(n - 2) * q));
  return a;
}

} // namespace hyhardy
