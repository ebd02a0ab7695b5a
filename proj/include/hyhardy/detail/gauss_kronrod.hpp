// detail/gauss_kronrod.hpp — 7/15 Gauss–Kronrod cell rule plus a globally
// adaptive driver (worst-cell-first refinement). Shared by the kernel
// cross-checks and the radial integration layer.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

namespace hyhardy::detail {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;     // accumulated error estimate (conservative)
  std::int64_t cells = 0; // GK cells evaluated
};

// 15-point Kronrod extension of 7-point Gauss on [a,b]. All nodes are
// interior, so integrable endpoint singularities are never evaluated at
// the endpoint itself.
template <class F>
inline QuadResult gk15_cell(F&& f, double a, double b) {
  // Abscissae/weights of the (7,15) pair; Gauss nodes sit at the odd
  // indices and the centre.
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  const double fc = f(c);
  double resk = wgk[7] * fc;
  double resg = wg[3] * fc;
  double resabs = wgk[7] * std::abs(fc);
  fv[14] = fc;
  for (int j = 0; j < 7; ++j) {
    const double f1 = f(c - h * xgk[j]);
    const double f2 = f(c + h * xgk[j]);
    fv[j] = f1;
    fv[7 + j] = f2;
    resk += wgk[j] * (f1 + f2);
    resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = wgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += wgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[7 + j] - reskh));

  const double ah = std::abs(h);
  double err = std::abs((resk - resg) * h);
  const double resasc_h = resasc * ah;
  if (resasc_h > 0.0 && err > 0.0)
    err = resasc_h * std::min(1.0, std::pow(200.0 * err / resasc_h, 1.5));
  const double resabs_h = resabs * ah;
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs_h);

  return {resk * h, err, 1};
}

// Globally adaptive integration: repeatedly bisect the cell with the
// largest error estimate until the accumulated estimate meets
// max(abs_tol, rel_tol*|value|) or no refinable cell remains.
template <class F>
inline QuadResult integrate_adaptive(F&& f, double a, double b,
                                     double rel_tol = 1e-12,
                                     double abs_tol = 0.0,
                                     std::int64_t max_cells = 20000) {
  QuadResult out;
  if (!(b > a)) return out;

  struct Cell {
    double err, a, b, val;
    int depth;
    bool operator<(const Cell& o) const { return err < o.err; }
  };

  std::priority_queue<Cell> heap;
  QuadResult first = gk15_cell(f, a, b);
  double total = first.value;
  double heap_err = first.error;
  double frozen_err = 0.0; // error stuck in cells too small to split
  std::int64_t cells = 1;
  heap.push({first.error, a, b, first.value, 0});

  const double eps = std::numeric_limits<double>::epsilon();
  while (!heap.empty() && cells < max_cells) {
    const double target = std::max(abs_tol, rel_tol * std::abs(total));
    if (heap_err + frozen_err <= target) break;

    Cell top = heap.top();
    heap.pop();
    heap_err -= top.err;

    const double mid = 0.5 * (top.a + top.b);
    const bool splittable =
        top.depth < 60 && mid > top.a && mid < top.b &&
        (top.b - top.a) > 4.0 * eps * std::max({std::abs(top.a), std::abs(top.b), 1e-300});
    if (!splittable) {
      frozen_err += top.err;
      continue;
    }

    QuadResult l = gk15_cell(f, top.a, mid);
    QuadResult r = gk15_cell(f, mid, top.b);
    cells += 2;
    total += (l.value + r.value) - top.val;
    heap_err += l.error + r.error;
    heap.push({l.error, top.a, mid, l.value, top.depth + 1});
    heap.push({r.error, mid, top.b, r.value, top.depth + 1});
  }

  out.value = total;
  out.error = heap_err + frozen_err;
  out.cells = cells;
  return out;
}

} // namespace hyhardy::detail
