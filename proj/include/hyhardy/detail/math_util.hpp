// detail/math_util.hpp — small numeric helpers shared across modules.
#pragma once

#include <cmath>

namespace hyhardy::detail {

// Binomial coefficient as a double (exact for the small orders used here).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * double(n - k + i) / double(i);
  return c;
}

// (-1)^k without pow.
inline double neg_one_pow(int k) { return (k & 1) ? -1.0 : 1.0; }

// Integer power of a double (exponentiation by squaring keeps it exact-ish
// and fast for the small exponents used in the kernel expansions).
inline double ipow(double x, int m) {
  if (m < 0) return 1.0 / ipow(x, -m);
  double acc = 1.0, base = x;
  while (m > 0) {
    if (m & 1) acc *= base;
    base *= base;
    m >>= 1;
  }
  return acc;
}

} // namespace hyhardy::detail
