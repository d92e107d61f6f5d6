#pragma once

#include <cmath>

namespace stc {

// Fast paths for the common exponents 1 and 2; everything else goes to pow.

inline double abs_pow(double x, double e) {
  if (e == 2.0) return x * x;
  if (e == 1.0) return std::abs(x);
  if (x == 0.0) return 0.0;
  return std::pow(std::abs(x), e);
}

// |x|^{e-2} x
inline double signed_pow(double x, double e) {
  if (e == 2.0) return x;
  if (x == 0.0) return 0.0;
  if (e == 1.0) return x > 0 ? 1.0 : -1.0;
  return std::copysign(std::pow(std::abs(x), e - 1.0), x);
}

// r2^{p/2} for r2 = |g|^2 >= 0
inline double half_pow(double r2, double p) {
  if (p == 2.0) return r2;
  if (r2 == 0.0) return 0.0;
  return std::pow(r2, 0.5 * p);
}

// r2^{(p-2)/2}; the singular value at r2 = 0 (p < 2) multiplies a zero
// gradient, so it is reported as 0.
inline double flux_coefficient(double r2, double p) {
  if (p == 2.0) return 1.0;
  if (r2 == 0.0) return 0.0;
  return std::pow(r2, 0.5 * (p - 2.0));
}

}  // namespace stc
