#pragma once

// Exact rational reference implementations used as test oracles.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <vector>

namespace exact {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

inline cpp_int binom(int n, int r) {
  if (r < 0 || r > n) return 0;
  cpp_int c = 1;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

inline cpp_rational hyper_tail(int n, int b, int k, int alpha) {
  cpp_int num = 0;
  for (int j = alpha; j <= k; ++j) num += binom(b, j) * binom(n - b, k - j);
  return cpp_rational(num, binom(n, k));
}

inline cpp_rational power(const cpp_rational& x, int e) {
  cpp_rational r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

/// C(n,b) p^b (1-p)^(n-b) with p given as a rational.
inline cpp_rational binom_pmf(int n, int b, const cpp_rational& p) {
  return cpp_rational(binom(n, b)) * power(p, b) * power(1 - p, n - b);
}

inline cpp_rational binom_tail(int from, int n, const cpp_rational& p) {
  cpp_rational s = 0;
  for (int b = from; b <= n; ++b) s += binom_pmf(n, b, p);
  return s;
}

inline double to_double(const cpp_rational& x) { return static_cast<double>(x); }

/// Natural log of an exact integer, good to double precision.
inline double log_of(const cpp_int& x) {
  const unsigned bits = msb(x);
  if (bits < 1000) return std::log(static_cast<double>(x));
  const unsigned shift = bits - 60;
  return std::log(static_cast<double>(cpp_int(x >> shift))) + shift * std::log(2.0);
}

} // namespace exact
