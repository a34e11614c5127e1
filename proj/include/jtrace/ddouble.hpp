#pragma once

// Double-double arithmetic: a value is the unevaluated sum hi + lo of two
// doubles with |lo| <= ulp(hi)/2.  Built on the Knuth two-sum and the
// fma-based two-product error-free transformations.  Requires strict IEEE
// evaluation (no -ffast-math, no contraction).

#include <cmath>
#include <complex>
#include <limits>

namespace jtrace {

/// Unit roundoff of double-double arithmetic (2^-104).
inline constexpr double kDDEpsilon = 4.930380657631324e-32;

struct DD {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DD() = default;
  constexpr DD(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr DD(double h, double l) : hi(h), lo(l) {}

  [[nodiscard]] constexpr double value() const { return hi + lo; }
};

namespace eft {

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace eft

inline DD operator+(const DD& a, const DD& b) {
  DD s = eft::two_sum(a.hi, b.hi);
  DD t = eft::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = eft::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return eft::quick_two_sum(s.hi, s.lo);
}

inline DD operator-(const DD& a) { return {-a.hi, -a.lo}; }
inline DD operator-(const DD& a, const DD& b) { return a + (-b); }

inline DD operator*(const DD& a, const DD& b) {
  DD p = eft::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return eft::quick_two_sum(p.hi, p.lo);
}

inline DD operator*(const DD& a, double b) {
  DD p = eft::two_prod(a.hi, b);
  p.lo += a.lo * b;
  return eft::quick_two_sum(p.hi, p.lo);
}

inline DD operator/(const DD& a, const DD& b) {
  const double q1 = a.hi / b.hi;
  DD r = a - b * q1;
  const double q2 = r.hi / b.hi;
  r = r - b * q2;
  const double q3 = r.hi / b.hi;
  return eft::quick_two_sum(q1, q2) + DD(q3);
}

inline DD& operator+=(DD& a, const DD& b) { return a = a + b; }
inline DD& operator-=(DD& a, const DD& b) { return a = a - b; }
inline DD& operator*=(DD& a, const DD& b) { return a = a * b; }
inline DD& operator/=(DD& a, const DD& b) { return a = a / b; }

inline bool operator<(const DD& a, const DD& b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(const DD& a, const DD& b) { return b < a; }

inline DD abs(const DD& a) { return a.hi < 0.0 ? -a : a; }

inline DD pow_int(DD base, unsigned n) {
  DD result(1.0);
  while (n) {
    if (n & 1U) result *= base;
    base *= base;
    n >>= 1U;
  }
  return result;
}

inline DD sqrt(const DD& a) {
  if (a.hi <= 0.0) return DD(0.0);
  const double s = std::sqrt(a.hi);
  // One Newton correction on the double estimate.
  const DD r = a - eft::two_prod(s, s);
  return eft::quick_two_sum(s, r.hi / (2.0 * s));
}

/// Complex number with double-double parts.
struct CDD {
  DD re;
  DD im;

  CDD() = default;
  CDD(DD r, DD i) : re(r), im(i) {}
  explicit CDD(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  [[nodiscard]] std::complex<double> value() const { return {re.value(), im.value()}; }
};

inline CDD operator+(const CDD& a, const CDD& b) { return {a.re + b.re, a.im + b.im}; }
inline CDD operator-(const CDD& a, const CDD& b) { return {a.re - b.re, a.im - b.im}; }
inline CDD operator*(const CDD& a, const CDD& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CDD operator*(const CDD& a, const DD& b) { return {a.re * b, a.im * b}; }

}  // namespace jtrace
