#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

namespace wavered {

// Exact rational with 64-bit numerator/denominator, stored in lowest terms
// with positive denominator. Arithmetic goes through 128-bit intermediates;
// results that do not fit in 64 bits come back as nullopt and callers fall
// back to floating point.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  bool is_integer() const { return den == 1; }
  bool is_zero() const { return num == 0; }
  bool is_one() const { return num == 1 && den == 1; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

namespace rat {

inline bool fits64(__int128 v) {
  return v >= static_cast<__int128>(INT64_MIN) && v <= static_cast<__int128>(INT64_MAX);
}

inline std::optional<Rational> make(__int128 n, __int128 d) {
  if (d == 0) return std::nullopt;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  // gcd over __int128 by Euclid
  __int128 a = n < 0 ? -n : n, b = d;
  while (b) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  __int128 g = a == 0 ? 1 : a;
  n /= g;
  d /= g;
  if (!fits64(n) || !fits64(d)) return std::nullopt;
  Rational r;
  r.num = static_cast<long long>(n);
  r.den = static_cast<long long>(d);
  if (r.num == 0) r.den = 1;
  return r;
}

inline std::optional<Rational> add(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
              static_cast<__int128>(a.den) * b.den);
}

inline std::optional<Rational> sub(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
              static_cast<__int128>(a.den) * b.den);
}

inline std::optional<Rational> mul(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}

inline std::optional<Rational> div(const Rational& a, const Rational& b) {
  if (b.num == 0) return std::nullopt;
  return make(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num);
}

inline std::optional<Rational> neg(const Rational& a) { return Rational(-a.num, a.den); }

// a^k for integer k (k may be negative when a != 0).
inline std::optional<Rational> pow_int(const Rational& a, long long k) {
  if (k == 0) return Rational(1);
  Rational base = a;
  if (k < 0) {
    if (a.num == 0) return std::nullopt;
    base = Rational(a.den, a.num);
    k = -k;
  }
  if (k > 63) return std::nullopt;
  __int128 n = 1, d = 1;
  for (long long i = 0; i < k; ++i) {
    n *= base.num;
    d *= base.den;
    if (!fits64(n) || !fits64(d)) return std::nullopt;
  }
  return make(n, d);
}

// Nearest rational with denominator at most max_den (continued fractions);
// nullopt when no such rational lies within tol of x.
inline std::optional<Rational> from_double(double x, double tol, long long max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(r);
    if (fl > 9e17 || fl < -9e17) return std::nullopt;
    long long a = static_cast<long long>(fl);
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = r - fl;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  if (q1 == 0) return std::nullopt;
  Rational cand(p1, q1);
  if (std::abs(cand.to_double() - x) > tol * (1.0 + std::abs(x))) return std::nullopt;
  return cand;
}

// Exact integer q-th root of a nonnegative 64-bit value, if one exists.
inline std::optional<long long> iroot(long long v, long long q) {
  if (v < 0) return std::nullopt;
  if (v == 0 || v == 1) return v;
  long long r = static_cast<long long>(std::llround(std::pow(static_cast<double>(v), 1.0 / q)));
  for (long long c = r > 1 ? r - 1 : 0; c <= r + 1; ++c) {
    __int128 acc = 1;
    for (long long i = 0; i < q; ++i) acc *= c;
    if (acc == v) return c;
  }
  return std::nullopt;
}

}  // namespace rat
}  // namespace wavered
