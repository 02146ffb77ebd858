#pragma once

// Second-order dual numbers: value, two first-derivative channels and the
// mixed second derivative. Seeding e1 along input i and e2 along input j
// yields d(f)/di in d1 and d2(f)/didj in d12 after one evaluation.

#include <cmath>
#include <stdexcept>

namespace ctax {

struct HyperDual {
  double v{0.0};    // value
  double d1{0.0};   // e1 component
  double d2{0.0};   // e2 component
  double d12{0.0};  // e1*e2 component

  HyperDual() = default;
  HyperDual(double value) : v(value) {}
  HyperDual(double value, double e1, double e2, double e12)
      : v(value), d1(e1), d2(e2), d12(e12) {}
};

inline double value(double x) { return x; }
inline double value(const HyperDual& x) { return x.v; }

inline HyperDual operator+(const HyperDual& a, const HyperDual& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
}
inline HyperDual operator-(const HyperDual& a, const HyperDual& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
}
inline HyperDual operator-(const HyperDual& a) {
  return {-a.v, -a.d1, -a.d2, -a.d12};
}
inline HyperDual operator*(const HyperDual& a, const HyperDual& b) {
  return {a.v * b.v,
          a.v * b.d1 + a.d1 * b.v,
          a.v * b.d2 + a.d2 * b.v,
          a.v * b.d12 + a.d12 * b.v + a.d1 * b.d2 + a.d2 * b.d1};
}
inline HyperDual operator/(const HyperDual& a, const HyperDual& b) {
  const double inv = 1.0 / b.v;
  const double inv2 = inv * inv;
  // a * b^{-1}, with (1/b) expanded to second order
  HyperDual binv{inv, -b.d1 * inv2, -b.d2 * inv2,
                 2.0 * b.d1 * b.d2 * inv2 * inv - b.d12 * inv2};
  return a * binv;
}

inline HyperDual operator+(const HyperDual& a, double b) { return a + HyperDual(b); }
inline HyperDual operator+(double a, const HyperDual& b) { return HyperDual(a) + b; }
inline HyperDual operator-(const HyperDual& a, double b) { return a - HyperDual(b); }
inline HyperDual operator-(double a, const HyperDual& b) { return HyperDual(a) - b; }
inline HyperDual operator*(const HyperDual& a, double b) { return a * HyperDual(b); }
inline HyperDual operator*(double a, const HyperDual& b) { return HyperDual(a) * b; }
inline HyperDual operator/(const HyperDual& a, double b) { return a / HyperDual(b); }
inline HyperDual operator/(double a, const HyperDual& b) { return HyperDual(a) / b; }

// Chain rule for a scalar function with known first and second derivative.
inline HyperDual compose(const HyperDual& x, double f, double fp, double fpp) {
  return {f, fp * x.d1, fp * x.d2, fp * x.d12 + fpp * x.d1 * x.d2};
}

inline HyperDual exp(const HyperDual& x) {
  const double e = std::exp(x.v);
  return compose(x, e, e, e);
}
inline HyperDual log(const HyperDual& x) {
  if (x.v <= 0.0) throw std::domain_error("ctax: log of non-positive value");
  return compose(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v));
}
inline HyperDual pow(const HyperDual& x, double p) {
  if (x.v < 0.0) throw std::domain_error("ctax: pow of negative base");
  const double f = std::pow(x.v, p);
  const double fp = (p == 0.0) ? 0.0 : p * std::pow(x.v, p - 1.0);
  const double fpp = (p == 0.0 || p == 1.0) ? 0.0 : p * (p - 1.0) * std::pow(x.v, p - 2.0);
  return compose(x, f, fp, fpp);
}
inline HyperDual sqrt(const HyperDual& x) { return pow(x, 0.5); }

}  // namespace ctax
