#pragma once

// Forward-mode scalar jet carrying value, gradient and Hessian with respect
// to the two midplane coordinates. Catalog metrics are written once as jet
// expressions, which gives analytic first and second metric derivatives to
// the curvature pipeline (finite differences remain as the fallback and as
// the cross-check path for user-sampled metrics).

#include "prestrain/core.hpp"

#include <cmath>

namespace prestrain {

struct Jet2 {
  double v = 0.0;
  Vec2 g = Vec2::Zero();
  Mat2 h = Mat2::Zero();

  Jet2() = default;
  Jet2(double value) : v(value) {}
  Jet2(double value, const Vec2& grad, const Mat2& hess) : v(value), g(grad), h(hess) {}

  // Coordinate variable x_axis (axis 0 or 1) at value `value`.
  static Jet2 variable(double value, int axis) {
    Jet2 j(value);
    j.g[axis] = 1.0;
    return j;
  }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.v + b.v, a.g + b.g, a.h + b.h}; }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.v - b.v, a.g - b.g, a.h - b.h}; }
inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.g, -a.h}; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Mat2 cross = a.g * b.g.transpose();
  return {a.v * b.v, a.v * b.g + b.v * a.g, a.v * b.h + b.v * a.h + cross + cross.transpose()};
}

inline Jet2 operator+(const Jet2& a, double c) { return {a.v + c, a.g, a.h}; }
inline Jet2 operator+(double c, const Jet2& a) { return a + c; }
inline Jet2 operator-(const Jet2& a, double c) { return {a.v - c, a.g, a.h}; }
inline Jet2 operator-(double c, const Jet2& a) { return {c - a.v, -a.g, -a.h}; }
inline Jet2 operator*(const Jet2& a, double c) { return {a.v * c, a.g * c, a.h * c}; }
inline Jet2 operator*(double c, const Jet2& a) { return a * c; }

// Composition with a univariate u: (u o f)'' = u''(f) grad f (x) grad f + u'(f) hess f.
inline Jet2 compose(const Jet2& f, double u, double du, double ddu) {
  return {u, du * f.g, du * f.h + ddu * (f.g * f.g.transpose())};
}

inline Jet2 inverse(const Jet2& a) {
  double iv = 1.0 / a.v;
  return compose(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inverse(b); }
inline Jet2 operator/(const Jet2& a, double c) { return a * (1.0 / c); }
inline Jet2 operator/(double c, const Jet2& a) { return inverse(a) * c; }

inline Jet2 sqrt(const Jet2& a) {
  double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet2 exp(const Jet2& a) {
  double e = std::exp(a.v);
  return compose(a, e, e, e);
}

inline Jet2 log(const Jet2& a) {
  return compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}

inline Jet2 sin(const Jet2& a) {
  return compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
}

inline Jet2 cos(const Jet2& a) {
  return compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
}

inline Jet2 pow_int(const Jet2& a, int n) {
  Jet2 r(1.0);
  for (int k = 0; k < n; ++k) r = r * a;
  return r;
}

// Two-argument arctangent. Derivatives come from atan(y/x) or -atan(x/y),
// whichever denominator is better conditioned; the branch constant has zero
// derivatives so only the value needs atan2 itself.
inline Jet2 atan2(const Jet2& y, const Jet2& x) {
  double value = std::atan2(y.v, x.v);
  Jet2 t = (std::abs(x.v) >= std::abs(y.v)) ? y / x : x / y;
  double d = 1.0 / (1.0 + t.v * t.v);
  double dd = -2.0 * t.v * d * d;
  Jet2 branch = compose(t, 0.0, d, dd);
  if (std::abs(x.v) < std::abs(y.v)) branch = -branch;
  branch.v = value;
  return branch;
}

// Quadratic polynomial c00 + c10 x1 + c01 x2 + c20 x1^2 + c11 x1 x2 + c02 x2^2.
// This is the user-parameterizable profile family for the catalog metrics.
struct Poly2 {
  double c00 = 0, c10 = 0, c01 = 0, c20 = 0, c11 = 0, c02 = 0;

  double operator()(const Point2& p) const {
    return c00 + c10 * p[0] + c01 * p[1] + c20 * p[0] * p[0] + c11 * p[0] * p[1] +
           c02 * p[1] * p[1];
  }

  Jet2 eval(const Jet2& x1, const Jet2& x2) const {
    return c00 + c10 * x1 + c01 * x2 + c20 * x1 * x1 + c11 * x1 * x2 + c02 * x2 * x2;
  }

  bool is_constant() const {
    return c10 == 0 && c01 == 0 && c20 == 0 && c11 == 0 && c02 == 0;
  }
};

}  // namespace prestrain
