#pragma once

// Second-order forward-mode jets: value, gradient and Hessian propagated
// exactly through arithmetic and the elementary functions used by the
// manufactured solutions.

#include <cmath>
#include <limits>

#include "bifluid/model.hpp"

namespace bifluid {

struct Jet {
  double v = 0.0;
  Vec3 g{};
  Tensor3 H{};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly

  /// Coordinate a of the point x, seeded with unit gradient.
  static Jet coordinate(const Vec3& x, int a) {
    Jet j(x[a]);
    j.g[a] = 1.0;
    return j;
  }
};

/// Jet of d_a f. Its Hessian would need third derivatives and is set to NaN,
/// so only first derivatives of the result may be used.
inline Jet partial(const Jet& f, int a) {
  Jet d(f.g[a]);
  for (int b = 0; b < 3; ++b) d.g[b] = f.H[a][b];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& row : d.H) row = {nan, nan, nan};
  return d;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r(a.v + b.v);
  for (int i = 0; i < 3; ++i) {
    r.g[i] = a.g[i] + b.g[i];
    for (int k = 0; k < 3; ++k) r.H[i][k] = a.H[i][k] + b.H[i][k];
  }
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r(-a.v);
  for (int i = 0; i < 3; ++i) {
    r.g[i] = -a.g[i];
    for (int k = 0; k < 3; ++k) r.H[i][k] = -a.H[i][k];
  }
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.v * b.v);
  for (int i = 0; i < 3; ++i) {
    r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int k = 0; k < 3; ++k)
      r.H[i][k] = a.H[i][k] * b.v + a.g[i] * b.g[k] + a.g[k] * b.g[i] + a.v * b.H[i][k];
  }
  return r;
}

/// Chain rule for a scalar function with derivatives f0, f1, f2 at a.v.
inline Jet compose(const Jet& a, double f0, double f1, double f2) {
  Jet r(f0);
  for (int i = 0; i < 3; ++i) {
    r.g[i] = f1 * a.g[i];
    for (int k = 0; k < 3; ++k) r.H[i][k] = f1 * a.H[i][k] + f2 * a.g[i] * a.g[k];
  }
  return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  const double inv = 1.0 / b.v;
  return a * compose(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet sin(const Jet& a) { return compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}
inline Jet pow(const Jet& a, double p) {
  return compose(a, std::pow(a.v, p), p * std::pow(a.v, p - 1.0), p * (p - 1.0) * std::pow(a.v, p - 2.0));
}

inline double laplacian(const Jet& a, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a.H[i][i];
  return s;
}

}  // namespace bifluid
