#pragma once
// Fourth-order Magnus step for Y' = [[0,1],[q(x),0]] Y with two Gauss nodes.
// Exact when q is constant, so the error does not grow with |lambda|.

#include <cmath>
#include <complex>
#include <type_traits>

namespace trf::magnus {

inline const double kGauss1 = 0.5 - std::sqrt(3.0) / 6.0;
inline const double kGauss2 = 0.5 + std::sqrt(3.0) / 6.0;
inline const double kComm = std::sqrt(3.0) / 12.0;

// cosh(sqrt(z)) and sinh(sqrt(z))/sqrt(z); both entire in z.
template <class T>
inline void cosh_sinhc(T z, T& c, T& s) {
  if (std::abs(z) < 1e-3) {
    c = 1.0 + z / 2.0 * (1.0 + z / 12.0 * (1.0 + z / 30.0));
    s = 1.0 + z / 6.0 * (1.0 + z / 20.0 * (1.0 + z / 42.0));
    return;
  }
  if constexpr (std::is_same_v<T, double>) {
    if (z > 0) {
      const double r = std::sqrt(z);
      c = std::cosh(r);
      s = std::sinh(r) / r;
    } else {
      const double r = std::sqrt(-z);
      c = std::cos(r);
      s = std::sin(r) / r;
    }
  } else {
    const T r = std::sqrt(z);
    c = std::cosh(r);
    s = std::sinh(r) / r;
  }
}

// q1, q2 at the two Gauss nodes of the step; dir = -1 applies the inverse map.
template <class T>
inline void step(T q1, T q2, double h, int dir, T& y, T& dy) {
  const T alpha = kComm * h * h * (q1 - q2);
  const T qbar = 0.5 * (q1 + q2);
  T c, s;
  cosh_sinhc<T>(alpha * alpha + h * h * qbar, c, s);
  const double sg = dir;
  const T m11 = c + sg * s * alpha, m12 = sg * s * h, m21 = sg * s * h * qbar, m22 = c - sg * s * alpha;
  const T ny = m11 * y + m12 * dy;
  dy = m21 * y + m22 * dy;
  y = ny;
}

}  // namespace trf::magnus
