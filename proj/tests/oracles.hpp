#pragma once
// Reference values computed by routes that share no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

// Gamma(z) = int_0^inf t^{z-1} e^{-t} dt, re z > 0.
inline cplx gamma_integral(cplx z) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [z](double t) -> cplx {
    if (t <= 0) return 0.0;
    return std::exp((z - 1.0) * std::log(t) - t);
  };
  return ts.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

// Borwein's alternating-series acceleration of eta(s), then zeta = eta/(1-2^{1-s}).
inline cplx zeta_borwein(cplx s, int n = 60) {
  std::vector<double> d(n + 1);
  double term = 1.0 / n, acc = term;
  d[0] = acc;
  // d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
  for (int i = 1; i <= n; ++i) {
    term *= double(n + i - 1) * 4.0 * double(n - i + 1) / (double(2 * i - 1) * double(2 * i));
    acc += term;
    d[i] = acc;
  }
  for (auto& x : d) x *= n;
  cplx sum = 0.0;
  for (int k = 0; k < n; ++k) {
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * (d[k] - d[n]) * std::pow(double(k + 1), -s);
  }
  cplx eta = -sum / d[n];
  return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

// L(s, chi) = Gamma(s)^{-1} int_0^inf t^{s-1} sum_a chi(a) e^{-at} / (1 - e^{-qt}) dt for an odd
// character given by its values on 1..q. expm1 keeps the small-t numerator free of cancellation.
inline cplx L_mellin(cplx s, const std::vector<int>& chi) {
  const long q = static_cast<long>(chi.size());
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double t) -> cplx {
    if (t <= 0) return 0.0;
    double num = 0.0;
    for (long a = 1; a <= q; ++a)
      if (chi[a - 1] != 0) num += chi[a - 1] * std::expm1(-double(a) * t);
    return std::exp((s - 1.0) * std::log(t)) * (num / -std::expm1(-double(q) * t));
  };
  cplx head = ts.integrate(f, 0.0, 1.0, 1e-14);
  cplx tail = ts.integrate(f, 1.0, std::numeric_limits<double>::infinity(), 1e-14);
  return (head + tail) / gamma_integral(s);
}

inline double bessel_k_real(double nu, double y) { return boost::math::cyl_bessel_k(nu, y); }


// y'' = (v - lambda) y, y(0)=0, y'(0)=1, classical RK4 with n steps; returns y(pi).
template <class V>
double shoot_rk4(const V& v, double lambda, int n) {
  const double h = pi / n;
  double y = 0.0, p = 1.0, x = 0.0;
  auto acc = [&](double xx, double yy) { return (v(xx) - lambda) * yy; };
  for (int i = 0; i < n; ++i) {
    double k1y = p, k1p = acc(x, y);
    double k2y = p + 0.5 * h * k1p, k2p = acc(x + 0.5 * h, y + 0.5 * h * k1y);
    double k3y = p + 0.5 * h * k2p, k3p = acc(x + 0.5 * h, y + 0.5 * h * k2y);
    double k4y = p + h * k3p, k4p = acc(x + h, y + h * k3y);
    y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    x += h;
  }
  return y;
}

// Green's function of -u'' + (v - lambda) u on [lo, hi], Dirichlet, by second-order finite
// differences on m intervals with the point source at node `is`; solved with the Thomas
// algorithm. Returns G at node `ix`.
template <class V>
double green_fd_on(const V& v, double lambda, double lo, double hi, int ix, int is, int m) {
  const double h = (hi - lo) / m;
  const int n = m - 1;  // interior unknowns
  std::vector<double> a(n, -1.0 / (h * h)), b(n), c(n, -1.0 / (h * h)), r(n, 0.0);
  for (int i = 0; i < n; ++i) b[i] = 2.0 / (h * h) + v(lo + (i + 1) * h) - lambda;
  r[is - 1] = 1.0 / h;
  for (int i = 1; i < n; ++i) {
    double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    r[i] -= w * r[i - 1];
  }
  std::vector<double> u(n);
  u[n - 1] = r[n - 1] / b[n - 1];
  for (int i = n - 2; i >= 0; --i) u[i] = (r[i] - c[i] * u[i + 1]) / b[i];
  return u[ix - 1];
}

template <class V>
double green_fd(const V& v, double lambda, int ix, int is, int m) {
  return green_fd_on(v, lambda, 0.0, pi, ix, is, m);
}

// log Phi_b(z) by integrating (1/4) e^{2itz}/(sinh bt sinh t/b) dt/t along im t = (pi/2) min(b, 1/b),
// which clears the pole at 0 and stays below the next ones. Exponential forms on each half keep sinh
// from overflowing. |im z| < c_b.
inline cplx dilog_log(double b, cplx z) {
  const double d = 0.5 * pi * std::min(b, 1.0 / b), cb = 0.5 * (b + 1.0 / b);
  auto g = [&](double s) -> cplx {
    const cplx t(s, d);
    const cplx u = s >= 0.0 ? t : -t;  // sinh(bt) sinh(t/b) = e^{2 c_b u}(1 - e^{-2bu})(1 - e^{-2u/b})/4
    return std::exp(2.0 * cplx(0, 1) * t * z - 2.0 * cb * u) / ((1.0 - std::exp(-2.0 * b * u)) * (1.0 - std::exp(-2.0 * u / b)) * t);
  };
  boost::math::quadrature::exp_sinh<double> es;
  const double inf = std::numeric_limits<double>::infinity();
  return es.integrate([&](double s) { return g(s); }, 0.0, inf, 1e-14) +
         es.integrate([&](double s) { return g(-s); }, 0.0, inf, 1e-14);
}

// chi_d on 1..|d| for d = -4, -8, or -q with q = 3 (mod 4) prime (then chi_d(a) is the Legendre
// symbol (a/q), by Euler's criterion).
inline std::vector<int> quadratic_character(long d) {
  const long q = -d;
  std::vector<int> chi(q);
  for (long a = 1; a <= q; ++a) {
    if (d == -4) {
      chi[a - 1] = a % 2 == 0 ? 0 : (a % 4 == 1 ? 1 : -1);
    } else if (d == -8) {
      const long r = a % 8;
      chi[a - 1] = r % 2 == 0 ? 0 : (r == 1 || r == 3 ? 1 : -1);
    } else {
      long e = (q - 1) / 2, base = a % q, acc = 1;
      while (e > 0) {
        if (e & 1) acc = acc * base % q;
        base = base * base % q;
        e >>= 1;
      }
      chi[a - 1] = acc == 0 ? 0 : (acc == 1 ? 1 : -1);
    }
  }
  return chi;
}

// h(d) = -(w/(2|d|)) sum_{a < |d|} chi_d(a) a
inline long class_number_dirichlet(long d, int w) {
  const auto chi = quadratic_character(d);
  long acc = 0;
  for (long a = 1; a <= -d; ++a) acc += chi[a - 1] * a;
  return -w * acc / (2 * -d);
}

// sum over 0 < m^2 + n^2 <= M^2 of (m^2 + n^2)^{-2} with a two-sided bound on the rest: every
// lattice point p outside radius M owns the unit square around it, on which |q| is within
// sqrt(2)/2 of |p|.
struct Bracket {
  double lo, hi;
};
inline Bracket gaussian_lattice_sum_s2(long M) {
  double sum = 0.0, comp = 0.0;
  for (long m = -M; m <= M; ++m)
    for (long n = -M; n <= M; ++n) {
      const long r2 = m * m + n * n;
      if (r2 == 0 || r2 > M * M) continue;
      const double y = 1.0 / double(r2 * r2) - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
  const double h = std::sqrt(0.5);
  // the squares of outside points cover |q| > M + h and lie in |q| > M - h
  auto tail = [&](double inner, double shift) {
    // 2 pi int_inner^inf r (r + shift)^{-4} dr
    const double a = inner + shift;
    return 2.0 * pi * (1.0 / (2.0 * a * a) - shift / (3.0 * a * a * a));
  };
  return {sum + tail(double(M) + h, h), sum + tail(double(M) - h, -h)};
}

// R0(x) = int e^{2 pi i p x}/(2 cosh(2 pi b p) - lambda) dp straight from the Fourier side, lambda = 2 cosh(2 pi b k)
inline cplx free_kernel_fourier(double b, cplx k, double x) {
  const cplx lam = 2.0 * std::cosh(2.0 * pi * b * k);
  boost::math::quadrature::exp_sinh<double> es;
  auto g = [&](double p) { return 2.0 * std::cos(2.0 * pi * p * x) / (2.0 * std::cosh(2.0 * pi * b * p) - lam); };
  const double inf = std::numeric_limits<double>::infinity();
  return {es.integrate([&](double p) { return g(p).real(); }, 0.0, inf, 1e-13),
          es.integrate([&](double p) { return g(p).imag(); }, 0.0, inf, 1e-13)};
}

}  // namespace oracle
