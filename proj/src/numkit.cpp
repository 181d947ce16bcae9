#include "trf/numkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

namespace trf::numkit {

namespace {

// B_{2k} for k = 1..20
constexpr std::array<double, 20> kBernoulli = {
    1.0 / 6,
    -1.0 / 30,
    1.0 / 42,
    -1.0 / 30,
    5.0 / 66,
    -691.0 / 2730,
    7.0 / 6,
    -3617.0 / 510,
    43867.0 / 798,
    -174611.0 / 330,
    854513.0 / 138,
    -236364091.0 / 2730,
    8553103.0 / 6,
    -23749461029.0 / 870,
    8615841276005.0 / 14322,
    -7709321041217.0 / 510,
    2577687858367.0 / 6,
    -26315271553053477373.0 / 1919190,
    2929993913841559.0 / 6,
    -261082718496449122051.0 / 13530,
};

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// Stirling series for log Gamma, good for re z >= 15.
cplx lgamma_stirling(cplx z) {
  const double half_log_2pi = 0.91893853320467274178;
  cplx res = (z - 0.5) * std::log(z) - z + half_log_2pi;
  cplx zinv = 1.0 / z;
  cplx z2inv = zinv * zinv;
  cplx pw = zinv;
  for (int k = 1; k <= 10; ++k) {
    res += kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
    pw *= z2inv;
  }
  return res;
}

// (e^u - 1)/u without cancellation near 0.
cplx expm1_over(cplx u) {
  if (std::abs(u) < 1e-2) {
    cplx term = 1.0, sum = 1.0;
    for (int n = 2; n < 12; ++n) {
      term *= u / double(n);
      sum += term;
    }
    return sum;
  }
  return (std::exp(u) - 1.0) / u;
}

// zeta(s,a) - 1/(s-1), by Euler-Maclaurin. Finite at s = 1.
cplx hurwitz_regular(cplx s, double a) {
  const int N = 15 + static_cast<int>(std::abs(s));
  KahanSum acc;
  for (int n = 0; n < N; ++n) acc.add(std::pow(n + a, -s));
  const double x = N + a;
  const double lx = std::log(x);
  acc.add(0.5 * std::exp(-s * lx));
  acc.add(-lx * expm1_over((1.0 - s) * lx));
  // Bernoulli tail: B_{2k}/(2k)! * s(s+1)...(s+2k-2) * x^{-s-2k+1}
  cplx poch = s;  // rising factorial (s)_{2k-1}
  cplx xp = std::exp(-(s + 1.0) * lx);
  double fact = 2.0;  // (2k)!
  for (int k = 1; k <= 20; ++k) {
    cplx term = kBernoulli[k - 1] / fact * poch * xp;
    acc.add(term);
    if (std::abs(term) < 1e-18 * std::abs(acc.sum)) break;
    poch *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
    xp /= x * x;
    fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
  }
  return acc.sum;
}

bool squarefree(long m) {
  m = std::labs(m);
  for (long p = 2; p * p <= m; ++p) {
    if (m % (p * p) == 0) return false;
    while (m % p == 0) m /= p;
  }
  return true;
}

}  // namespace

QuadratureResult integrate(const RealToComplexFn& f, double lo, double hi, double tol, int max_depth) {
  long count = 0;
  auto counted = [&](double t) {
    ++count;
    return f(t);
  };
  QuadratureResult out;
  if (lo == hi) return out;
  double err = 0.0, l1 = 0.0;
  cplx v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(counted, lo, hi, max_depth, tol,
                                                                         &err, &l1);
  if (!(err <= tol * std::max(1.0, l1))) {
    // Endpoint singularities defeat bisection; tanh-sinh clusters nodes there.
    double err2 = 0.0, l12 = 0.0;
    cplx v2 = v;
    try {
      boost::math::quadrature::tanh_sinh<double> ts(15);
      v2 = ts.integrate(counted, lo, hi, tol, &err2, &l12);
    } catch (const std::exception&) {
      err2 = std::numeric_limits<double>::infinity();
    }
    if (err2 < err) {
      v = v2;
      err = err2;
    }
    if (!(err <= 1e3 * tol * std::max(1.0, l1)) || !std::isfinite(std::abs(v)))
      throw ConvergenceError("quadrature did not reach tolerance", v);
  }
  out.value = v;
  out.abs_error_estimate = err;
  out.evaluations = count;
  return out;
}

QuadratureResult adaptive_quad(const ComplexFn& f, const ContourSpec& c, double tol) {
  if (!(tol > 0)) throw DomainError("adaptive_quad: tol must be positive");
  if (!(c.radius > 0)) throw DomainError("adaptive_quad: indentation radius must be positive");
  std::vector<double> poles = c.poles;
  std::sort(poles.begin(), poles.end());
  for (size_t i = 1; i < poles.size(); ++i)
    if (poles[i] - poles[i - 1] <= 2 * c.radius)
      throw DomainError("adaptive_quad: indentation radius exceeds half the pole spacing");
  QuadratureResult total;
  auto accumulate = [&](const QuadratureResult& r) {
    total.value += r.value;
    total.abs_error_estimate += r.abs_error_estimate;
    total.evaluations += r.evaluations;
  };
  double start = c.lo;
  for (double p : poles) {
    accumulate(integrate([&](double x) { return f(cplx(x, 0.0)); }, start, p - c.radius, tol));
    // z = p + r e^{i th}, th from pi down to 0 (above) or up to 2 pi (below)
    const double th0 = kPi, th1 = c.above ? 0.0 : 2 * kPi;
    const double r = c.radius;
    auto arc = [&](double th) {
      cplx e = std::polar(1.0, th);
      return f(p + r * e) * (kI * r * e);
    };
    accumulate(integrate(arc, th0, th1, tol));
    start = p + c.radius;
  }
  accumulate(integrate([&](double x) { return f(cplx(x, 0.0)); }, start, c.hi, tol));
  return total;
}

double refine_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) throw DomainError("refine_root: bracket has no sign change");
  std::uintmax_t iters = 200;
  auto stop = [tol](double a, double b) { return std::fabs(b - a) <= tol * std::max(1.0, std::fabs(a)); };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
  if (iters >= 200) throw ConvergenceError("refine_root: stagnated", cplx(0.5 * (r.first + r.second)));
  return 0.5 * (r.first + r.second);
}

std::vector<double> find_real_roots(const std::function<double(double)>& f, double lo, double hi,
                                    double step, double tol) {
  if (!(step > 0) || !(hi > lo)) throw DomainError("find_real_roots: bad interval or step");
  std::vector<double> roots;
  double a = lo, fa = f(a);
  if (fa == 0) roots.push_back(a);
  while (a < hi) {
    double b = std::min(a + step, hi);
    double fb = f(b);
    if (fb == 0) {
      roots.push_back(b);
    } else if (fa != 0 && ((fa > 0) != (fb > 0))) {
      roots.push_back(refine_root(f, a, b, tol));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

cplx lgamma_c(cplx z) {
  if (is_nonpositive_integer(z)) throw DomainError("lgamma_c: pole");
  if (z.real() < 0.5) return std::log(gamma_c(z));
  cplx shift = 0.0;
  while (z.real() < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  return lgamma_stirling(z) - shift;
}

cplx gamma_c(cplx z) {
  if (is_nonpositive_integer(z)) throw DomainError("gamma_c: pole at nonpositive integer");
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma_c(1.0 - z));
  cplx prod = 1.0;
  while (z.real() < 15.0) {
    prod *= z;
    z += 1.0;
  }
  return std::exp(lgamma_stirling(z)) / prod;
}

cplx hurwitz_zeta(cplx s, double a) {
  if (s == cplx(1.0, 0.0)) throw DomainError("hurwitz_zeta: pole at s = 1");
  if (!(a > 0)) throw DomainError("hurwitz_zeta: a must be positive");
  return hurwitz_regular(s, a) + 1.0 / (s - 1.0);
}

cplx zeta_c(cplx s) {
  if (s == cplx(1.0, 0.0)) throw DomainError("zeta_c: pole at s = 1");
  if (s.real() < 0.0) {
    // zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
    if (s.imag() == 0.0 && std::fmod(s.real(), 2.0) == 0.0) return 0.0;
    return std::pow(2.0, s) * std::pow(kPi, s - 1.0) * std::sin(kPi * s / 2.0) * gamma_c(1.0 - s) *
           zeta_c(1.0 - s);
  }
  return hurwitz_zeta(s, 1.0);
}

int kronecker(long a, long n) {
  if (n == 0) return std::labs(a) == 1 ? 1 : 0;
  int r = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) r = -r;
  }
  int v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  if (v > 0) {
    if (a % 2 == 0) return 0;
    long a8 = ((a % 8) + 8) % 8;
    if ((v % 2 == 1) && (a8 == 3 || a8 == 5)) r = -r;
  }
  // Jacobi symbol (a/n), n odd
  long m = ((a % n) + n) % n;
  while (m != 0) {
    while (m % 2 == 0) {
      m /= 2;
      long n8 = n % 8;
      if (n8 == 3 || n8 == 5) r = -r;
    }
    std::swap(m, n);
    if (m % 4 == 3 && n % 4 == 3) r = -r;
    m %= n;
  }
  return n == 1 ? r : 0;
}

bool is_fundamental_discriminant(long d) {
  if (d == 0 || d == 1) return false;
  long r4 = ((d % 4) + 4) % 4;
  if (r4 == 1) return squarefree(d);
  if (r4 != 0) return false;
  long m = d / 4;
  long m4 = ((m % 4) + 4) % 4;
  return (m4 == 2 || m4 == 3) && squarefree(m);
}

cplx dirichlet_L_quadratic(cplx s, long d) {
  if (!is_fundamental_discriminant(d) || d == 1)
    throw DomainError("dirichlet_L_quadratic: d is not a fundamental discriminant");
  const long q = std::labs(d);
  // L = q^{-s} sum_a chi(a) zeta(s, a/q); the 1/(s-1) parts cancel since sum chi = 0.
  KahanSum acc;
  for (long a = 1; a < q; ++a) {
    int chi = kronecker(d, a);
    if (chi != 0) acc.add(double(chi) * hurwitz_regular(s, double(a) / double(q)));
  }
  return std::pow(double(q), -s) * acc.sum;
}

cplx bessel_K(cplx nu, double y) {
  if (!(y > 0)) throw DomainError("bessel_K: y must be positive");
  // e^{y} K_nu(y) = int_0^inf exp(-y(cosh t - 1)) cosh(nu t) dt; the integrand is even and
  // entire, so the trapezoid rule converges geometrically in the step.
  const double a = std::fabs(nu.real());
  auto g = [&](double t) { return -y * (std::cosh(t) - 1.0) + a * t; };
  const double tpeak = std::asinh(a / y);
  const double gmax = g(tpeak);
  double T = tpeak + 1.0;
  while (g(T) > gmax - 46.0) T *= 1.25;
  auto f = [&](double t) { return std::exp(-y * (std::cosh(t) - 1.0)) * std::cosh(nu * t); };
  // For imaginary nu the integral cancels down to ~e^{-pi|im nu|/2} of its absolute mass, so the
  // stopping test is also measured against that mass.
  double h = T / 16.0;
  cplx sum = 0.5 * f(0.0);
  double mass = 0.5 * std::abs(sum);
  for (int j = 1; j <= 16; ++j) {
    cplx v = f(j * h);
    sum += v;
    mass += std::abs(v);
  }
  cplx prev = sum * h;
  for (int level = 0; level < 16; ++level) {
    h *= 0.5;
    const int n = static_cast<int>(std::lround(T / h));
    for (int j = 1; j < n; j += 2) {
      cplx v = f(j * h);
      sum += v;
      mass += std::abs(v);
    }
    cplx cur = sum * h;
    double diff = std::abs(cur - prev);
    if (level >= 1 && (diff <= 1e-14 * std::abs(cur) || diff <= 1e-16 * mass * h))
      return std::exp(-y) * cur;
    prev = cur;
  }
  throw ConvergenceError("bessel_K: trapezoid refinement did not settle", std::exp(-y) * prev);
}

cplx xi_completed(cplx s) {
  if (s == cplx(0.0) || s == cplx(1.0)) throw DomainError("xi_completed: pole at s = 0 or 1");
  return std::pow(kPi, -s / 2.0) * gamma_c(s / 2.0) * zeta_c(s);
}

cplx scattering_c(cplx s) { return xi_completed(2.0 * s - 1.0) / xi_completed(2.0 * s); }

}  // namespace trf::numkit
