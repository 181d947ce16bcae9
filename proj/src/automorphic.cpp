#include "trf/automorphic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace trf::autom {

using numkit::KahanSum;

namespace {

void check_point(cplx z, const char* who) {
  if (!(z.imag() > 0.0) || !std::isfinite(z.real()))
    throw DomainError(std::string(who) + ": point must lie in the upper half-plane");
}

// (1/4pi) B(s, s) u^{-s} 2F1(s, s; 2s; -1/u) and its termwise integral over [U, inf)
struct PhiKernel {
  cplx s;
  cplx beta_over_4pi;
  explicit PhiKernel(cplx s_) : s(s_) {
    if (!(s.real() > 0.0)) throw DomainError("free_kernel_phi: needs re s > 0");
    beta_over_4pi = std::exp(2.0 * numkit::lgamma_c(s) - numkit::lgamma_c(2.0 * s)) / (4.0 * kPi);
  }

  cplx operator()(double u) const {
    if (!(u > 0.0)) throw DomainError("free_kernel_phi: logarithmic singularity at u = 0");
    if (u > 2.0) {
      cplx term = 1.0, sum = 1.0;
      for (int k = 0; k < 400; ++k) {
        term *= (s + double(k)) * (s + double(k)) / ((2.0 * s + double(k)) * double(k + 1)) * (-1.0 / u);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
      }
      return beta_over_4pi * std::pow(u, -s) * sum;
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    auto g = [&](double t) { return std::pow(t * (1.0 - t), s - 1.0) * std::pow(t + u, -s); };
    const double re = ts.integrate([&](double t) { return g(t).real(); }, 0.0, 1.0, 1e-14);
    const double im = s.imag() == 0.0 ? 0.0 : ts.integrate([&](double t) { return g(t).imag(); }, 0.0, 1.0, 1e-14);
    return cplx(re, im) / (4.0 * kPi);
  }

  // int_U^inf phi(u) du, re s > 1, U > 2
  cplx tail_integral(double U) const {
    cplx term = 1.0, sum = 0.0;
    for (int k = 0; k < 400; ++k) {
      const cplx piece = term * std::pow(U, 1.0 - s - double(k)) / (s + double(k) - 1.0);
      sum += piece;
      if (std::abs(piece) < 1e-17 * std::abs(sum)) break;
      term *= -(s + double(k)) * (s + double(k)) / ((2.0 * s + double(k)) * double(k + 1));
    }
    return beta_over_4pi * sum;
  }
};

long gcd_l(long a, long b) { return std::gcd(std::labs(a), std::labs(b)); }

// smallest witness that d is not fundamental
std::string non_fundamental_witness(long d) {
  const long r4 = ((d % 4) + 4) % 4;
  if (r4 == 2 || r4 == 3) return "d = " + std::to_string(r4) + " (mod 4)";
  auto square_factor = [](long m) -> long {
    m = std::labs(m);
    for (long p = 2; p * p <= m; ++p)
      if (m % (p * p) == 0) return p;
    return 0;
  };
  if (r4 == 1) return std::to_string(square_factor(d)) + "^2 divides d";
  const long m = d / 4;
  const long m4 = ((m % 4) + 4) % 4;
  if (m4 == 1) return "d/4 = 1 (mod 4)";
  if (m4 == 0) return "4 divides d/4";
  return std::to_string(square_factor(m)) + "^2 divides d/4";
}

cplx divisor_power_sum(long n, cplx p) {
  cplx acc = 0.0;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    acc += std::pow(double(d), p);
    if (d * d != n) acc += std::pow(double(n / d), p);
  }
  return acc;
}

void check_s_for_eisenstein(cplx s) {
  for (double pole : {0.0, 0.5, 1.0})
    if (std::abs(s - pole) < 1e-12) throw DomainError("eisenstein: s at a pole of c(s) or xi(2s)^{-1}");
}

}  // namespace

double point_pair_u(cplx z, cplx w) {
  check_point(z, "point_pair_u");
  check_point(w, "point_pair_u");
  return std::norm(z - w) / (4.0 * z.imag() * w.imag());
}

cplx free_kernel_phi(double u, cplx s) { return PhiKernel(s)(u); }

bool in_fundamental_domain(cplx z, double tol) {
  return z.imag() > 0.0 && std::fabs(z.real()) <= 0.5 + tol && std::norm(z) >= 1.0 - tol;
}

Reduction reduce_point(cplx z) {
  check_point(z, "reduce_point");
  Reduction r{z, 0};
  for (int guard = 0; guard < 10000; ++guard) {
    const double k = std::round(r.z.real());
    if (k != 0.0 && std::fabs(r.z.real()) > 0.5) {
      r.z -= k;
      r.word_length += static_cast<int>(std::fabs(k));
    }
    if (std::norm(r.z) < 1.0 - 1e-14) {
      r.z = -1.0 / r.z;
      ++r.word_length;
    } else {
      return r;
    }
  }
  throw ConvergenceError("reduce_point: no termination", r.z);
}

cplx to_modular_figure(cplx z) {
  if (std::fabs(z.real() + 0.5) < 1e-12) z += 1.0;
  if (z.real() < 0.0 && std::norm(z) <= 1.0 + 1e-12) z = -std::conj(z);
  return z;
}

cplx QuadForm::root() const {
  const double d = double(discriminant());
  if (!(d < 0.0) || a <= 0) throw DomainError("QuadForm::root: form is not positive definite");
  return cplx(-double(b), std::sqrt(-d)) / (2.0 * double(a));
}

HeegnerSet reduced_forms(long d) {
  if (d >= 0) throw DomainError("reduced_forms: d must be negative");
  if (!numkit::is_fundamental_discriminant(d))
    throw DomainError("reduced_forms: d = " + std::to_string(d) + " is not fundamental (" + non_fundamental_witness(d) + ")");
  HeegnerSet set;
  set.d = d;
  set.w = d == -3 ? 6 : d == -4 ? 4 : 2;
  const long amax = static_cast<long>(std::sqrt(double(-d) / 3.0)) + 1;
  for (long a = 1; a <= amax; ++a) {
    for (long b = -a + 1; b <= a; ++b) {
      const long num = b * b - d;
      if (num % (4 * a)) continue;
      const long c = num / (4 * a);
      if (c < a || (c == a && b < 0)) continue;
      if (std::gcd(gcd_l(a, b), c) != 1) continue;
      QuadForm f{a, b, c};
      set.forms.push_back(f);
      set.points.push_back(to_modular_figure(f.root()));
    }
  }
  set.h = static_cast<int>(set.forms.size());
  return set;
}

EisensteinValue eisenstein_fourier(cplx z, cplx s, double tol) {
  check_point(z, "eisenstein_fourier");
  check_s_for_eisenstein(s);
  const cplx zr = reduce_point(z).z;
  const double x = zr.real(), y = zr.imag();
  const cplx nu = s - 0.5;
  const cplx pref = 4.0 * std::sqrt(y) / numkit::xi_completed(2.0 * s);
  const cplx head = std::pow(y, s) + numkit::scattering_c(s) * std::pow(y, 1.0 - s);
  const double a = std::fabs(nu.real());
  // |K_nu(t)| <= K_{re nu}(t) <~ sqrt(pi/2t) e^{-t + a^2/(2t)}; |sigma_{1-2s}(n)| <= 2 sqrt(n) n^{max(0, 1-2 re s)}
  auto mode_bound = [&](long n) {
    const double t = 2.0 * kPi * double(n) * y;
    return std::abs(pref) * 2.0 * std::sqrt(double(n)) * std::pow(double(n), std::max(0.0, 1.0 - 2.0 * s.real())) *
           std::pow(double(n), s.real() - 0.5) * std::sqrt(kPi / (2.0 * t)) * std::exp(-t + a * a / (2.0 * t));
  };
  const double ratio = std::exp(-2.0 * kPi * y);
  KahanSum series;
  EisensteinValue out;
  const double scale = std::abs(std::pow(y, s));
  for (long n = 1; n < 100000; ++n) {
    const cplx term = divisor_power_sum(n, 1.0 - 2.0 * s) * std::pow(double(n), nu) *
                      numkit::bessel_K(nu, 2.0 * kPi * double(n) * y) * std::cos(2.0 * kPi * double(n) * x);
    series.add(term);
    out.terms = static_cast<int>(n);
    const double tail = mode_bound(n + 1) / (1.0 - ratio);
    if (2.0 * kPi * double(n) * y > a * a && tail < tol * scale) {
      out.tail_bound = tail;
      break;
    }
  }
  out.value = head + pref * series.sum;
  return out;
}

EisensteinValue eisenstein_lattice(cplx z, cplx s, int window, int rows) {
  check_point(z, "eisenstein_lattice");
  if (!(s.real() > 1.0)) throw DomainError("eisenstein_lattice: the lattice sum diverges for re s <= 1");
  if (window < 8) throw DomainError("eisenstein_lattice: window too small for the Euler-Maclaurin tails");
  const double x = z.real(), y = z.imag();
  if (rows <= 0) rows = static_cast<int>(std::ceil(45.0 / (2.0 * kPi * y))) + 2;

  const cplx s2 = 2.0 * s;
  // f(u) = (u^2 + B^2)^{-s} and the tail sum_{j >= 0} f(u0 + j)
  auto tail = [&](double u0, double B) {
    const double g = u0 * u0 + B * B;
    const cplx f = std::pow(g, -s);
    const cplx f1 = -s2 * u0 * f / g;
    const cplx f3 = 12.0 * s * (s + 1.0) * u0 * f / (g * g) - 8.0 * s * (s + 1.0) * (s + 2.0) * u0 * u0 * u0 * f / (g * g * g);
    // int_{u0}^inf (u^2 + B^2)^{-s} du = u0^{1-2s}/(2s-1) 2F1(s, s-1/2; s+1/2; -B^2/u0^2)
    const double r = -(B * B) / (u0 * u0);
    cplx term = 1.0, hyp = 1.0;
    for (int k = 0; k < 200; ++k) {
      term *= (s + double(k)) * (s - 0.5 + double(k)) / ((s + 0.5 + double(k)) * double(k + 1)) * r;
      hyp += term;
      if (std::abs(term) < 1e-18 * std::abs(hyp)) break;
    }
    const cplx integral = std::pow(u0, 1.0 - s2) / (s2 - 1.0) * hyp;
    return integral + 0.5 * f - f1 / 12.0 + f3 / 720.0;
  };

  KahanSum near;
  double em_bound = 0.0;
  for (int n = 1; n <= rows; ++n) {
    const double a = n * x, B = n * y;
    if (B > 0.5 * window) throw DomainError("eisenstein_lattice: window too small for the row height");
    const long lo = static_cast<long>(std::ceil(a - window)), hi = static_cast<long>(std::floor(a + window));
    for (long m = lo; m <= hi; ++m) near.add(std::pow((m - a) * (m - a) + B * B, -s));
    near.add(tail(double(hi + 1) - a, B));
    near.add(tail(a - double(lo - 1), B));
    // next Euler-Maclaurin term, f^(5)/30240, on both sides
    double p = 1.0;
    for (int j = 0; j < 5; ++j) p *= std::abs(s2 + double(j));
    em_bound += 2.0 * p * std::pow(double(window), -2.0 * s.real() - 5.0) / 30240.0;
  }
  // rows |n| > rows: sum_m f = sqrt(pi) Gamma(s-1/2)/Gamma(s) (n y)^{1-2s} + O(e^{-2 pi n y})
  const cplx cs = std::sqrt(kPi) * std::exp(numkit::lgamma_c(s - 0.5) - numkit::lgamma_c(s));
  cplx hz = numkit::zeta_c(s2 - 1.0);
  for (int k = 1; k <= rows; ++k) hz -= std::pow(double(k), 1.0 - s2);
  const cplx far = cs * std::pow(y, 1.0 - s2) * hz;

  const cplx ys = std::pow(y, s);
  EisensteinValue out;
  out.value = ys + ys / numkit::zeta_c(s2) * (near.sum + far);
  out.terms = rows;
  const double far_err = 4.0 * std::abs(cs) * std::exp(-2.0 * kPi * (rows + 1) * y);
  out.tail_bound = std::abs(ys / numkit::zeta_c(s2)) * (em_bound + far_err);
  return out;
}

ResolventSeries automorphic_resolvent_series(cplx z, cplx zp, cplx s, double u_max) {
  check_point(z, "automorphic_resolvent_series");
  check_point(zp, "automorphic_resolvent_series");
  if (!(s.real() > 1.0)) throw DomainError("automorphic_resolvent_series: needs re s > 1");
  if (!(u_max > 2.0)) throw DomainError("automorphic_resolvent_series: u_max must exceed 2");
  if (std::abs(to_modular_figure(reduce_point(z).z) - to_modular_figure(reduce_point(zp).z)) < 1e-9)
    throw DomainError("automorphic_resolvent_series: z and z' are equivalent under the group");

  const PhiKernel phi(s);
  const double x = z.real(), y = z.imag(), xp = zp.real(), yp = zp.imag();
  ResolventSeries out;
  KahanSum acc;
  // all translates w + k of one coset with u(z, w + k) <= u_max
  auto coset = [&](cplx w) {
    const double yw = w.imag();
    const double room = 4.0 * u_max * y * yw - (y - yw) * (y - yw);
    if (room < 0.0) return;
    const double r = std::sqrt(room);
    const long k0 = static_cast<long>(std::ceil(x - w.real() - r)), k1 = static_cast<long>(std::floor(x - w.real() + r));
    for (long k = k0; k <= k1; ++k) {
      const double u = point_pair_u(z, w + double(k));
      if (u > u_max) continue;
      acc.add(phi(u));
      ++out.terms;
    }
  };
  coset(zp);
  // u <= u_max forces im(gamma z') >= y rho with (1 - rho)^2 = 4 u_max rho
  const double t = 2.0 * u_max + 1.0;
  const double rho = 1.0 / (t + std::sqrt(t * t - 1.0));
  const double bound = yp / (y * rho);  // on |c z' + d|^2
  for (long c = 1; double(c * c) * yp * yp <= bound; ++c) {
    const double rad = std::sqrt(bound - double(c * c) * yp * yp);
    const long d0 = static_cast<long>(std::ceil(-c * xp - rad)), d1 = static_cast<long>(std::floor(-c * xp + rad));
    for (long d = d0; d <= d1; ++d) {
      if (gcd_l(c, d) != 1) continue;
      // a d - b c = 1 by the extended Euclid step
      long r0 = d, r1 = c, s0 = 1, s1 = 0;
      while (r1 != 0) {
        const long q = r0 / r1;
        std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
        std::tie(s0, s1) = std::pair{s1, s0 - q * s1};
      }
      // s0 d + t c = r0 = +-1
      const long a = s0 * r0;
      const long b = -((1 - a * d) / c);
      coset((double(a) * zp + double(b)) / (double(c) * zp + double(d)));
    }
  }
  out.direct = acc.sum;
  out.tail = 12.0 * phi.tail_integral(u_max);
  out.value = out.direct + out.tail;
  return out;
}

DedekindZeta dedekind_zeta(long d, cplx s) {
  if (std::abs(s - 1.0) < 1e-6) throw DomainError("dedekind_zeta: s too close to the pole at 1");
  const HeegnerSet set = reduced_forms(d);
  KahanSum e;
  for (cplx zq : set.points) e.add(eisenstein_fourier(zq, s).value);
  DedekindZeta out;
  out.h = set.h;
  out.w = set.w;
  out.via_heegner = 2.0 / double(set.w) * std::pow(double(-d) / 4.0, -s / 2.0) * numkit::zeta_c(2.0 * s) * e.sum;
  out.via_factorization = numkit::zeta_c(s) * numkit::dirichlet_L_quadratic(s, d);
  out.difference = std::abs(out.via_heegner - out.via_factorization);
  return out;
}

DeuringCheck deuring_limit_check(long d, cplx s) {
  const HeegnerSet set = reduced_forms(d);
  if (set.h != 1) throw DomainError("deuring_limit_check: h(d) = " + std::to_string(set.h) + ", not one");
  if (std::abs(s - 1.0) < 1e-6) throw DomainError("deuring_limit_check: s too close to the pole at 1");
  DeuringCheck out;
  out.zeta_k = numkit::zeta_c(s) * numkit::dirichlet_L_quadratic(s, d);
  // the unit count enters as 2/w; the classical statement has w = 2
  out.two_term = 2.0 / double(set.w) * numkit::zeta_c(2.0 * s) *
                 (1.0 + numkit::scattering_c(s) * std::pow(double(-d) / 4.0, 0.5 - s));
  out.residual = std::abs(out.zeta_k - out.two_term);
  out.height = set.points[0].imag();
  return out;
}

double mu_star(const Box& box) {
  if (!(box.x0 <= box.x1) || !(box.y0 <= box.y1) || box.x0 < -0.5 - 1e-12 || box.x1 > 0.5 + 1e-12)
    throw DomainError("mu_star: box must sit inside |x| <= 1/2");
  const double x0 = std::max(box.x0, -0.5), x1 = std::min(box.x1, 0.5);
  const double inv_top = std::isfinite(box.y1) ? 1.0 / box.y1 : 0.0;
  auto f = [&](double x) {
    const double floor_y = std::max(box.y0, std::sqrt(std::max(0.0, 1.0 - x * x)));
    return cplx(std::max(0.0, 1.0 / floor_y - inv_top));
  };
  // kinks where the arc crosses y0 or y1
  std::vector<double> cuts{x0, x1};
  for (double level : {box.y0, box.y1})
    if (level < 1.0 && level > 0.0)
      for (double sg : {-1.0, 1.0}) {
        const double c = sg * std::sqrt(1.0 - level * level);
        if (c > x0 && c < x1) cuts.push_back(c);
      }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += numkit::integrate(f, cuts[i], cuts[i + 1], 1e-13).value.real();
  return 3.0 / kPi * total;
}

LinnikStatistic linnik_statistic(const HeegnerSet& set, const Box& box) {
  LinnikStatistic st;
  st.d = set.d;
  st.h = set.h;
  st.mu = mu_star(box);
  for (cplx p : set.points)
    if (p.real() >= box.x0 && p.real() <= box.x1 && p.imag() >= box.y0 && p.imag() <= box.y1) ++st.count;
  st.ratio = double(st.count) / double(st.h);
  st.discrepancy = std::fabs(st.ratio - st.mu);
  return st;
}

LinnikStatistic linnik_statistic(long d, const Box& box) { return linnik_statistic(reduced_forms(d), box); }

long fundamental_discriminant_below(long target) {
  if (target < 3) throw DomainError("fundamental_discriminant_below: target must be at least 3");
  for (long d = -target - 1;; --d)
    if (numkit::is_fundamental_discriminant(d)) return d;
}

std::vector<LinnikStatistic> linnik_ladder(const std::vector<long>& targets, const Box& box) {
  std::vector<LinnikStatistic> out;
  for (long t : targets) out.push_back(linnik_statistic(fundamental_discriminant_below(t), box));
  return out;
}

CuspZone make_cusp_zone(double a, double kappa) {
  if (!(a > 0.0)) throw DomainError("cusp zone: a must be positive");
  if (!(kappa > 1.0)) throw DomainError("cusp zone: kappa must exceed 1");
  return {a, kappa};
}

double CuspZone::t0(double y, double yp) const {
  if (y < a || yp < a) throw DomainError("cusp zone: y, y' must be at least a");
  const double k = kappa;
  return (y <= yp ? std::pow(y, k) * std::pow(yp, 1.0 - k) : std::pow(y, 1.0 - k) * std::pow(yp, k)) / (2.0 * k - 1.0);
}

cplx CuspZone::phi(double y, cplx s) const {
  if (std::abs(s + kappa - 1.0) < 1e-14) throw DomainError("cusp zone: pole at s + kappa - 1 = 0");
  return std::pow(y, s) + std::pow(a, 2.0 * s - 1.0) * (s - kappa) / (s + kappa - 1.0) * std::pow(y, 1.0 - s);
}

cplx CuspZone::dphi(double y, cplx s) const {
  if (std::abs(s + kappa - 1.0) < 1e-14) throw DomainError("cusp zone: pole at s + kappa - 1 = 0");
  return s * std::pow(y, s - 1.0) + std::pow(a, 2.0 * s - 1.0) * (s - kappa) / (s + kappa - 1.0) * (1.0 - s) * std::pow(y, -s);
}

cplx CuspZone::q(double y, double yp, cplx s) const {
  if (y < a || yp < a) throw DomainError("cusp zone: y, y' must be at least a");
  if (std::abs(2.0 * s - 1.0) < 1e-14) throw DomainError("cusp zone: s = 1/2");
  const cplx v = y <= yp ? phi(y, s) * std::pow(yp, 1.0 - s) : std::pow(y, 1.0 - s) * phi(yp, s);
  return v / (2.0 * s - 1.0);
}

cplx CuspZone::boundary_residual(cplx s) const { return kappa * phi(a, s) - a * dphi(a, s); }

}  // namespace trf::autom
