#include "trf/qdiff.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

namespace trf::qdiff {

namespace {

using GL = boost::math::quadrature::gauss<double, 20>;

// Composite 20-point Gauss on [lo, hi] in panels no wider than `width`.
template <class F>
cplx panels(const F& f, double lo, double hi, double width) {
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
  const double h = (hi - lo) / n;
  numkit::KahanSum sum;
  const auto& x = GL::abscissa();
  const auto& w = GL::weights();
  for (int j = 0; j < n; ++j) {
    const double c = lo + (j + 0.5) * h, r = 0.5 * h;
    cplx s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      s += w[i] * f(c + r * x[i]);
      if (x[i] != 0.0) s += w[i] * f(c - r * x[i]);
    }
    sum.add(s * r);
  }
  return sum.sum;
}

// (sin w / w - 1)/w^2
cplx sinc_defect(cplx w) {
  const cplx w2 = w * w;
  if (std::abs(w) < 0.5)
    return -1.0 / 6 + w2 * (1.0 / 120 + w2 * (-1.0 / 5040 + w2 * (1.0 / 362880 + w2 * (-1.0 / 39916800 + w2 / 6227020800.0))));
  return (std::sin(w) / w - 1.0) / w2;
}

// (sinh u / u - 1)/u^2
double sinhc_defect(double u) {
  const double u2 = u * u;
  if (std::fabs(u) < 0.5)
    return 1.0 / 6 + u2 * (1.0 / 120 + u2 * (1.0 / 5040 + u2 * (1.0 / 362880 + u2 * (1.0 / 39916800 + u2 / 6227020800.0))));
  return (std::sinh(u) / u - 1.0) / u2;
}

// log(1 + e^u)
cplx log1p_exp(cplx u) {
  if (u.real() > 0.0) return u + std::log(1.0 + std::exp(-u));
  return std::log(1.0 + std::exp(u));
}

}  // namespace

Dilog::Dilog(double b) : b_(b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("Dilog: b must be positive");
  c_b_ = 0.5 * (b + 1.0 / b);
  beta_ = kPi / 12.0 * (b * b + 1.0 / (b * b));
}

cplx Dilog::q() const { return std::exp(kI * kPi * b_ * b_); }

cplx Dilog::integral(cplx z) const {
  const double y = std::fabs(z.imag());
  if (!(y < c_b_)) throw DomainError("Dilog::integral: |im z| must be below c_b");
  const double b = b_, rb = 1.0 / b_;
  // integrand minus its 1/t^2 part; i int_0^inf [sin(2zt)/(2t sinh(bt) sinh(t/b)) - z/t^2] dt
  auto F = [&](double t) -> cplx {
    if (t <= 1.0) {
      const double sb = 1.0 + b * b * t * t * sinhc_defect(b * t), sr = 1.0 + rb * rb * t * t * sinhc_defect(rb * t);
      const cplx num = 4.0 * z * z * sinc_defect(2.0 * z * t) - b * b * sinhc_defect(b * t) -
                       rb * rb * sinhc_defect(rb * t) - t * t * sinhc_defect(b * t) * sinhc_defect(rb * t);
      return z * num / (sb * sr);
    }
    // 1/(sinh bt sinh t/b) = 4 e^{-2 c_b t}/((1 - e^{-2bt})(1 - e^{-2t/b}))
    const double den = -std::expm1(-2.0 * b * t) * -std::expm1(-2.0 * rb * t);
    const cplx e1 = std::exp((2.0 * kI * z - 2.0 * c_b_) * t), e2 = std::exp((-2.0 * kI * z - 2.0 * c_b_) * t);
    return (e1 - e2) / (2.0 * kI) * 4.0 / den / (2.0 * t) - z / (t * t);
  };
  const double decay = 2.0 * (c_b_ - y);
  const double T = std::max(2.0, 38.0 / decay);
  const double width = std::min(0.5, kPi / (2.0 * std::abs(z.real()) + 2.0));
  cplx I = panels(F, 0.0, std::min(1.0, T), width);
  if (T > 1.0) I += panels(F, 1.0, T, width);
  I -= z / T;  // int_T^inf -z/t^2
  return kI * I + kI * kPi * z * z / 2.0 + kI * kPi * (b * b + rb * rb) / 24.0;
}

cplx Dilog::log(cplx z) const {
  // shift by i s with s = min(b, 1/b); factor 1 + e^{-i pi s^2} e^{-2 pi s w}
  const double s = std::min(b_, 1.0 / b_), band = 0.5 * c_b_;
  auto factor_log = [&](cplx w) {
    const cplx u = -kI * kPi * s * s - 2.0 * kPi * s * w;
    return log1p_exp(u);
  };
  cplx acc = 0.0, w = z;
  int guard = 0;
  while (w.imag() < -band) {
    const cplx u = -kI * kPi * s * s - 2.0 * kPi * s * w;
    if (u.real() < 1.0 && std::abs(1.0 + std::exp(u)) < 1e-13) throw DomainError("Dilog: argument at a pole");
    acc -= factor_log(w);  // Phi(w) = Phi(w + is) / (1 + ...)
    w += kI * s;
    if (++guard > 100000) throw DomainError("Dilog: argument too far from the real axis");
  }
  while (w.imag() > band) {
    acc += factor_log(w - kI * s);  // Phi(w) = (1 + ...)(w - is) Phi(w - is)
    w -= kI * s;
    if (++guard > 100000) throw DomainError("Dilog: argument too far from the real axis");
  }
  return acc + integral(w);
}

cplx Dilog::operator()(cplx z) const { return std::exp(log(z)); }

double theta_b(double b, double x) {
  if (x == 0.0) throw DomainError("theta_b: pole at x = 0");
  return 1.0 / -std::expm1(-2.0 * kPi * x / b);
}

cplx lambda_of_k(double b, cplx k) { return 2.0 * std::cosh(2.0 * kPi * b * k); }

cplx k_of_lambda(double b, cplx lambda) {
  cplx w = std::acosh(lambda / 2.0);
  if (w.imag() < 0.0) w = -w;
  if (!(w.imag() > 0.0)) throw DomainError("k_of_lambda: lambda on the cut [2, inf)");
  return w / (2.0 * kPi * b);
}

namespace {
void check_strip(double b, cplx k, const char* who) {
  if (!(k.imag() > 0.0) || k.imag() > 0.5 / b + 1e-12)
    throw DomainError(std::string(who) + ": k outside the physical strip 0 < im k <= 1/(2b)");
}
}  // namespace

cplx free_kernel(double b, cplx k, double x) {
  check_strip(b, k, "free_kernel");
  x = std::fabs(x);
  // at k = i/(2b) (lambda = -2) both sinh(2 pi b k) and the bracket vanish
  if (std::abs(k - cplx(0.0, 0.5 / b)) < 1e-8)
    return x < 1e-12 ? cplx(1.0 / (2.0 * kPi * b)) : cplx(x / (2.0 * b * b * std::sinh(kPi * x / b)));
  const cplx pref = kI / (2.0 * b * std::sinh(2.0 * kPi * b * k));
  cplx bracket;
  if (x < 1.0) {
    // e^{-2 pi i k x} + 2i sin(2 pi k x) theta_b(x), with the x -> 0 limit k b of the product
    const cplx s = x < 1e-12 ? k * b : std::sin(2.0 * kPi * k * x) / -std::expm1(-2.0 * kPi * x / b);
    bracket = std::exp(-2.0 * kI * kPi * k * x) + 2.0 * kI * s;
  } else {
    // theta_b(-x) = -e^{-2 pi x/b} theta_b(x)
    const double t = 1.0 / -std::expm1(-2.0 * kPi * x / b);
    bracket = -std::exp(-2.0 * kI * kPi * k * x - 2.0 * kPi * x / b) * t + std::exp(2.0 * kI * kPi * k * x) * t;
  }
  return pref * bracket;
}

cplx free_kernel_fourier(double b, cplx k, double p) {
  check_strip(b, k, "free_kernel_fourier");
  const double X = 42.0 / (2.0 * kPi * k.imag());
  auto f = [&](double x) { return 2.0 * free_kernel(b, k, x) * std::cos(2.0 * kPi * p * x); };
  return panels(f, 0.0, X, std::min(0.25, 0.25 / (std::fabs(p) + 1e-300)));
}

cplx m_coefficient(const Dilog& phi, cplx k) {
  const double cb = phi.c_b();
  return std::exp(kI * (phi.beta() + kPi / 4.0) - 2.0 * kPi * kI * k * (k - kI * cb) + phi.log(2.0 * k - kI * cb));
}

double modulus_residual(const Dilog& phi, double k) {
  const double b = phi.b();
  const double m2 = std::norm(m_coefficient(phi, k));
  return std::fabs(1.0 / (m2 * 4.0 * std::sinh(2.0 * kPi * b * k) * std::sinh(2.0 * kPi * k / b)) - 1.0);
}

Scattering::Scattering(double b, cplx k) : phi_(b), k_(k) {
  if (std::abs(k) < 1e-3) throw DomainError("Scattering: contour pinch, |k| < 1e-3");
  if (k.imag() < 0.0 || k.imag() > 0.5 / b + 1e-12)
    throw DomainError("Scattering: k outside the physical strip 0 <= im k <= 1/(2b)");
  m_plus_ = m_coefficient(phi_, k);
  m_minus_ = m_coefficient(phi_, -k);

  const double cb = phi_.c_b(), beta = phi_.beta();
  const double delta = 0.15, alpha = 0.5;
  const double h0 = k.imag() + delta;
  const double L = std::fabs(k.real()) + 1.5;
  // tail length: Gaussian decay pi s^2 beats the weights e^{2 pi s (b + 1/b + 2)} by e^{-45}
  const double K = b + 1.0 / b + 2.0 + h0;
  const double S = (2.0 * kPi * K + std::sqrt(4.0 * kPi * kPi * K * K + 4.0 * kPi * 45.0)) / (2.0 * kPi);

  auto hat = [&](cplx p) {
    return std::exp(-kI * beta - kI * kPi * k * k - kI * kPi * (p - kI * cb) * (p - kI * cb) +
                    phi_.log(p - k - kI * cb) + phi_.log(p + k - kI * cb));
  };
  const auto& gx = GL::abscissa();
  const auto& gw = GL::weights();
  auto add_panel = [&](double lo, double hi, auto&& param, cplx dp) {
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    for (size_t i = 0; i < gx.size(); ++i) {
      for (int sg : {1, -1}) {
        if (sg < 0 && gx[i] == 0.0) continue;
        const cplx p = param(c + sg * r * gx[i]);
        p_.push_back(p);
        w_.push_back(gw[i] * r * dp);
      }
    }
  };
  // horizontal segment, refined near re p = +-re k
  auto horiz = [&](double s) { return cplx(s, h0); };
  for (double x = -L; x < L - 1e-12;) {
    const double d = std::min(std::fabs(x - k.real()), std::fabs(x + k.real()));
    const double w = std::min({0.25, 0.5 * (delta + d), L - x});
    add_panel(x, x + w, horiz, 1.0);
    x += w;
  }
  const double tw = 0.2;
  const int nt = static_cast<int>(std::ceil(S / tw));
  auto right = [&](double s) { return cplx(L + s, h0 - alpha * s); };
  auto left = [&](double s) { return cplx(-L - s, h0 - alpha * s); };
  for (int j = 0; j < nt; ++j) {
    add_panel(j * tw, (j + 1) * tw, right, cplx(1.0, -alpha));
    add_panel(j * tw, (j + 1) * tw, left, cplx(1.0, alpha));
  }
  // phi^ at every node; the Dilog calls dominate the cost
  std::vector<cplx> vals(p_.size());
  for (size_t i = 0; i < p_.size(); ++i) vals[i] = hat(p_[i]);
  for (size_t i = 0; i < p_.size(); ++i) w_[i] *= vals[i];
}

cplx Scattering::phi(cplx x, int derivative) const {
  numkit::KahanSum s;
  for (size_t i = 0; i < p_.size(); ++i) {
    cplx term = w_[i] * std::exp(2.0 * kPi * kI * p_[i] * x);
    for (int d = 0; d < derivative; ++d) term *= 2.0 * kPi * kI * p_[i];
    s.add(term);
  }
  return s.sum;
}

cplx Scattering::jost(cplx x, int derivative, double sign) const {
  const double b = phi_.b();
  const cplx sk = std::sinh(2.0 * kPi * sign * k_ / b);
  const cplx m = sign > 0 ? m_plus_ : m_minus_;
  const cplx shifted = phi(x - kI / b, derivative) - phi(x + kI / b, derivative);
  return (shifted + 2.0 * sk * phi(x, derivative)) / (4.0 * sk * m);
}

cplx Scattering::f_plus(cplx x, int derivative) const { return jost(x, derivative, 1.0); }
cplx Scattering::f_minus(cplx x, int derivative) const { return jost(x, derivative, -1.0); }

cplx Scattering::casorati_f_minus_phi(double x) const {
  const cplx ib = kI * phi_.b();
  return f_minus(x + ib) * phi(x) - f_minus(x) * phi(x + ib);
}

cplx Scattering::casorati_f_minus_f_plus(double x) const {
  const cplx ib = kI * phi_.b();
  return f_minus(x + ib) * f_plus(x) - f_minus(x) * f_plus(x + ib);
}

cplx Scattering::phi_equation_residual(double x) const {
  const double b = phi_.b();
  const cplx ib = kI * b;
  return phi(x + ib) + phi(x - ib) + (std::exp(2.0 * kPi * b * x) - lambda()) * phi(x);
}

cplx Scattering::f_plus_equation_residual(double x) const {
  const double b = phi_.b();
  const cplx ib = kI * b;
  return f_plus(x + ib) + f_plus(x - ib) + (std::exp(2.0 * kPi * b * x) - lambda()) * f_plus(x);
}

cplx Scattering::resolvent(double x, double y) const {
  if (!(k_.imag() > 0.0)) throw DomainError("resolvent: lambda on the cut, need im k > 0");
  const double b = phi_.b();
  const cplx pref = kI / (2.0 * b * std::sinh(2.0 * kPi * b * k_) * m_plus_);
  if (std::fabs(x - y) < 1e-7) {
    // theta_b(e) e -> b/(2 pi): the poles of the two terms cancel
    const double t = 0.5 * (x + y);
    const cplx fm = f_minus(t), ph = phi(t);
    return pref * (b / (2.0 * kPi) * (fm * phi(t, 1) - f_minus(t, 1) * ph) + fm * ph);
  }
  return pref * (f_minus(x) * phi(y) * theta_b(b, y - x) + f_minus(y) * phi(x) * theta_b(b, x - y));
}

std::vector<ExpTerm> mirror_h_zeta(double zeta) {
  if (!(zeta > 0.0)) throw DomainError("mirror_h_zeta: zeta must be positive");
  return {{1.0, 0.0, -1.0}, {1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}, {zeta, -1.0, 0.0}};
}

std::vector<ExpTerm> mirror_h_mn(int m, int n) {
  if (m < 1 || n < 1) throw DomainError("mirror_h_mn: m, n must be positive integers");
  // q^{-mn} U^{-m} V^{-n} = e^{mP - nX}
  return {{1.0, 0.0, -1.0}, {1.0, 1.0, 0.0}, {1.0, -static_cast<double>(n), static_cast<double>(m)}};
}

double weyl_constant_h_zeta(double b) { return 1.0 / (kPi * kPi * b * b); }

double weyl_constant_h_mn(double b, int m, int n) {
  const double c = (m + n + 1.0) * (m + n + 1.0) / (2.0 * m * n);
  return c / (4.0 * kPi * kPi * b * b);
}

namespace {

struct Centre {
  double X0, P0;
  Eigen::Matrix2d S;  // det 1: (X, P) = centre + S (x', p')
};

// minimum of the classical symbol sum c e^{alpha X + gamma P} (convex), by Newton
Centre classical_minimum(const std::vector<ExpTerm>& terms) {
  Eigen::Vector2d z(0.0, 0.0);
  Eigen::Matrix2d Hs;
  for (int it = 0; it < 100; ++it) {
    Eigen::Vector2d g(0.0, 0.0);
    Hs.setZero();
    for (const auto& t : terms) {
      const Eigen::Vector2d a(t.alpha, t.gamma);
      const double e = t.coeff * std::exp(a.dot(z));
      g += e * a;
      Hs += e * a * a.transpose();
    }
    Eigen::Vector2d step = Hs.ldlt().solve(g);
    if (!step.allFinite()) throw DomainError("mirror: classical symbol has no minimum");
    double shrink = 1.0;
    while (step.norm() * shrink > 2.0) shrink *= 0.5;
    z -= shrink * step;
    if (step.norm() < 1e-13) break;
  }
  // squeeze and rotate so the quadratic part of the symbol is isotropic
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Hs);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw DomainError("mirror: classical symbol is degenerate");
  Eigen::Matrix2d S = es.operatorInverseSqrt() * std::pow(Hs.determinant(), 0.25);
  return {z(0), z(1), S};
}

// Each term is positive: P e^{L} P = (e^{L/2} P)^dagger (e^{L/2} P). Rows of the stacked factor are
// truncated at `rows` oscillator states, far enough that the dropped tail is below rounding.
Eigen::MatrixXcd galerkin_factor(double b, const std::vector<ExpTerm>& terms, int N, int rows) {
  if (N < 1) throw DomainError("galerkin: basis size must be positive");
  const Centre c = classical_minimum(terms);
  const double r = std::sqrt(kPi * b * b);  // sqrt(hbar/2), hbar = 2 pi b^2
  Eigen::MatrixXcd B(rows * terms.size(), N);
  Eigen::MatrixXcd E(rows, N);
  for (size_t k = 0; k < terms.size(); ++k) {
    const auto& t = terms[k];
    if (!(t.coeff > 0.0)) throw DomainError("galerkin: coefficients must be positive");
    // (alpha X + gamma P)/2 = const + mu a^dagger + nu a
    const Eigen::Vector2d w = c.S.transpose() * Eigen::Vector2d(t.alpha, t.gamma);
    const cplx mu = 0.5 * r * cplx(w(0), w(1));
    const cplx nu = 0.5 * r * cplx(w(0), -w(1));
    E(0, 0) = std::sqrt(t.coeff) * std::exp(mu * nu / 2.0 + 0.5 * (t.alpha * c.X0 + t.gamma * c.P0));
    for (int n = 1; n < N; ++n) E(0, n) = E(0, n - 1) * nu / std::sqrt(double(n));
    // [a, e^{mu a^dagger + nu a}] = mu e^{...}
    for (int m = 0; m + 1 < rows; ++m)
      for (int n = 0; n < N; ++n)
        E(m + 1, n) = ((n > 0 ? std::sqrt(double(n)) * E(m, n - 1) : cplx(0.0)) + mu * E(m, n)) / std::sqrt(double(m + 1));
    B.middleRows(k * rows, rows) = E;
  }
  return B;
}

}  // namespace

std::vector<double> galerkin_eigenvalues(double b, const std::vector<ExpTerm>& terms, int n) {
  // H = R^dagger R from a QR of the factor; the small eigenvalues come from (R^dagger R)^{-1}
  const Eigen::MatrixXcd B = galerkin_factor(b, terms, n, 2 * n + 40);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(B);
  const Eigen::MatrixXcd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const Eigen::MatrixXcd W = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(n, n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W * W.adjoint(), Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = n - 1; i >= 0; --i) out.push_back(1.0 / es.eigenvalues()(i));
  return out;
}

MirrorSpectrum mirror_spectrum(double b, const std::vector<ExpTerm>& terms, int n, double weyl_expected) {
  MirrorSpectrum s;
  s.n = n;
  s.weyl_expected = weyl_expected;
  s.values = galerkin_eigenvalues(b, terms, n);
  s.reference = galerkin_eigenvalues(b, terms, 2 * n);
  for (int i = 0; i < n; ++i) {
    const double rel = std::fabs(s.values[i] - s.reference[i]) / std::fabs(s.reference[i]);
    s.agreement_digits.push_back(rel > 0.0 ? std::min(16.0, -std::log10(rel)) : 16.0);
  }
  while (s.resolved < n && s.agreement_digits[s.resolved] >= 6.0) ++s.resolved;
  for (int i = 0; i < s.resolved; ++i)
    if (!(s.values[i] > 0.0)) s.positive = false;
  // N(lambda_j) = j; fit j = A log^2 lambda_j + C over the upper half of the resolved window
  const int lo = s.resolved / 2;
  if (s.resolved - lo >= 4) {
    Eigen::MatrixXd A(s.resolved - lo, 2);
    Eigen::VectorXd y(s.resolved - lo);
    for (int j = lo; j < s.resolved; ++j) {
      const double L = std::log(s.reference[j]);
      A(j - lo, 0) = L * L;
      A(j - lo, 1) = 1.0;
      y(j - lo) = j + 1;
    }
    s.weyl_fit = A.colPivHouseholderQr().solve(y)(0);
  }
  return s;
}

Gaussian apply_u(double b, const Gaussian& g, int power) {
  // psi(x + i b power)
  const cplx s = kI * b * double(power);
  return {g.A, g.B + 2.0 * g.A * s, g.C + g.A * s * s + g.B * s};
}

Gaussian apply_v(double b, const Gaussian& g, int power) {
  return {g.A, g.B + 2.0 * kPi * b * double(power), g.C};
}

namespace {

// <g, h> = int conj(g) h
cplx gaussian_inner(const Gaussian& g, const Gaussian& h) {
  const cplx a = std::conj(g.A) + h.A, beta = std::conj(g.B) + h.B;
  return std::sqrt(-kPi / a) * std::exp(std::conj(g.C) + h.C - beta * beta / (4.0 * a));
}

}  // namespace

double weyl_commutation_residual(double b, const Gaussian& psi) {
  if (!(psi.A.real() < 0.0)) throw DomainError("weyl_commutation_residual: needs re A < 0");
  const Gaussian uv = apply_u(b, apply_v(b, psi));
  Gaussian vu = apply_v(b, apply_u(b, psi));
  vu.C += 2.0 * kI * kPi * b * b;  // q^2
  // both sides share A; B agrees up to rounding, so the difference is (e^{C1} - e^{C2}) times one Gaussian
  const Gaussian shape{uv.A, 0.5 * (uv.B + vu.B), 0.0};
  const cplx dB = 0.5 * (uv.B - vu.B);
  const Gaussian g1{shape.A, shape.B + dB, uv.C}, g2{shape.A, shape.B - dB, vu.C};
  const double d2 = std::real(gaussian_inner(g1, g1) + gaussian_inner(g2, g2)) - 2.0 * std::real(gaussian_inner(g1, g2));
  const double n2 = std::real(gaussian_inner(psi, psi));
  return std::sqrt(std::max(d2, 0.0) / n2);
}

}  // namespace trf::qdiff
