#pragma once
// The difference operator H = U + U^{-1} + V with (U psi)(x) = psi(x + ib), V = e^{2 pi b x},
// its quantum-dilogarithm eigenfunctions, and Galerkin spectra of the mirror-curve operators.
//
// Fourier convention: psi(x) = int psi^(p) e^{2 pi i p x} dp.

#include <memory>
#include <vector>

#include "trf/numkit.hpp"

namespace trf::qdiff {

// Phi_b(z). The integral representation is used in |im z| <= c_b/2; elsewhere the argument is
// moved there with the two shift relations, so poles at -i c_b - i(m b + n/b) raise DomainError.
class Dilog {
 public:
  explicit Dilog(double b);

  double b() const { return b_; }
  double c_b() const { return c_b_; }
  double beta() const { return beta_; }
  cplx q() const;  // e^{i pi b^2}

  cplx operator()(cplx z) const;
  // A logarithm of Phi_b(z); the branch is whatever the shift chain produces.
  cplx log(cplx z) const;
  // log Phi_b from the integral alone, |im z| < c_b; no continuation.
  cplx integral(cplx z) const;

 private:
  double b_, c_b_, beta_;
};

// 1/(1 - e^{-2 pi x/b}); x = 0 is the pole.
double theta_b(double b, double x);

// k with lambda = 2 cosh(2 pi b k) and 0 < im k <= 1/(2b).
cplx k_of_lambda(double b, cplx lambda);
cplx lambda_of_k(double b, cplx k);

// Free kernel in closed form, regular at x = 0 and continued to the strip corner k = i/(2b).
cplx free_kernel(double b, cplx k, double x);
// int free_kernel(x) e^{-2 pi i p x} dx by quadrature; equals 1/(2 cosh(2 pi b p) - lambda).
cplx free_kernel_fourier(double b, cplx k, double p);

cplx m_coefficient(const Dilog& phi, cplx k);
// |1/|M(k)|^2 / (4 sinh(2 pi b k) sinh(2 pi k/b)) - 1| for real k
double modulus_residual(const Dilog& phi, double k);

// phi(x, k) and the Jost solutions f+-, from phi^(p, k) tabulated on a contour above p = +-k:
// a horizontal segment at height im k + 0.15 joined to tails that bend down at slope 1/2, where
// the Gaussian factor e^{-i pi p^2} makes every shifted weight e^{-2 pi p s} integrable.
// Values lose relative accuracy for re x > 4, where phi is exponentially small. For complex k the
// recessive f- at x -> -inf comes out of cancelling growing terms, roughly a factor e^{4 pi im k |x|}.
class Scattering {
 public:
  Scattering(double b, cplx k);

  double b() const { return phi_.b(); }
  cplx k() const { return k_; }
  cplx lambda() const { return lambda_of_k(b(), k_); }
  cplx m() const { return m_plus_; }
  cplx m_minus() const { return m_minus_; }
  size_t nodes() const { return p_.size(); }

  // x may be complex: im x enters as the weight e^{-2 pi p im x}.
  cplx phi(cplx x, int derivative = 0) const;
  cplx f_plus(cplx x, int derivative = 0) const;
  cplx f_minus(cplx x, int derivative = 0) const;

  // f(x + ib) g(x) - f(x) g(x + ib)
  cplx casorati_f_minus_phi(double x) const;
  cplx casorati_f_minus_f_plus(double x) const;
  // (g(x + ib) + g(x - ib) + e^{2 pi b x} g(x) - lambda g(x)) for g = phi and g = f+
  cplx phi_equation_residual(double x) const;
  cplx f_plus_equation_residual(double x) const;

  cplx resolvent(double x, double y) const;

 private:
  Dilog phi_;
  cplx k_;
  cplx m_plus_, m_minus_;
  std::vector<cplx> p_, w_;  // nodes and weights (dp/ds folded in) times phi^(p)
  cplx jost(cplx x, int derivative, double sign) const;
};

// c e^{alpha X + gamma P} with X = 2 pi b x, P = 2 pi b p and [X, P] = 2 pi i b^2.
// U = e^{-P}, V = e^{X}.
struct ExpTerm {
  double coeff;
  double alpha;
  double gamma;
};

std::vector<ExpTerm> mirror_h_zeta(double zeta);   // U + U^{-1} + V + zeta V^{-1}
std::vector<ExpTerm> mirror_h_mn(int m, int n);    // U + V + q^{-mn} U^{-m} V^{-n}
double weyl_constant_h_zeta(double b);             // 1/(pi b)^2
double weyl_constant_h_mn(double b, int m, int n); // (m+n+1)^2/(2mn) / (2 pi b)^2

// Rayleigh-Ritz in N oscillator states centred on the classical minimum and squeezed to its
// Hessian. The matrix is never formed: each term e^L contributes e^{L/2} columns to a stacked
// factor whose QR gives H = R^dagger R, and the eigenvalues come from R^{-1} so that the small
// ones keep relative accuracy. Values past the resolved window are not meaningful.
std::vector<double> galerkin_eigenvalues(double b, const std::vector<ExpTerm>& terms, int n);

struct MirrorSpectrum {
  int n = 0;
  std::vector<double> values;     // basis size n
  std::vector<double> reference;  // basis size 2n
  std::vector<double> agreement_digits;  // -log10 relative difference, capped at 16
  int resolved = 0;               // leading eigenvalues agreeing to 1e-6
  double weyl_fit = 0.0;          // slope of N(lambda) against log^2 lambda over the resolved ones
  double weyl_expected = 0.0;
  bool positive = true;           // every resolved eigenvalue positive
};

MirrorSpectrum mirror_spectrum(double b, const std::vector<ExpTerm>& terms, int n, double weyl_expected);

// Gaussian e^{A x^2 + B x + C}, closed under U, V and their inverses.
struct Gaussian {
  cplx A, B, C;
  cplx operator()(double x) const { return std::exp((A * x + B) * x + C); }
};
Gaussian apply_u(double b, const Gaussian& g, int power = 1);
Gaussian apply_v(double b, const Gaussian& g, int power = 1);
// ||(UV - q^2 VU) psi|| / ||psi||, norms by quadrature; needs re A < 0.
double weyl_commutation_residual(double b, const Gaussian& psi);

}  // namespace trf::qdiff
