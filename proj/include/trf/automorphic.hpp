#pragma once
// Laplacian on the modular surface: point-pair kernel, method-of-images resolvent, Eisenstein
// series by Fourier and lattice routes, Heegner points, Dedekind zeta and Linnik statistics.
//
// Points of the upper half-plane are complex numbers with positive imaginary part.

#include <vector>

#include "trf/numkit.hpp"

namespace trf::autom {

// |z - w|^2 / (4 im z im w)
double point_pair_u(cplx z, cplx w);

// (1/4pi) int_0^1 [t(1-t)]^{s-1} (t+u)^{-s} dt for u > 0, re s > 0. Quadrature for u <= 2,
// the hypergeometric series in 1/u beyond.
cplx free_kernel_phi(double u, cplx s);

// Closed fundamental domain |x| <= 1/2, |z| >= 1, with slack tol.
bool in_fundamental_domain(cplx z, double tol = 1e-12);

struct Reduction {
  cplx z;
  int word_length = 0;  // letters T^{+-1} and S applied
};
Reduction reduce_point(cplx z);

// Representative in the modular figure: x = -1/2 moves to +1/2 and the left half of the arc to the right.
cplx to_modular_figure(cplx z);

struct QuadForm {
  long a, b, c;
  long discriminant() const { return b * b - 4 * a * c; }
  cplx root() const;  // (-b + sqrt(d))/(2a)
};

// Reduced forms |b| <= a <= c, b >= 0 when |b| = a or a = c. points[i] is the root of forms[i]
// moved into the modular figure; on the boundary that is the root of the opposite form (a, -b, c).
struct HeegnerSet {
  long d = 0;
  std::vector<QuadForm> forms;
  std::vector<cplx> points;
  int h = 0;
  int w = 2;  // units: 6 for d = -3, 4 for d = -4
};
HeegnerSet reduced_forms(long d);

struct EisensteinValue {
  cplx value;
  double tail_bound = 0.0;
  int terms = 0;  // Fourier modes, or lattice rows summed directly
};

// Fourier expansion after reducing z; modes are added until the Bessel tail falls below tol
// relative to y^s.
EisensteinValue eisenstein_fourier(cplx z, cplx s, double tol = 1e-16);

// y^s/(2 zeta(2s)) sum' |m - n z|^{-2s}. Rows |n| <= rows are summed in m over a window of
// half-width `window` around n x with Euler-Maclaurin tails; rows beyond use the row integral,
// whose error is below e^{-2 pi rows y}. re s > 1.
EisensteinValue eisenstein_lattice(cplx z, cplx s, int window = 40, int rows = 0);

struct ResolventSeries {
  cplx value;      // direct sum plus tail estimate
  cplx direct;     // sum over group elements with u(z, gamma z') <= u_max
  cplx tail;       // 12 int_{u_max}^inf phi(u, s) du, orbit count ~ 12u
  long terms = 0;
};

// sum over PSL(2,Z) of phi(u(z, gamma z'), s). Cosets of the translations are enumerated by
// coprime bottom rows (c, d), c > 0, plus the identity; each coset contributes its translates.
ResolventSeries automorphic_resolvent_series(cplx z, cplx zp, cplx s, double u_max = 200.0);

struct DedekindZeta {
  cplx via_heegner;
  cplx via_factorization;  // zeta(s) L(s, chi_d)
  double difference = 0.0;
  int h = 0;
  int w = 2;
};
DedekindZeta dedekind_zeta(long d, cplx s);

// zeta_K(s) against zeta(2s)(1 + c(s)(|d|/4)^{1/2-s}) when h(d) = 1.
struct DeuringCheck {
  cplx zeta_k;
  cplx two_term;
  double residual = 0.0;
  double height = 0.0;  // im of the Heegner point; the dropped modes are ~e^{-2 pi height}
};
DeuringCheck deuring_limit_check(long d, cplx s);

// Rectangle x0 <= x <= x1, y0 <= y <= y1 (y1 may be infinite), intersected with the domain.
struct Box {
  double x0, x1, y0, y1;
};
// (3/pi) int int dx dy / y^2 over the box inside |z| >= 1
double mu_star(const Box& box);

struct LinnikStatistic {
  long d = 0;
  int h = 0;
  int count = 0;
  double ratio = 0.0;
  double mu = 0.0;
  double discrepancy = 0.0;  // |count/h - mu|
};
LinnikStatistic linnik_statistic(long d, const Box& box);
LinnikStatistic linnik_statistic(const HeegnerSet& set, const Box& box);
// largest fundamental d below -target
long fundamental_discriminant_below(long target);
// one statistic per target, discriminants from fundamental_discriminant_below
std::vector<LinnikStatistic> linnik_ladder(const std::vector<long>& targets, const Box& box);

// Cusp-zone pieces for the truncation height a and parameter kappa > 1.
struct CuspZone {
  double a;
  double kappa;
  double t0(double y, double yp) const;
  cplx phi(double y, cplx s) const;  // y^s + a^{2s-1} (s - kappa)/(s + kappa - 1) y^{1-s}
  cplx dphi(double y, cplx s) const;
  cplx q(double y, double yp, cplx s) const;
  // kappa phi(a) - a phi'(a)
  cplx boundary_residual(cplx s) const;
};
CuspZone make_cusp_zone(double a, double kappa);

}  // namespace trf::autom
