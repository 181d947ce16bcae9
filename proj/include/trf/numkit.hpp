#pragma once
// Shared numerics: quadrature, root scans, Gamma, zeta, quadratic L-series,
// K-Bessel and the completed zeta. Everything is double precision.

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trf {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Thrown for inputs outside an operation's domain (poles, y <= 0, bad d).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Thrown when an iterative method runs out of budget. `partial` keeps the
// last estimate so callers can still report it.
struct ConvergenceError : std::runtime_error {
  cplx partial;
  ConvergenceError(const std::string& what, cplx p) : std::runtime_error(what), partial(p) {}
};

namespace numkit {

struct QuadratureResult {
  cplx value;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
};

// Real interval [lo, hi] (either end may be infinite). When `poles` is non-empty
// the path is the real segment with a semicircular detour of `radius` around each
// listed pole, above it (`above`) or below it.
struct ContourSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> poles;
  double radius = 0.05;
  bool above = true;
};

using ComplexFn = std::function<cplx(cplx)>;
using RealToComplexFn = std::function<cplx(double)>;

// Gauss-Kronrod (15 point, adaptive bisection) with a tanh-sinh retry when the
// error target is missed; infinite ends use the x = t/(1-t) style maps built into
// the Boost integrators. Throws ConvergenceError with the best estimate on failure.
QuadratureResult integrate(const RealToComplexFn& f, double lo, double hi, double tol,
                           int max_depth = 18);

// Integral of f along the contour. f is evaluated at complex points on the detours.
QuadratureResult adaptive_quad(const ComplexFn& f, const ContourSpec& contour, double tol);

// Sign-change scan with spacing `step`, each bracket refined by TOMS 748 until the
// bracket is below tol. Assumes simple roots; a double root without a sign change
// is invisible to the scan.
std::vector<double> find_real_roots(const std::function<double(double)>& f, double lo, double hi,
                                    double step, double tol = 1e-13);

// Single bracketed root.
double refine_root(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14);

cplx gamma_c(cplx z);
cplx lgamma_c(cplx z);  // principal-ish branch, continuous for re z > 0

cplx zeta_c(cplx s);
cplx hurwitz_zeta(cplx s, double a);  // re s > 0 or s != 1; a in (0, 1]

int kronecker(long d, long n);
bool is_fundamental_discriminant(long d);
cplx dirichlet_L_quadratic(cplx s, long d);

// K_nu(y) from the cosh integral. Valid for y > 0; accurate to ~1e-12 relative
// for |nu| up to about 30.
cplx bessel_K(cplx nu, double y);

cplx xi_completed(cplx s);
// Constant-term ratio xi(2s-1)/xi(2s).
cplx scattering_c(cplx s);

// Kahan-compensated running sum for long series.
struct KahanSum {
  cplx sum{0.0, 0.0};
  cplx comp{0.0, 0.0};
  void add(cplx x) {
    cplx y = x - comp;
    cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace numkit
}  // namespace trf
