#pragma once
// Scattering for -y'' + v y = k^2 y on the line with v decaying at both ends.
//
// The Jost solutions solve the Volterra equations whose kernels vanish beyond the
// cutoff X (|v| < 1e-12 there); that fixed point is the solution of the ODE with
// free data e^{+-ikx} imposed at +-X, which is what the Magnus stepper integrates.

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "trf/expr.hpp"
#include "trf/numkit.hpp"

namespace trf::schrod {

struct JostData {
  cplx k;
  double cutoff = 0.0;
  std::vector<double> x;  // uniform on [-X, X]
  std::vector<cplx> f1, df1, f2, df2;
  cplx a;                 // W(f1, f2)/(2ik) at x = 0
  double wronskian_spread = 0.0;  // max |W(x) - W(0)| over the grid
};

struct Coefficients {
  cplx a;
  cplx b;
};

struct TraceCheck {
  cplx lhs;  // (i/(2ka)) int (f1 f2 - a) over the line, free tails in closed form
  cplx rhs;  // -a'(k)/(2k a)
  double gap = 0.0;
  std::vector<cplx> partial;  // (i/(2ka)) int_{-n}^{n} at n = X/2, 3X/4, X
};

struct IdentityCheck {
  cplx lhs;
  cplx rhs;
  double gap = 0.0;
  double tail = 0.0;  // size of the modelled k-tail contribution
};

struct RiccatiSeriesCheck {
  cplx log_a;
  cplx partial_sum;
  double first_omitted = 0.0;
};

class Scatterer {
 public:
  explicit Scatterer(Potential v, double cutoff_tol = 1e-12, double step = 0.005);

  const Potential& potential() const { return v_; }
  double cutoff() const { return X_; }
  int steps() const { return n_; }
  // int_{|x|>X} (1+|x|)|v| dx, the discarded part of the integrability norm.
  double truncation_bound() const { return truncation_; }
  // int (1+|x|)|v| dx over the line.
  double weighted_norm() const { return weighted_norm_; }

  JostData jost(cplx k) const;
  cplx a(cplx k) const;
  Coefficients coefficients(double k) const;
  std::vector<double> bound_states(double kappa_max, double step = 0.02) const;

  // Kernel of (H - lambda)^{-1}, k = sqrt(lambda) with im k > 0.
  cplx resolvent(const JostData& j, double x, double y) const;
  static cplx free_resolvent(cplx k, double x, double y);

  TraceCheck trace_difference(cplx lambda) const;

  // sigma_1 .. sigma_lmax of the Riccati recurrence (sigma_0 = 0).
  std::vector<Expr> riccati(int l_max) const;
  double riccati_integral(int l) const;
  RiccatiSeriesCheck riccati_log_a(cplx k, int l_max) const;

  // (1/pi i) int k^{2l} log|a| dk + 2/(2l+1) sum (i kappa)^{2l+1} vs (1/2i)^{2l+1} int sigma_{2l+1}
  IdentityCheck zf_identity(int l) const;
  // exp{(1/pi i) int log|a(q)|/(q-k) dq} prod (k - i kappa)/(k + i kappa)
  cplx dispersion_a(cplx k) const;

  // Sup of |e^{-ikx} f1 - 1| - (s/|k|) e^{s/|k|} over the grid, s = int_x^inf |v|; <= 0 when the bound holds.
  double jost_bound_excess(const JostData& j) const;

 private:
  Potential v_;
  double X_ = 0.0;
  int n_ = 0;
  double truncation_ = 0.0;
  double weighted_norm_ = 0.0;
  std::vector<double> nodes_;  // v at the two Gauss nodes of every step
  std::vector<double> tail_l1_;  // int_{x_j}^X |v| on grid nodes

  // log|a| on a geometric Gauss-Legendre grid over (0, q_max]; built on first use.
  struct Table {
    std::vector<double> q, w, log_abs_a;
    double q_max = 0.0;
    double tail_coeff = 0.0;  // log|a| ~ tail_coeff / q^2 beyond q_max
    double head_integral = 0.0;  // int_0^{q0} log|a| from a log-linear fit
    std::vector<double> kappas;
  };
  mutable std::shared_ptr<const Table> table_;
  mutable std::mutex table_mutex_;
  const Table& table() const;
};

}  // namespace trf::schrod
