#pragma once
// -y'' + v y = lambda y on [0, pi] with Dirichlet ends.
//
// Solutions are propagated with the fourth-order Magnus scheme (two Gauss nodes
// per step, exact 2x2 exponential), which is exact for constant v and keeps its
// accuracy at large |lambda|. Every quantity is computed on the grid of N steps
// and again on 2N; the difference is the reported error.

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "trf/expr.hpp"
#include "trf/numkit.hpp"

namespace trf::sl {

struct ShootingPair {
  cplx lambda;
  std::vector<double> x;  // uniform grid, x[0] = 0, x.back() = pi
  std::vector<cplx> y1, dy1, y2, dy2;
  cplx d;               // y1(pi)
  double d_error = 0.0;  // |d(N) - d(2N)|
};

struct EigenList {
  std::vector<double> values;
  std::vector<double> residuals;  // |d(lambda_n)| on the fine grid
  std::vector<double> errors;     // shift of the root between grid N and 2N
};

struct TraceResult {
  cplx diagonal;     // int R(x,x) dx
  cplx log_derivative;  // -d'/d with a central difference
  double gap = 0.0;
};

struct DeterminantResult {
  double value = 0.0;
  double half_value = 0.0;  // same formula at n_max/2, as convergence evidence
  double tail_factor = 1.0;
};

struct GelfandLevitanResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double partial_sum = 0.0;  // raw sum to n_max, before the tail model
  double tail = 0.0;
};

struct AsymptoticFit {
  double coeff1 = 0.0;    // fitted 1/k coefficient
  double expected1 = 0.0;  // pi c / 2
  double coeff2 = 0.0;
  double expected2 = 0.0;  // (pi^2 c^2 - 2(v(0)+v(pi)))/8
};

class Problem {
 public:
  explicit Problem(Potential v, int steps = 2048);

  const Potential& potential() const { return v_; }
  double mean() const { return mean_; }  // (1/pi) int v
  int steps() const { return steps_; }

  ShootingPair shoot(cplx lambda) const;
  cplx d(cplx lambda) const;
  cplx d_dot(cplx lambda) const;

  EigenList eigenvalues(int n_max) const;
  // Number of sign changes of y1(., lambda) on (0, pi]; jumps by one at each eigenvalue.
  int oscillation_count(double lambda) const;

  TraceResult trace_resolvent(cplx lambda) const;
  DeterminantResult regularized_determinant(int n_max) const;
  GelfandLevitanResult gelfand_levitan_check(int n_max) const;
  // Fit of 2k e^{-pi k} d(-k^2) - 1 against powers of 1/k on [k_lo, k_hi].
  AsymptoticFit d_asymptotic_fit(double k_lo, double k_hi, int samples = 21) const;

  cplx d_on_grid(cplx lambda, int n) const;

 private:
  Potential v_;
  int steps_;
  double mean_;
  // v at the two Gauss nodes of every step, per grid size
  mutable std::map<int, std::shared_ptr<const std::vector<double>>> node_cache_;
  mutable std::mutex cache_mutex_;

  std::shared_ptr<const std::vector<double>> nodes(int n) const;
  ShootingPair propagate(cplx lambda, int n) const;
  friend class Resolvent;
};

// Green's function at one lambda; construction shoots once, evaluation at
// off-grid points takes one partial Magnus step from the nearest node.
class Resolvent {
 public:
  // Throws DomainError when lambda sits within 1e-6 (1+|lambda_n|) of an eigenvalue
  // in `guard` (pass the eigen list if known) or when d(lambda) vanishes.
  Resolvent(const Problem& p, cplx lambda, const std::vector<double>& guard = {});

  cplx operator()(double x, double xi) const;
  cplx y1(double x) const { return eval(x, true).first; }
  cplx y2(double x) const { return eval(x, false).first; }
  cplx d() const { return pair_.d; }
  const ShootingPair& pair() const { return pair_; }

 private:
  const Problem& p_;
  ShootingPair pair_;
  std::pair<cplx, cplx> eval(double x, bool first) const;
};

}  // namespace trf::sl
