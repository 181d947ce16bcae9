#include "trf/sturm_liouville.hpp"

#include "magnus.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/special_functions/trigamma.hpp>

namespace trf::sl {

namespace {

using magnus::kGauss1;
using magnus::kGauss2;

template <class T>
inline void magnus_step(T q1, T q2, double h, int dir, T& y, T& dy) {
  magnus::step<T>(q1, q2, h, dir, y, dy);
}

int grid_for(double lambda_abs, int base) {
  // keep h * sqrt|lambda| below ~0.5 so sign changes are resolved
  int n = base;
  while (kPi / n * std::sqrt(lambda_abs) > 0.5) n *= 2;
  return n;
}

}  // namespace

Problem::Problem(Potential v, int steps) : v_(std::move(v)), steps_(steps) {
  if (steps_ < 8) throw DomainError("sl::Problem: too few steps");
  auto r = numkit::integrate([this](double x) { return cplx(v_(x)); }, 0.0, kPi, 1e-13);
  mean_ = r.value.real() / kPi;
  for (double x : {0.0, kPi / 3, kPi / 2, kPi})
    if (!std::isfinite(v_(x))) throw DomainError("sl::Problem: potential is not finite on [0, pi]");
}

std::shared_ptr<const std::vector<double>> Problem::nodes(int n) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = node_cache_.find(n);
  if (it != node_cache_.end()) return it->second;
  auto vals = std::make_shared<std::vector<double>>(2 * static_cast<size_t>(n));
  const double h = kPi / n;
  for (int j = 0; j < n; ++j) {
    (*vals)[2 * j] = v_(h * (j + kGauss1));
    (*vals)[2 * j + 1] = v_(h * (j + kGauss2));
  }
  node_cache_[n] = vals;
  return vals;
}

cplx Problem::d_on_grid(cplx lambda, int n) const {
  auto vals = nodes(n);
  const double h = kPi / n;
  if (lambda.imag() == 0.0) {
    const double l = lambda.real();
    double y = 0.0, dy = 1.0;
    for (int j = 0; j < n; ++j) magnus_step<double>((*vals)[2 * j] - l, (*vals)[2 * j + 1] - l, h, 1, y, dy);
    return y;
  }
  cplx y = 0.0, dy = 1.0;
  for (int j = 0; j < n; ++j) magnus_step<cplx>((*vals)[2 * j] - lambda, (*vals)[2 * j + 1] - lambda, h, 1, y, dy);
  return y;
}

ShootingPair Problem::propagate(cplx lambda, int n) const {
  auto vals = nodes(n);
  const double h = kPi / n;
  ShootingPair p;
  p.lambda = lambda;
  p.x.resize(n + 1);
  p.y1.resize(n + 1);
  p.dy1.resize(n + 1);
  p.y2.resize(n + 1);
  p.dy2.resize(n + 1);
  for (int j = 0; j <= n; ++j) p.x[j] = h * j;
  p.x[n] = kPi;
  cplx y = 0.0, dy = 1.0;
  p.y1[0] = y;
  p.dy1[0] = dy;
  for (int j = 0; j < n; ++j) {
    magnus_step<cplx>((*vals)[2 * j] - lambda, (*vals)[2 * j + 1] - lambda, h, 1, y, dy);
    p.y1[j + 1] = y;
    p.dy1[j + 1] = dy;
  }
  y = 0.0;
  dy = 1.0;
  p.y2[n] = y;
  p.dy2[n] = dy;
  for (int j = n - 1; j >= 0; --j) {
    magnus_step<cplx>((*vals)[2 * j] - lambda, (*vals)[2 * j + 1] - lambda, h, -1, y, dy);
    p.y2[j] = y;
    p.dy2[j] = dy;
  }
  p.d = p.y1[n];
  return p;
}

ShootingPair Problem::shoot(cplx lambda) const {
  const int n = grid_for(std::abs(lambda), steps_);
  ShootingPair fine = propagate(lambda, 2 * n);
  fine.d_error = std::abs(d_on_grid(lambda, n) - fine.d);
  return fine;
}

cplx Problem::d(cplx lambda) const { return d_on_grid(lambda, 2 * grid_for(std::abs(lambda), steps_)); }

cplx Problem::d_dot(cplx lambda) const {
  // Five-point central difference. A two-point stencil at sqrt(eps) loses ~1e-5 to the
  // rounding carried through thousands of steps; eps^{1/5} balances the h^4 truncation.
  const double delta = std::pow(2.2e-16, 0.2) * (1.0 + std::abs(lambda));
  const int n = 2 * grid_for(std::abs(lambda) + 2 * delta, steps_);
  auto f = [&](double k) { return d_on_grid(lambda + k * delta, n); };
  return (8.0 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12.0 * delta);
}

int Problem::oscillation_count(double lambda) const {
  const int n = 2 * grid_for(std::fabs(lambda), steps_);
  auto vals = nodes(n);
  const double h = kPi / n;
  double y = 0.0, dy = 1.0;
  int count = 0;
  double prev = 0.0;
  for (int j = 0; j < n; ++j) {
    magnus_step<double>((*vals)[2 * j] - lambda, (*vals)[2 * j + 1] - lambda, h, 1, y, dy);
    if (j > 0 && ((prev > 0) != (y > 0)) && y != 0.0) ++count;
    if (y != 0.0) prev = y;
  }
  return count;
}

EigenList Problem::eigenvalues(int n_max) const {
  if (n_max < 1) throw DomainError("eigenvalues: n_max must be >= 1");
  EigenList out;
  double vmin = v_(0.0);
  for (int j = 0; j <= 64; ++j) vmin = std::min(vmin, v_(kPi * j / 64));
  double prev = vmin + 0.5;  // lambda_1 >= 1 + min v
  for (int n = 1; n <= n_max; ++n) {
    const double c = mean_;
    double lo = std::max(prev, (n - 0.5) * (n - 0.5) + c);
    double hi = std::max(lo + 1.0, (n + 0.5) * (n + 0.5) + c);
    if (oscillation_count(lo) != n - 1 || oscillation_count(hi) != n) {
      // bracket by bisecting the oscillation count
      lo = prev;
      hi = std::max(hi, lo + 1.0);
      while (oscillation_count(hi) < n) hi = lo + 2.0 * (hi - lo);
      for (int it = 0; it < 200 && !(oscillation_count(lo) == n - 1 && oscillation_count(hi) == n); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (oscillation_count(mid) >= n) hi = mid;
        else lo = mid;
      }
      if (oscillation_count(lo) != n - 1 || oscillation_count(hi) != n)
        throw ConvergenceError("eigenvalues: missed root " + std::to_string(n), cplx(lo));
    }
    const int grid = 2 * grid_for(std::fabs(hi), steps_);
    auto f = [&](double l) { return d_on_grid(l, grid).real(); };
    const double root = numkit::refine_root(f, lo, hi, 1e-15);
    const double slope = (f(root + 1e-6 * (1 + root)) - f(root - 1e-6 * (1 + root))) / (2e-6 * (1 + root));
    out.values.push_back(root);
    out.residuals.push_back(std::fabs(f(root)));
    out.errors.push_back(std::fabs(d_on_grid(root, grid / 2).real() / slope));
    prev = root;
  }
  return out;
}

Resolvent::Resolvent(const Problem& p, cplx lambda, const std::vector<double>& guard) : p_(p) {
  for (double ln : guard)
    if (std::abs(lambda - ln) <= 1e-6 * (1.0 + std::fabs(ln)))
      throw DomainError("resolvent: lambda is at an eigenvalue");
  pair_ = p.shoot(lambda);
  if (std::abs(pair_.d) <= 1e3 * pair_.d_error + 1e-300)
    throw DomainError("resolvent: d(lambda) vanishes to working accuracy");
}

std::pair<cplx, cplx> Resolvent::eval(double x, bool first) const {
  const int n = static_cast<int>(pair_.x.size()) - 1;
  const double h = kPi / n;
  int j = std::clamp(static_cast<int>(std::floor(x / h)), 0, n - 1);
  const double delta = x - pair_.x[j];
  cplx y = first ? pair_.y1[j] : pair_.y2[j];
  cplx dy = first ? pair_.dy1[j] : pair_.dy2[j];
  if (delta != 0.0) {
    const auto& v = p_.potential();
    const cplx l = pair_.lambda;
    magnus_step<cplx>(v(pair_.x[j] + kGauss1 * delta) - l, v(pair_.x[j] + kGauss2 * delta) - l, delta, 1, y, dy);
  }
  return {y, dy};
}

cplx Resolvent::operator()(double x, double xi) const {
  // W(y1, y2) = -d; R = y1(min) y2(max) / W
  const double a = std::min(x, xi), b = std::max(x, xi);
  return -y1(a) * y2(b) / pair_.d;
}

TraceResult Problem::trace_resolvent(cplx lambda) const {
  Resolvent r(*this, lambda);
  const auto& p = r.pair();
  const int n = static_cast<int>(p.x.size()) - 1;
  const double h = kPi / n;
  cplx s = p.y1[0] * p.y2[0] + p.y1[n] * p.y2[n];
  for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * p.y1[j] * p.y2[j];
  TraceResult t;
  t.diagonal = -(h / 3.0) * s / p.d;
  t.log_derivative = -d_dot(lambda) / p.d;
  t.gap = std::abs(t.diagonal - t.log_derivative);
  return t;
}

DeterminantResult Problem::regularized_determinant(int n_max) const {
  EigenList ev = eigenvalues(n_max);
  for (double l : ev.values)
    if (std::fabs(l) < 1e-12) throw DomainError("regularized_determinant: zero eigenvalue, shift v first");
  auto product = [&](int m) {
    double logabs = 0.0;
    int sign = 1;
    for (int n = 1; n <= m; ++n) {
      const double f = ev.values[n - 1] / (double(n) * n);
      if (f < 0) sign = -sign;
      logabs += std::log(std::fabs(f));
    }
    // sum_{n>m} log(1 + c/n^2): explicit to m + 4096, then c * trigamma for the rest
    double tail = mean_ * boost::math::trigamma(double(m + 4097));
    for (int n = m + 1; n <= m + 4096; ++n) tail += std::log1p(mean_ / (double(n) * n));
    return std::pair{sign * 2.0 * kPi * std::exp(logabs + tail), std::exp(tail)};
  };
  DeterminantResult out;
  auto [v, tf] = product(n_max);
  out.value = v;
  out.tail_factor = tf;
  out.half_value = product(std::max(1, n_max / 2)).first;
  return out;
}

GelfandLevitanResult Problem::gelfand_levitan_check(int n_max) const {
  if (n_max < 20) throw DomainError("gelfand_levitan_check: need n_max >= 20 for the tail fit");
  EigenList ev = eigenvalues(n_max);
  std::vector<double> partial(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) partial[n] = partial[n - 1] + (ev.values[n - 1] - double(n) * n - mean_);
  // S_n = S_inf + B/n + C/n^2 fitted over the last decade n in [n_max/10, n_max]
  const int first = std::max(2, n_max / 10);
  const int rows = n_max - first + 1;
  Eigen::MatrixXd A(rows, 3);
  Eigen::VectorXd b(rows);
  for (int i = 0; i < rows; ++i) {
    const double n = first + i;
    A(i, 0) = 1.0;
    A(i, 1) = 1.0 / n;
    A(i, 2) = 1.0 / (n * n);
    b(i) = partial[first + i];
  }
  Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  GelfandLevitanResult out;
  out.partial_sum = partial[n_max];
  out.lhs = coef(0);
  out.tail = out.lhs - out.partial_sum;
  out.rhs = mean_ / 2.0 - (v_(0.0) + v_(kPi)) / 4.0;
  out.gap = std::fabs(out.lhs - out.rhs);
  return out;
}

AsymptoticFit Problem::d_asymptotic_fit(double k_lo, double k_hi, int samples) const {
  Eigen::MatrixXd A(samples, 4);
  Eigen::VectorXd b(samples);
  for (int i = 0; i < samples; ++i) {
    const double k = k_lo + (k_hi - k_lo) * i / (samples - 1);
    const double val = (2.0 * k * std::exp(-kPi * k) * d(cplx(-k * k, 0.0))).real();
    for (int p = 0; p < 4; ++p) A(i, p) = std::pow(k, -(p + 1));
    b(i) = val - 1.0;
  }
  Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  AsymptoticFit out;
  out.coeff1 = coef(0);
  out.coeff2 = coef(1);
  out.expected1 = kPi * mean_ / 2.0;
  out.expected2 = (kPi * kPi * mean_ * mean_ - 2.0 * (v_(0.0) + v_(kPi))) / 8.0;
  return out;
}

}  // namespace trf::sl
