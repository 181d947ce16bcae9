#include "trf/schrodinger.hpp"

#include "magnus.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace trf::schrod {

namespace {

using magnus::kGauss1;
using magnus::kGauss2;

cplx five_point(const std::function<cplx(cplx)>& f, cplx z, double delta) {
  return (8.0 * (f(z + delta) - f(z - delta)) - (f(z + 2 * delta) - f(z - 2 * delta))) / (12.0 * delta);
}

}  // namespace

Scatterer::Scatterer(Potential v, double cutoff_tol, double step) : v_(std::move(v)) {
  double last = 0.0;
  for (int j = 0; j <= 4000; ++j) {
    const double x = 0.25 * j;
    if (std::fabs(v_(x)) >= cutoff_tol || std::fabs(v_(-x)) >= cutoff_tol) last = x;
  }
  if (last >= 999.0) throw DomainError("schrod: potential does not decay below the cutoff tolerance by |x| = 1000");
  X_ = last + 0.5;
  n_ = static_cast<int>(std::ceil(2 * X_ / step));
  n_ = (n_ + 7) / 8 * 8;
  const double h = 2 * X_ / n_;
  nodes_.resize(2 * static_cast<size_t>(n_));
  for (int j = 0; j < n_; ++j) {
    nodes_[2 * j] = v_(-X_ + h * (j + kGauss1));
    nodes_[2 * j + 1] = v_(-X_ + h * (j + kGauss2));
  }
  auto weighted = [this](double x) { return cplx((1.0 + std::fabs(x)) * std::fabs(v_(x))); };
  const double inf = std::numeric_limits<double>::infinity();
  truncation_ = (numkit::integrate(weighted, X_, inf, 1e-10).value + numkit::integrate(weighted, -inf, -X_, 1e-10).value).real();
  // |v| may have kinks, so a fixed rule on short panels rather than an adaptive one
  using GL = boost::math::quadrature::gauss<double, 20>;
  double inner = 0.0;
  for (double a = -X_; a < X_ - 1e-12; a += 0.25)
    inner += GL::integrate([&](double x) { return weighted(x).real(); }, a, std::min(a + 0.25, X_));
  weighted_norm_ = inner + truncation_;
  if (!std::isfinite(weighted_norm_)) throw DomainError("schrod: int (1+|x|)|v| is not finite");
  const double right_tail = numkit::integrate([this](double x) { return cplx(std::fabs(v_(x))); }, X_, inf, 1e-10).value.real();
  tail_l1_.assign(n_ + 1, 0.0);
  tail_l1_[n_] = right_tail;
  for (int j = n_ - 1; j >= 0; --j)
    tail_l1_[j] = tail_l1_[j + 1] + 0.5 * h * (std::fabs(nodes_[2 * j]) + std::fabs(nodes_[2 * j + 1]));
}

JostData Scatterer::jost(cplx k) const {
  if (k == cplx(0.0)) throw DomainError("jost: k = 0");
  if (k.imag() < 0.0) throw DomainError("jost: im k must be >= 0");
  const double h = 2 * X_ / n_;
  const cplx q = k * k;
  JostData J;
  J.k = k;
  J.cutoff = X_;
  J.x.resize(n_ + 1);
  J.f1.resize(n_ + 1);
  J.df1.resize(n_ + 1);
  J.f2.resize(n_ + 1);
  J.df2.resize(n_ + 1);
  for (int j = 0; j <= n_; ++j) J.x[j] = -X_ + h * j;
  const cplx e = std::exp(kI * k * X_);
  cplx y = e, dy = kI * k * e;
  J.f1[n_] = y;
  J.df1[n_] = dy;
  for (int j = n_ - 1; j >= 0; --j) {
    magnus::step<cplx>(nodes_[2 * j] - q, nodes_[2 * j + 1] - q, h, -1, y, dy);
    J.f1[j] = y;
    J.df1[j] = dy;
  }
  y = e;
  dy = -kI * k * e;
  J.f2[0] = y;
  J.df2[0] = dy;
  for (int j = 0; j < n_; ++j) {
    magnus::step<cplx>(nodes_[2 * j] - q, nodes_[2 * j + 1] - q, h, 1, y, dy);
    J.f2[j + 1] = y;
    J.df2[j + 1] = dy;
  }
  const int mid = n_ / 2;
  const cplx w0 = J.df1[mid] * J.f2[mid] - J.f1[mid] * J.df2[mid];
  J.a = w0 / (2.0 * kI * k);
  for (int j = 0; j <= n_; ++j)
    J.wronskian_spread = std::max(J.wronskian_spread, std::abs(J.df1[j] * J.f2[j] - J.f1[j] * J.df2[j] - w0));
  return J;
}

namespace {
// f2 propagated from -X to X with running renormalization; true value = exp(logf) * (y, dy).
struct ScaledEnd {
  cplx y, dy, logf;
};
}  // namespace

static ScaledEnd propagate_f2(const std::vector<double>& nodes, int n, double X, cplx k) {
  const double h = 2 * X / n;
  const cplx q = k * k;
  cplx y = 1.0, dy = -kI * k, logf = kI * k * X;
  for (int j = 0; j < n; ++j) {
    magnus::step<cplx>(nodes[2 * j] - q, nodes[2 * j + 1] - q, h, 1, y, dy);
    const double m = std::abs(y) + std::abs(dy);
    if (m > 1e100 || m < 1e-100) {
      y /= m;
      dy /= m;
      logf += std::log(m);
    }
  }
  return {y, dy, logf};
}

cplx Scatterer::a(cplx k) const {
  if (k == cplx(0.0)) throw DomainError("a: k = 0");
  if (k.imag() < 0.0) throw DomainError("a: im k must be >= 0");
  auto e = propagate_f2(nodes_, n_, X_, k);
  return std::exp(e.logf + kI * k * X_) * (kI * k * e.y - e.dy) / (2.0 * kI * k);
}

Coefficients Scatterer::coefficients(double k) const {
  if (k == 0.0) throw DomainError("coefficients: k = 0");
  auto e = propagate_f2(nodes_, n_, X_, cplx(k));
  Coefficients c;
  c.a = std::exp(e.logf + kI * k * X_) * (kI * k * e.y - e.dy) / (2.0 * kI * k);
  c.b = std::exp(e.logf - kI * k * X_) * (e.dy + kI * k * e.y) / (2.0 * kI * k);
  return c;
}

std::vector<double> Scatterer::bound_states(double kappa_max, double step) const {
  auto f = [this](double kappa) { return a(cplx(0.0, kappa)).real(); };
  return numkit::find_real_roots(f, 0.5 * step, kappa_max, step, 1e-14);
}

cplx Scatterer::free_resolvent(cplx k, double x, double y) {
  return -std::exp(kI * k * std::fabs(x - y)) / (2.0 * kI * k);
}

cplx Scatterer::resolvent(const JostData& J, double x, double y) const {
  const double h = 2 * X_ / n_;
  const cplx q = J.k * J.k;
  auto value = [&](double t, bool first) {
    if (t >= X_) return first ? std::exp(kI * J.k * t) : cplx(0.0);
    if (t <= -X_) return first ? cplx(0.0) : std::exp(-kI * J.k * t);
    int j = std::clamp(static_cast<int>(std::floor((t + X_) / h)), 0, n_ - 1);
    const double delta = t - J.x[j];
    cplx f = first ? J.f1[j] : J.f2[j];
    cplx df = first ? J.df1[j] : J.df2[j];
    if (delta != 0.0)
      magnus::step<cplx>(v_(J.x[j] + kGauss1 * delta) - q, v_(J.x[j] + kGauss2 * delta) - q, delta, 1, f, df);
    return f;
  };
  const double hi = std::max(x, y), lo = std::min(x, y);
  // Outside the cutoff the Jost functions are pure exponentials; only the needed one is used.
  cplx f1 = hi >= X_ ? std::exp(kI * J.k * hi) : value(hi, true);
  cplx f2 = lo <= -X_ ? std::exp(-kI * J.k * lo) : value(lo, false);
  return -f1 * f2 / (2.0 * kI * J.k * J.a);
}

TraceCheck Scatterer::trace_difference(cplx lambda) const {
  const cplx k = std::sqrt(lambda);
  if (!(k.imag() > 0.0)) throw DomainError("trace_difference: lambda on the continuous spectrum");
  JostData J = jost(k);
  if (std::abs(J.a) < 1e-10) throw DomainError("trace_difference: lambda is a bound state");
  const double h = 2 * X_ / n_;
  const int mid = n_ / 2;
  auto simpson = [&](int half) {
    cplx s = 0.0;
    for (int i = -half; i <= half; ++i) {
      const int j = mid + i;
      const double w = (i == -half || i == half) ? 1.0 : ((i + half) % 2 ? 4.0 : 2.0);
      s += w * (J.f1[j] * J.f2[j] - J.a);
    }
    return s * h / 3.0;
  };
  TraceCheck t;
  const cplx pref = kI / (2.0 * k * J.a);
  std::vector<double> ns;
  for (int half : {n_ / 4, 3 * n_ / 8, n_ / 2}) {
    t.partial.push_back(pref * simpson(half));
    ns.push_back(h * half);
  }
  // Past +-X both Jost functions are free waves, so f1 f2 - a = beta e^{+-2ikx} there and the
  // tails integrate in closed form.
  const cplx ik = kI * k, ex = std::exp(ik * X_);
  const cplx right = -ex * (J.df2[n_] + ik * J.f2[n_]) / (4.0 * ik * ik);
  const cplx left = -ex * (ik * J.f1[0] - J.df1[0]) / (4.0 * ik * ik);
  t.lhs = t.partial.back() + pref * (right + left);
  const double delta = std::pow(2.2e-16, 0.2) * (1.0 + std::abs(k));
  const cplx da = five_point([this](cplx kk) { return a(kk); }, k, delta);
  t.rhs = -da / (2.0 * k * a(k));
  t.gap = std::abs(t.lhs - t.rhs);
  return t;
}

std::vector<Expr> Scatterer::riccati(int l_max) const {
  if (!v_.expr()) throw DomainError("riccati: needs a parsed potential for exact derivatives");
  std::vector<Expr> sig(l_max + 1, Expr::constant(0.0));  // sig[0] = 0
  if (l_max >= 1) sig[1] = *v_.expr();
  for (int l = 2; l <= l_max; ++l) {
    Expr s = -sig[l - 1].derivative();
    for (int j = 1; j <= l - 1; ++j) {
      if (l - j - 1 == 0) continue;  // sigma_0 = 0
      s = s - sig[l - j - 1] * sig[j];
    }
    sig[l] = s;
  }
  return sig;
}

double Scatterer::riccati_integral(int l) const {
  const Expr s = riccati(l)[l];
  // fixed 20-point Gauss on short panels: sigma_l is analytic near the axis, and adaptive
  // refinement only chases rounding in the high-order trees
  using GL = boost::math::quadrature::gauss<double, 20>;
  numkit::KahanSum total;
  for (double a = -X_; a < X_ - 1e-12; a += 0.25) {
    const double b = std::min(a + 0.25, X_);
    total.add(GL::integrate([&](double x) { return s.eval(x); }, a, b));
  }
  return total.sum.real();
}

RiccatiSeriesCheck Scatterer::riccati_log_a(cplx k, int l_max) const {
  RiccatiSeriesCheck r;
  r.log_a = std::log(a(k));
  const cplx z = 2.0 * kI * k;
  cplx zp = z;
  for (int l = 1; l <= l_max; ++l) {
    r.partial_sum -= riccati_integral(l) / zp;
    zp *= z;
  }
  // even orders integrate to rounding, so the first omitted term that counts is the next odd one
  const int next = (l_max + 1) % 2 ? l_max + 1 : l_max + 2;
  if (next > l_max + 1) zp *= z;
  r.first_omitted = std::abs(riccati_integral(next) / zp);
  return r;
}

const Scatterer::Table& Scatterer::table() const {
  std::lock_guard<std::mutex> lock(table_mutex_);
  if (table_) return *table_;
  auto t = std::make_shared<Table>();
  using GL = boost::math::quadrature::gauss<double, 10>;
  const auto& abs = GL::abscissa();
  const auto& wts = GL::weights();
  const double q0 = 1e-6, ratio = 1.5;
  t->q_max = 40.0;
  for (double lo = q0; lo < t->q_max; lo *= ratio) {
    const double hi = std::min(lo * ratio, t->q_max);
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    for (size_t i = 0; i < abs.size(); ++i) {
      for (int sgn : {-1, 1}) {
        if (abs[i] == 0.0 && sgn < 0) continue;
        t->q.push_back(c + sgn * r * abs[i]);
        t->w.push_back(r * wts[i]);
      }
    }
  }
  for (double q : t->q) t->log_abs_a.push_back(std::log(std::abs(coefficients(q).a)));
  // (0, q0]: log|a| ~ alpha + beta log q from two samples
  const double l1 = std::log(std::abs(coefficients(q0).a)), l2 = std::log(std::abs(coefficients(q0 / 2).a));
  const double beta = (l1 - l2) / std::log(2.0), alpha = l1 - beta * std::log(q0);
  t->head_integral = q0 * (alpha + beta * (std::log(q0) - 1.0));
  t->tail_coeff = t->q_max * t->q_max * std::log(std::abs(coefficients(t->q_max).a));
  double vmin = 0.0;
  for (double v : nodes_) vmin = std::min(vmin, v);
  t->kappas = bound_states(std::sqrt(-vmin) + 0.5);
  table_ = t;
  return *table_;
}

IdentityCheck Scatterer::zf_identity(int l) const {
  const Table& t = table();
  double integral = 0.0;
  for (size_t i = 0; i < t.q.size(); ++i) integral += 2.0 * t.w[i] * std::pow(t.q[i], 2 * l) * t.log_abs_a[i];
  IdentityCheck c;
  if (l == 0) {
    integral += 2.0 * t.head_integral;
    c.tail = 2.0 * t.tail_coeff / t.q_max;
    integral += c.tail;
  } else {
    // log|a| decays faster than any power for smooth v; report the size at the edge instead
    c.tail = std::fabs(std::pow(t.q_max, 2 * l + 1) * t.tail_coeff / (t.q_max * t.q_max));
  }
  cplx bound = 0.0;
  for (double kappa : t.kappas) bound += std::pow(kI * kappa, 2 * l + 1);
  c.lhs = integral / (kPi * kI) + 2.0 / (2 * l + 1) * bound;
  c.rhs = std::pow(1.0 / (2.0 * kI), 2 * l + 1) * riccati_integral(2 * l + 1);
  c.gap = std::abs(c.lhs - c.rhs);
  return c;
}

cplx Scatterer::dispersion_a(cplx k) const {
  if (!(k.imag() > 0.0)) throw DomainError("dispersion_a: needs im k > 0");
  const Table& t = table();
  cplx integral = 0.0;
  for (size_t i = 0; i < t.q.size(); ++i)
    integral += t.w[i] * t.log_abs_a[i] * (1.0 / (t.q[i] - k) + 1.0 / (-t.q[i] - k));
  integral += -2.0 / k * t.head_integral;
  cplx prod = 1.0;
  for (double kappa : t.kappas) prod *= (k - kI * kappa) / (k + kI * kappa);
  return std::exp(integral / (kPi * kI)) * prod;
}

double Scatterer::jost_bound_excess(const JostData& J) const {
  double worst = -std::numeric_limits<double>::infinity();
  const double ak = std::abs(J.k);
  for (size_t j = 0; j < J.x.size(); ++j) {
    const double s = tail_l1_[j];
    const double lhs = std::abs(std::exp(-kI * J.k * J.x[j]) * J.f1[j] - 1.0);
    const double bound = s / ak * std::exp(s / ak);
    worst = std::max(worst, lhs - bound - 1e-12);
  }
  return worst;
}

}  // namespace trf::schrod
