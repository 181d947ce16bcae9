#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "trf/schrodinger.hpp"

using namespace trf;

namespace {
schrod::Scatterer make(const char* text) { return schrod::Scatterer(Potential::parse(text)); }

const schrod::Scatterer& soliton() {
  static const schrod::Scatterer s = make("-2*sech(x)^2");
  return s;
}

const schrod::Scatterer& gaussian() {
  static const schrod::Scatterer s = make("-exp(-x^2)");
  return s;
}

// reflectionless one-soliton data
cplx soliton_a(cplx k) { return (k - kI) / (k + kI); }
}  // namespace

TEST_SUITE("schrodinger") {
  TEST_CASE("free Jost solutions are plane waves") {
    auto s = make("0");
    auto J = s.jost(cplx(1.3, 0.2));
    for (size_t j = 0; j < J.x.size(); j += 7) {
      CHECK(std::abs(J.f1[j] - std::exp(kI * J.k * J.x[j])) < 1e-13);
      CHECK(std::abs(J.f2[j] - std::exp(-kI * J.k * J.x[j])) < 1e-13);
    }
    CHECK(std::abs(s.a(2.0) - 1.0) < 1e-14);
    CHECK(std::abs(s.coefficients(2.0).b) < 1e-14);
    CHECK(s.bound_states(3.0).empty());
  }

  TEST_CASE("one-soliton Jost solution in closed form") {
    const auto& s = soliton();
    // f1 ~ e^{ix} at +inf: e^{ix}(1 + i tanh x)/(1 + i)
    auto J = s.jost(1.0);
    double worst = 0.0;
    for (size_t j = 0; j < J.x.size(); ++j) {
      const double x = J.x[j];
      cplx exact = std::exp(kI * x) * (1.0 + kI * std::tanh(x)) / (1.0 + kI);
      worst = std::max(worst, std::abs(J.f1[j] - exact));
    }
    CHECK(worst < 1e-8);
    CHECK(J.wronskian_spread < 1e-10);
    // on the imaginary axis f1(x, i) = sech(x)/2, decaying both ways
    auto B = s.jost(kI);
    // integrating toward -inf at a zero of a amplifies rounding like e^{|x|}, so stop at x = -5
    for (size_t j = 0; j < B.x.size(); j += 101)
      if (B.x[j] > -5.0) CHECK(std::abs(B.f1[j] - 0.5 / std::cosh(B.x[j])) < 1e-8);
  }

  TEST_CASE("transition coefficients") {
    const auto& s = soliton();
    auto c1 = s.coefficients(1.0);
    CHECK(std::abs(c1.a - cplx(0.0, -1.0)) < 1e-10);
    CHECK(std::abs(c1.b) < 1e-10);
    auto c2 = s.coefficients(2.0);
    CHECK(std::abs(std::abs(c2.a) - 1.0) < 1e-10);
    CHECK(std::abs(std::arg(c2.a) - std::arg(cplx(2.0, -1.0) / cplx(2.0, 1.0))) < 1e-10);
    for (double k = 0.1; k <= 10.0; k += 0.1) CHECK(std::abs(s.a(k) - soliton_a(k)) < 1e-6);
    // a(-k) = conj a(k) and a -> 1 along the ray
    const auto& g = gaussian();
    CHECK(std::abs(g.a(-1.7) - std::conj(g.a(1.7))) < 1e-12);
    double prev = 1.0;
    for (double k : {5.0, 10.0, 20.0, 40.0}) {
      double dev = std::abs(g.a(k) - 1.0);
      CHECK(dev < prev);
      prev = dev;
    }
  }

  TEST_CASE("unitarity on the real axis") {
    for (const char* v : {"-2*sech(x)^2", "-exp(-x^2)", "x*exp(-x^2) + 2*exp(-(x-1)^2)"}) {
      auto s = make(v);
      for (int i = 0; i < 50; ++i) {
        const double k = 0.05 + 0.2 * i;
        auto c = s.coefficients(k);
        CHECK(std::fabs(std::norm(c.a) - std::norm(c.b) - 1.0) < 1e-7);
      }
    }
  }

  TEST_CASE("bound states") {
    auto one = soliton().bound_states(3.0);
    REQUIRE(one.size() == 1);
    CHECK(std::fabs(one[0] - 1.0) < 1e-6);
    auto two = make("-6*sech(x)^2").bound_states(3.0);
    REQUIRE(two.size() == 2);
    CHECK(std::fabs(two[0] - 1.0) < 1e-6);
    CHECK(std::fabs(two[1] - 2.0) < 1e-6);
    // eigenfunctions decay like e^{-kappa |x|} in both directions
    auto s6 = make("-6*sech(x)^2");
    for (double kappa : two) {
      auto J = s6.jost(cplx(0.0, kappa));
      const double h = 2 * s6.cutoff() / s6.steps();
      const size_t mid = J.f1.size() / 2, off = static_cast<size_t>(std::lround(8.0 / h));
      double peak = 0.0;
      for (auto f : J.f1) peak = std::max(peak, std::abs(f));
      CHECK(std::abs(J.f1[mid - off]) < 5.0 * std::exp(-8.0 * kappa) * peak);
      CHECK(std::abs(J.f1[mid + off]) < 5.0 * std::exp(-8.0 * kappa) * peak);
    }
  }

  TEST_CASE("resolvent kernel") {
    auto free = make("0");
    auto F = free.jost(kI);
    CHECK(std::abs(free.resolvent(F, 0.0, 1.0) - std::exp(-1.0) / 2.0) < 1e-12);
    CHECK(std::abs(schrod::Scatterer::free_resolvent(kI, 0.0, 1.0) - std::exp(-1.0) / 2.0) < 1e-15);
    CHECK(std::abs(schrod::Scatterer::free_resolvent(cplx(1.0, 1.0), 0.3, 0.3) + 1.0 / (2.0 * kI * cplx(1.0, 1.0))) < 1e-15);

    const auto& s = soliton();
    auto J = s.jost(2.0 * kI);  // lambda = -4
    CHECK(std::abs(s.resolvent(J, 0.4, -1.1) - s.resolvent(J, -1.1, 0.4)) < 1e-14);
    // boundary-value oracle on [-20, 20] with Richardson in h
    auto v = [](double x) { return -2.0 / (std::cosh(x) * std::cosh(x)); };
    const int m = 40000;
    double g1 = oracle::green_fd_on(v, -4.0, -20.0, 20.0, m / 2, m / 2 + m / 40, m);
    double g2 = oracle::green_fd_on(v, -4.0, -20.0, 20.0, m, m + m / 20, 2 * m);
    double ref = (4 * g2 - g1) / 3;
    CHECK(std::abs(s.resolvent(J, 0.0, 1.0) - ref) < 1e-5);
  }

  TEST_CASE("second Hilbert identity") {
    const auto& g = gaussian();
    const cplx k(0.8, 0.6);
    auto J = g.jost(k);
    const double X = g.cutoff();
    for (auto [x, y] : {std::pair{0.0, 1.0}, std::pair{-0.7, 0.4}, std::pair{1.5, -2.0}}) {
      auto f = [&](double t) {
        return g.resolvent(J, x, t) * g.potential()(t) * schrod::Scatterer::free_resolvent(k, t, y);
      };
      double p0 = std::min(x, y), p1 = std::max(x, y);
      cplx integral = numkit::integrate(f, -X, p0, 1e-12).value + numkit::integrate(f, p0, p1, 1e-12).value +
                      numkit::integrate(f, p1, X, 1e-12).value;
      // R - R0 = R (H0 - H) R0, so the potential enters with a minus sign
      cplx lhs = g.resolvent(J, x, y) - schrod::Scatterer::free_resolvent(k, x, y);
      CHECK(std::abs(lhs + integral) < 1e-5);
    }
  }

  TEST_CASE("diagonal resolvent solves the third-order equation") {
    const auto& s = soliton();
    const double lambda = -4.0;
    auto J = s.jost(2.0 * kI);
    const double h = 0.01;
    auto R = [&](double x) { return s.resolvent(J, x, x); };
    auto v = [](double x) { return -2.0 / (std::cosh(x) * std::cosh(x)); };
    auto dv = [](double x) { return 4.0 * std::tanh(x) / (std::cosh(x) * std::cosh(x)); };
    for (double x : {-1.5, -0.3, 0.0, 0.8, 2.0}) {
      cplx d1 = (R(x - 2 * h) - 8.0 * R(x - h) + 8.0 * R(x + h) - R(x + 2 * h)) / (12 * h);
      cplx d3 = (R(x + 2 * h) - 2.0 * R(x + h) + 2.0 * R(x - h) - R(x - 2 * h)) / (2 * h * h * h);
      cplx residual = -d3 + 4.0 * (v(x) - lambda) * d1 + 2.0 * dv(x) * R(x);
      CHECK(std::abs(residual) < 1e-3);
    }
  }

  TEST_CASE("Jost bounds and growth at the far end") {
    for (const auto* s : {&soliton(), &gaussian()}) {
      for (cplx k : {cplx(0.5), cplx(2.0), cplx(1.0, 0.5), cplx(0.0, 3.0)}) {
        auto J = s->jost(k);
        CHECK(s->jost_bound_excess(J) <= 0.0);
      }
      // e^{-ikx} f1 = a(k) + O(e^{2 im k x}) past the support
      const cplx k(1.0, 2.0);
      auto J = s->jost(k);
      CHECK(std::abs(std::exp(-kI * k * J.x.front()) * J.f1.front() - J.a) < 1e-6);
    }
    CHECK(gaussian().truncation_bound() < 1e-10);
  }

  TEST_CASE("trace of the resolvent difference") {
    auto z = make("0").trace_difference(-4.0);
    CHECK(std::abs(z.lhs) < 1e-12);
    CHECK(std::abs(z.rhs) < 1e-12);
    const auto& s = soliton();
    for (double lambda : {-4.0, -9.0}) {
      const cplx k = std::sqrt(cplx(lambda));
      const cplx exact = -kI / (k * (k * k + 1.0));  // -(d/d lambda) log a
      auto t = s.trace_difference(lambda);
      CHECK(std::abs(t.rhs - exact) < 1e-8);
      CHECK(std::abs(t.lhs - exact) < 1e-5);
    }
    auto c = gaussian().trace_difference(cplx(2.0, 0.5));
    CHECK(c.gap < 1e-6);
    CHECK_THROWS_AS(s.trace_difference(-1.0), DomainError);
  }

  TEST_CASE("Riccati coefficients") {
    const auto& s = soliton();
    auto sig = s.riccati(5);
    Expr v = *s.potential().expr();
    for (double x : {-1.2, 0.0, 0.9}) {
      CHECK(sig[1].eval(x) == v.eval(x));
      CHECK(std::fabs(sig[2].eval(x) + v.derivative().eval(x)) < 1e-13);
      CHECK(std::fabs(sig[3].eval(x) - (v.derivative().derivative().eval(x) - v.eval(x) * v.eval(x))) < 1e-12);
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    const double sech4 = ts.integrate([](double x) { return 4.0 / std::pow(std::cosh(x), 4); }, -30.0, 30.0);
    CHECK(std::fabs(s.riccati_integral(1) + 4.0) < 1e-10);
    CHECK(std::fabs(s.riccati_integral(3) + sech4) < 1e-10);
    CHECK(std::fabs(s.riccati_integral(2)) < 1e-12);
    CHECK(std::fabs(s.riccati_integral(4)) < 1e-12);
    CHECK_THROWS_AS(schrod::Scatterer(Potential(std::function<double(double)>([](double x) {
                                                  return -std::exp(-x * x);
                                                }), "g")).riccati(3),
                    DomainError);
  }

  TEST_CASE("log a from partial Riccati sums") {
    const auto& s = soliton();
    auto r4 = s.riccati_log_a(10.0 * kI, 4);
    CHECK(std::abs(r4.log_a - std::log(soliton_a(10.0 * kI))) < 1e-10);
    CHECK(r4.first_omitted > 0.0);
    CHECK(std::abs(r4.log_a - r4.partial_sum) <= 2.0 * r4.first_omitted);
    auto r6 = s.riccati_log_a(10.0 * kI, 6);
    CHECK(std::abs(r6.log_a - r6.partial_sum) < std::abs(r4.log_a - r4.partial_sum));
  }

  TEST_CASE("Zakharov-Faddeev identities") {
    const auto& s = soliton();
    auto z0 = s.zf_identity(0);
    CHECK(std::abs(z0.rhs - 2.0 * kI) < 1e-8);
    CHECK(z0.gap < 1e-4);
    auto z1 = s.zf_identity(1);
    CHECK(std::abs(z1.rhs + 2.0 * kI / 3.0) < 1e-8);
    CHECK(z1.gap < 1e-4);
    CHECK(make("0").zf_identity(0).gap < 1e-12);
    for (int l = 0; l <= 2; ++l) CHECK(gaussian().zf_identity(l).gap <= 1e-3);
  }

  TEST_CASE("dispersion relation") {
    for (const auto* s : {&soliton(), &gaussian()}) {
      for (int i = 0; i < 10; ++i) {
        const cplx k(-2.0 + 0.45 * i, 0.2 + 0.3 * (i % 4));
        CHECK(std::abs(s->dispersion_a(k) - s->a(k)) < 1e-4);
      }
    }
    auto repulsive = make("0.5*exp(-x^2)");
    CHECK(std::abs(repulsive.dispersion_a(cplx(0.3, 0.7)) - repulsive.a(cplx(0.3, 0.7))) < 1e-4);
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(make("1/(1+x^2)"), DomainError);
    CHECK_THROWS_AS(soliton().jost(0.0), DomainError);
    CHECK_THROWS_AS(soliton().a(cplx(1.0, -0.1)), DomainError);
  }
}
