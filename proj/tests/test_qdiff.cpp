#include "doctest.h"
#include "oracles.hpp"
#include "trf/qdiff.hpp"

using namespace trf;
using namespace trf::qdiff;

namespace {
// Phi(z + i h)/Phi(z) = 1 + e^{-i pi h^2} e^{-2 pi h z} for h = b and h = 1/b
cplx shift_rhs(double h, cplx z) { return 1.0 + std::exp(-kI * kPi * h * h - 2.0 * kPi * h * z); }

const Scattering& scat04() {
  static const Scattering s(1.0, 0.4);
  return s;
}
}  // namespace

TEST_SUITE("qdiff") {
  TEST_CASE("dilog integral against a shifted-contour oracle") {
    for (double b : {0.3, 0.6, 1.0, 1.4, 2.0}) {
      Dilog D(b);
      for (cplx z : {cplx(0.3, 0), cplx(-1.2, 0.3), cplx(2.5, -0.4), cplx(0.1, -0.8 * D.c_b()), cplx(-3, 0.7 * D.c_b())}) {
        CAPTURE(b);
        CAPTURE(z);
        CHECK(std::abs(std::exp(D.integral(z) - oracle::dilog_log(b, z)) - 1.0) < 1e-9);
      }
    }
  }

  TEST_CASE("dilog shift relations on strip samples") {
    for (double b : {0.6, 1.0, 1.4}) {
      Dilog D(b);
      const double cb = D.c_b();
      double worst = 0.0;
      for (double h : {b, 1.0 / b}) {
        // z and z + ih both inside |im| < c_b, kept a quarter of the room away from the edges
        const double lo = -cb, room = 2.0 * cb - h;
        for (int j = 0; j < 50; ++j) {
          const cplx z(-2.0 + 4.0 * j / 49.0, lo + room * (0.25 + 0.5 * ((j * 7) % 50) / 49.0));
          const cplx lhs = std::exp(D.integral(z + kI * h) - D.integral(z));
          // the right side reaches e^{20} at the strip corners, so the error is taken relative
          worst = std::max(worst, std::abs(lhs / shift_rhs(h, z) - 1.0));
        }
      }
      CAPTURE(b);
      CHECK(worst < 1e-8);
    }
  }

  TEST_CASE("dilog continuation agrees with the shift relations") {
    Dilog D(1.0);
    for (cplx z : {cplx(0.4, 0.3), cplx(-0.7, -0.2), cplx(1.1, 0.9)})
      CHECK(std::abs(D(z + kI) / D(z) - (1.0 - std::exp(-2.0 * kPi * z))) < 1e-8);
    Dilog E(0.7);
    const cplx z(0.2, 1.5);
    CHECK(std::abs(E(z) / E(z - kI * 0.7) - shift_rhs(0.7, z - kI * 0.7)) < 1e-10);
  }

  TEST_CASE("dilog self-duality, unit modulus and decay") {
    for (double b : {0.6, 1.4, 0.35}) {
      Dilog D(b), Dd(1.0 / b);
      for (cplx z : {cplx(0.3, 0.1), cplx(-1.1, -0.5), cplx(2.0, 0.0)})
        CHECK(std::abs(std::exp(D.integral(z) - Dd.integral(z)) - 1.0) < 1e-9);
    }
    Dilog D(0.7);
    for (double x : {0.3, -2.0, 5.0}) CHECK(std::abs(std::abs(D(x)) - 1.0) < 1e-8);
    Dilog D8(0.8);
    CHECK(std::abs(D8(cplx(8.0, 0.2)) - 1.0) < 1e-6);
    CHECK(std::abs(D8(cplx(8.0, 0.2)) / std::exp(oracle::dilog_log(0.8, cplx(8.0, 0.2))) - 1.0) < 1e-9);
    // far left Phi ~ exp(i pi z^2 + i pi (b^2 + b^-2)/12 ... ), so only the modulus of the ratio is tested
    CHECK(std::isfinite(std::abs(D8(cplx(-8.0, 0.2)))));
  }

  TEST_CASE("dilog shift parameters and poles") {
    Dilog D(0.8);
    CHECK(D.c_b() == doctest::Approx(0.5 * (0.8 + 1.25)).epsilon(1e-15));
    CHECK(D.beta() == doctest::Approx(kPi / 12.0 * (0.64 + 1.5625)).epsilon(1e-15));
    CHECK(std::abs(D.q() - std::exp(kI * kPi * 0.64)) < 1e-15);
    CHECK_THROWS_AS(D(cplx(0.0, -D.c_b())), DomainError);
    CHECK_THROWS_AS(D.integral(cplx(0.0, 1.2 * D.c_b())), DomainError);
    CHECK_THROWS_AS(Dilog(0.0), DomainError);
  }

  TEST_CASE("theta partition and the spectral parameter") {
    for (double b : {0.5, 1.0, 1.7})
      for (double x : {1e-6, 0.3, 2.0, 9.0}) CHECK(theta_b(b, x) + theta_b(b, -x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(theta_b(1.0, 0.0), DomainError);
    for (cplx k : {cplx(0.3, 0.2), cplx(-0.4, 0.45), cplx(0.0, 0.5)}) {
      CHECK(std::abs(k_of_lambda(1.0, lambda_of_k(1.0, k)) - k) < 1e-12);
    }
    CHECK(std::abs(lambda_of_k(1.0, cplx(0, 0.5)) + 2.0) < 1e-14);
    CHECK_THROWS_AS(k_of_lambda(1.0, 3.0), DomainError);
  }

  TEST_CASE("free kernel against its Fourier integral") {
    double worst = 0.0;
    int samples = 0;
    for (auto [b, k] : {std::pair{1.0, cplx(0, 0.5)}, {0.8, cplx(0.3, 0.4)}, {1.3, cplx(-0.2, 0.1)}, {0.6, cplx(0.7, 0.6)}})
      for (double x : {0.0, 0.4, 1.0, 2.5, -3.0}) {
        worst = std::max(worst, std::abs(free_kernel(b, k, x) - oracle::free_kernel_fourier(b, k, x)));
        ++samples;
      }
    CHECK(samples == 20);
    CHECK(worst < 1e-6);
    for (double x : {0.2, 1.0, 3.0}) CHECK(free_kernel(1.2, cplx(0.1, 0.3), x) == free_kernel(1.2, cplx(0.1, 0.3), -x));
    // regular at 0
    CHECK(std::abs(free_kernel(1.0, cplx(0.2, 0.3), 1e-9) - free_kernel(1.0, cplx(0.2, 0.3), 0.0)) < 1e-8);
    CHECK_THROWS_AS(free_kernel(1.0, 0.4, 1.0), DomainError);
    // approaching the strip corner from inside
    CHECK(std::abs(free_kernel(1.0, cplx(0.0, 0.5 - 1e-6), 1.0) - free_kernel(1.0, cplx(0.0, 0.5), 1.0)) < 1e-6);
  }

  TEST_CASE("free kernel decay envelope") {
    const cplx k(0.3, 0.4);
    const double ratio = std::abs(free_kernel(0.8, k, 4.0) / free_kernel(0.8, k, 2.0));
    CHECK(ratio < 1.01 * std::exp(-2.0 * kPi * 0.4 * 2.0));
    for (double x : {1.0, 3.0, 6.0, 10.0})
      CHECK(std::abs(free_kernel(0.8, k, x)) < 2.0 * std::abs(free_kernel(0.8, k, 0.0)) * std::exp(-2.0 * kPi * 0.4 * x));
  }

  TEST_CASE("free equation weakly on the Fourier side") {
    // f^ a bump on [-1, 1]; H0 multiplies by 2 cosh(2 pi b p)
    auto fhat = [](double p) { return std::fabs(p) < 1.0 ? std::exp(-1.0 / (1.0 - p * p)) : 0.0; };
    for (auto [b, k] : {std::pair{1.0, cplx(0.2, 0.15)}, {0.7, cplx(0.0, 0.35)}, {1.3, cplx(-0.3, 0.1)}}) {
      const cplx lam = lambda_of_k(b, k);
      double worst = 0.0;
      for (int j = 0; j <= 40; ++j) {
        const double p = -1.0 + j / 20.0;
        worst = std::max(worst, std::abs((2.0 * std::cosh(2.0 * kPi * b * p) - lam) * free_kernel_fourier(b, k, p) * fhat(p) - fhat(p)));
      }
      CHECK(worst < 1e-7);
    }
  }

  TEST_CASE("M coefficient") {
    Dilog D(1.0);
    CHECK(std::abs(m_coefficient(D, 0.5)) == doctest::Approx(1.0 / (2.0 * std::sinh(kPi))).epsilon(1e-10));
    CHECK(std::abs(m_coefficient(D, 0.5)) == doctest::Approx(0.04330).epsilon(1e-4));
    for (double k : {0.2, 0.9, 1.7}) CHECK(std::abs(std::conj(m_coefficient(D, k)) - m_coefficient(D, -k)) < 1e-8);
    for (double b : {0.7, 1.0, 1.6}) {
      Dilog Db(b);
      double worst = 0.0;
      for (int j = 0; j <= 38; ++j) worst = std::max(worst, modulus_residual(Db, 0.1 + 0.05 * j));
      CAPTURE(b);
      CHECK(worst < 1e-7);
    }
  }

  TEST_CASE("scattering solution: reality, evenness and asymptotics") {
    const auto& S = scat04();
    const Scattering Sm(1.0, -0.4);
    const cplx k = 0.4;
    for (double x : {-8.0, -6.0, -3.0, 0.0, 1.5}) {
      CHECK(std::fabs(S.phi(x).imag()) < 1e-7);
      CHECK(std::abs(S.phi(x) - Sm.phi(x)) < 1e-7);
    }
    for (double x : {-8.0, -6.0}) {
      const cplx as = S.m() * std::exp(2.0 * kPi * kI * k * x) + S.m_minus() * std::exp(-2.0 * kPi * kI * k * x);
      CHECK(std::abs(S.phi(x) - as) < 1e-3);
    }
    CHECK(std::abs(S.f_plus(-8.0) - std::exp(2.0 * kPi * kI * k * -8.0)) < 1e-3);
    CHECK(std::abs(S.f_minus(-8.0) - std::exp(-2.0 * kPi * kI * k * -8.0)) < 1e-3);
    for (double x : {-2.0, 0.7}) CHECK(std::abs(S.f_minus(x) - Sm.f_plus(x)) < 1e-9);
    CHECK_THROWS_AS(Scattering(1.0, 1e-4), DomainError);
    CHECK_THROWS_AS(Scattering(1.0, cplx(0.2, 0.7)), DomainError);
  }

  TEST_CASE("scattering relation and Casorati identity") {
    const auto& S = scat04();
    const double b = 1.0;
    const cplx k = 0.4;
    for (double x : {-3.0, -1.0, 0.5})
      CHECK(std::abs(S.phi(x) - S.m() * S.f_plus(x) - S.m_minus() * S.f_minus(x)) < 1e-5);
    const cplx c1 = S.casorati_f_minus_phi(-3.0), c2 = S.casorati_f_minus_phi(0.5);
    const cplx expected = 2.0 * std::sinh(2.0 * kPi * b * k) * S.m();
    CHECK(std::abs(c1 - c2) < 1e-5);
    CHECK(std::abs(c1 - expected) < 1e-5);
    CHECK(std::abs(S.casorati_f_minus_f_plus(-1.0) - 2.0 * std::sinh(2.0 * kPi * b * k)) < 1e-5);
    for (double x : {-6.0, -2.0, 1.0}) {
      CHECK(std::abs(S.phi_equation_residual(x)) < 1e-8);
      CHECK(std::abs(S.f_plus_equation_residual(x)) < 1e-5);
    }
    const Scattering T(0.7, cplx(0.3, 0.2));
    for (double x : {-2.0, 1.0})
      CHECK(std::abs(T.casorati_f_minus_phi(x) - 2.0 * std::sinh(2.0 * kPi * 0.7 * T.k()) * T.m()) < 1e-5);
  }

  TEST_CASE("full resolvent kernel") {
    const Scattering S(1.0, cplx(0.3, 0.3));
    const cplx r = S.resolvent(-2.0, -1.0);
    CHECK(std::isfinite(std::abs(r)));
    CHECK(std::abs(r - S.resolvent(-1.0, -2.0)) < 1e-9);
    CHECK(std::abs(S.resolvent(-1.5, -1.5) - S.resolvent(-1.5, -1.5 + 1e-6)) < 1e-4);
    const double d0 = std::abs(S.resolvent(-1.5, -1.5));
    for (double d : {1.0, 2.0, 3.0}) CHECK(std::abs(S.resolvent(-1.5 - d, -1.5)) < 2.0 * d0 * std::exp(-2.0 * kPi * 0.3 * d));
  }

  TEST_CASE("Weyl relation on Gaussians") {
    CHECK(weyl_commutation_residual(1.0, {-1.0, 0.0, 0.0}) < 1e-10);
    CHECK(weyl_commutation_residual(0.6, {-1.0, 1.0, 0.0}) < 1e-10);
    CHECK(weyl_commutation_residual(1.3, {-2.0, 0.0, 0.0}) < 1e-10);
    // U and V do not commute on their own
    const Gaussian g{-1.0, 0.0, 0.0};
    const Gaussian uv = apply_u(1.0, apply_v(1.0, g)), vu = apply_v(1.0, apply_u(1.0, g));
    CHECK(std::abs(std::exp(uv.C - vu.C) - std::exp(2.0 * kI * kPi)) < 1e-12);
    CHECK(std::abs(apply_u(0.5, g)(0.3) - g(0.3) * 0.0 - std::exp(-std::pow(cplx(0.3, 0.5), 2))) < 1e-14);
    CHECK_THROWS_AS(weyl_commutation_residual(1.0, {0.5, 0.0, 0.0}), DomainError);
  }

  TEST_CASE("mirror curve H(1): doubling stability and Weyl law") {
    const auto s = mirror_spectrum(1.0, mirror_h_zeta(1.0), 160, weyl_constant_h_zeta(1.0));
    for (int j = 0; j < 5; ++j) CHECK(std::fabs(s.values[j] - s.reference[j]) < 1e-4 * s.reference[j]);
    CHECK(s.positive);
    CHECK(s.resolved >= 20);
    CHECK(std::fabs(s.weyl_fit / s.weyl_expected - 1.0) < 0.2);
    CHECK(s.weyl_expected == doctest::Approx(1.0 / (kPi * kPi)));
    for (size_t j = 1; j < s.values.size(); ++j) CHECK(s.values[j] >= s.values[j - 1]);
  }

  TEST_CASE("mirror curve ground state grows with zeta") {
    double last = 0.0;
    for (double z : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double e0 = galerkin_eigenvalues(1.0, mirror_h_zeta(z), 60)[0];
      CHECK(e0 > last);
      last = e0;
    }
  }

  TEST_CASE("mirror curves H_mn") {
    const auto s = mirror_spectrum(1.0, mirror_h_mn(1, 1), 160, weyl_constant_h_mn(1.0, 1, 1));
    CHECK(s.resolved >= 10);
    CHECK(std::fabs(s.weyl_fit / s.weyl_expected - 1.0) < 0.2);
    const auto t = mirror_spectrum(0.8, mirror_h_mn(1, 2), 120, weyl_constant_h_mn(0.8, 1, 2));
    CHECK(t.resolved >= 5);
    CHECK(t.positive);
    CHECK_THROWS_AS(mirror_h_mn(0, 2), DomainError);
    CHECK_THROWS_AS(mirror_h_zeta(-1.0), DomainError);
    // too small a basis to fit: flagged by a zero slope
    CHECK(mirror_spectrum(1.0, mirror_h_zeta(1.0), 12, weyl_constant_h_zeta(1.0)).weyl_fit == 0.0);
  }
}
