#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ebill/special_functions.hpp"

using namespace ebill;

namespace {

// Zero of J_m by bisection on the standard-library Bessel function, bracketed
// around McMahon's estimate.
double zero_oracle(int m, int n) {
  const double beta = (n + 0.5 * m - 0.25) * std::numbers::pi;
  const double guess = beta - (4.0 * m * m - 1.0) / (8.0 * beta);
  double lo = guess - 0.8, hi = guess + 0.8;
  double flo = std::cyl_bessel_j(double(m), lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = std::cyl_bessel_j(double(m), mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// alpha_0(q) from the continued fraction of the even pi-periodic recurrence.
double alpha0_continued_fraction(double q) {
  auto f = [q](double a) {
    double v = 0.0;
    for (int k = 60; k >= 2; --k) v = q / ((a - 4.0 * k * k) - q * v);
    const double v1 = 2.0 * q / ((a - 4.0) - q * v);
    return a - q * v1;
  };
  const double guess = -2.0 * q + 2.0 * std::sqrt(q);
  double lo = guess - 2.0, hi = guess + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0) == (f(lo) < 0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

int sign_changes(const MathieuExpansion& e, double from, double to, int samples) {
  int count = 0;
  double prev = mathieu_angular(e, from);
  for (int k = 1; k <= samples; ++k) {
    const double v = mathieu_angular(e, from + (to - from) * k / samples);
    if ((v < 0) != (prev < 0) && v != 0.0) ++count;
    if (v != 0.0) prev = v;
  }
  return count;
}

}  // namespace

TEST_SUITE("special_functions") {
  TEST_CASE("bessel_j trivial values") {
    CHECK(bessel_j(0, 0.0) == doctest::Approx(1.0));
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(std::abs(bessel_j(0, 2.404825557695773)) < 1e-12);
    CHECK_THROWS_AS(bessel_j(0, -1.0), DomainError);
  }

  TEST_CASE("bessel_j agrees with the standard library") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 90.0);
    double worst = 0.0;
    for (int trial = 0; trial < 400; ++trial) {
      const int m = trial % 46;
      const double x = ux(rng);
      const double ref = std::cyl_bessel_j(double(m), x);
      worst = std::max(worst, std::abs(bessel_j(m, x) - ref) / std::max(1e-3, std::abs(ref)));
    }
    CHECK(worst < 1e-10);
    CHECK(bessel_j(-3, 2.5) == doctest::Approx(-bessel_j(3, 2.5)).epsilon(1e-15));
  }

  TEST_CASE("bessel recurrence identity") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ux(0.01, 100.0);
    for (int trial = 0; trial < 500; ++trial) {
      const int m = 1 + trial % 45;
      const double x = ux(rng);
      const double lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
      const double rhs = 2.0 * m / x * bessel_j(m, x);
      const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
      REQUIRE(std::abs(lhs - rhs) < 1e-11 * scale);
    }
  }

  TEST_CASE("bessel zeros") {
    CHECK(bessel_zero(0, 1) == doctest::Approx(2.404825557695773).epsilon(1e-13));
    CHECK(bessel_zero(1, 1) == doctest::Approx(3.831705970207512).epsilon(1e-13));
    for (int m = 0; m <= 3; ++m) {
      for (int n = 1; n <= 5; ++n) CHECK(bessel_zero(m, n) == doctest::Approx(zero_oracle(m, n)).epsilon(1e-12));
    }
  }

  TEST_CASE("zero table: monotone, interlacing, refined") {
    const BesselZeroTable t(25, 22);
    for (int m = 0; m <= 25; ++m) {
      for (int n = 1; n <= 22; ++n) {
        CHECK(std::abs(bessel_j(m, t(m, n))) < 1e-12);
        if (n < 22) CHECK(t(m, n) < t(m, n + 1));
        if (m < 25 && n < 22) {
          CHECK(t(m, n) < t(m + 1, n));
          CHECK(t(m + 1, n) < t(m, n + 1));
        }
      }
    }
    CHECK(t(-4, 3) == t(4, 3));
    CHECK_THROWS_AS(t(26, 1), DomainError);
  }

  TEST_CASE("characteristic values at q = 0") {
    for (const auto& cv : mathieu_char_values(0.0, 8)) CHECK(cv.value == doctest::Approx(double(cv.order * cv.order)));
  }

  TEST_CASE("alpha_0(1) against the continued fraction") {
    const double oracle = alpha0_continued_fraction(1.0);
    CHECK(oracle == doctest::Approx(-0.4551386).epsilon(1e-6));
    CHECK(mathieu_expansion(MathieuKind::Even, 0, 1.0).char_value == doctest::Approx(oracle).epsilon(1e-11));
    CHECK(alpha0_continued_fraction(25.0) == doctest::Approx(-40.2567795).epsilon(1e-8));
    CHECK(mathieu_expansion(MathieuKind::Even, 0, 25.0).char_value ==
          doctest::Approx(alpha0_continued_fraction(25.0)).epsilon(1e-10));
  }

  TEST_CASE("characteristic values are ordered alpha_0 < beta_1 < alpha_1 < beta_2") {
    for (double q : {0.3, 1.0, 5.0, 25.0, 60.0}) {
      const auto cv = mathieu_char_values(q, 6);
      for (std::size_t i = 0; i + 1 < cv.size(); ++i) CHECK(cv[i].value < cv[i + 1].value);
      REQUIRE(cv.size() == 13);
      for (std::size_t i = 0; i < cv.size(); ++i) {
        const int expected_order = static_cast<int>((i + 1) / 2);
        CHECK(cv[i].order == expected_order);
        CHECK(cv[i].kind == (i % 2 == 0 ? MathieuKind::Even : MathieuKind::Odd));
      }
    }
  }

  TEST_CASE("doubling the truncation leaves values unchanged") {
    for (double q : {2.0, 40.0}) {
      for (int l = 0; l <= 6; ++l) {
        const auto a = mathieu_expansion(MathieuKind::Even, l, q, 32);
        const auto b = mathieu_expansion(MathieuKind::Even, l, q, 64);
        CHECK(std::abs(a.char_value - b.char_value) < 1e-10);
        for (double eta : {0.0, 0.4, 1.3}) CHECK(std::abs(mathieu_angular(a, eta) - mathieu_angular(b, eta)) < 1e-10);
      }
    }
  }

  TEST_CASE("angular functions: limits, normalisation, zero count") {
    const auto ce0 = mathieu_expansion(MathieuKind::Even, 0, 0.0);
    CHECK(mathieu_angular(ce0, 0.3) == doctest::Approx(mathieu_angular(ce0, 2.1)));
    const auto se1 = mathieu_expansion(MathieuKind::Odd, 1, 0.0);
    CHECK(mathieu_angular(se1, std::numbers::pi / 2) == doctest::Approx(1.0));

    for (int l = 0; l <= 12; ++l) {
      for (double q : {0.5, 10.0, 60.0}) {
        const auto ce = mathieu_expansion(MathieuKind::Even, l, q);
        CHECK(sign_changes(ce, 0.0, std::numbers::pi, 4000) == l);
        if (l >= 1) {
          const auto se = mathieu_expansion(MathieuKind::Odd, l, q);
          // se_l vanishes at 0; count zeros strictly inside (0, pi).
          CHECK(sign_changes(se, 1e-9, std::numbers::pi - 1e-9, 4000) == l - 1);
        }
        double norm = 0.0;
        const int n = 2048;
        for (int k = 0; k < n; ++k) norm += std::pow(mathieu_angular(ce, 2.0 * std::numbers::pi * k / n), 2);
        CHECK(norm * 2.0 * std::numbers::pi / n == doctest::Approx(std::numbers::pi).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("radial functions solve the modified Mathieu equation") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> ul(0, 8);
    std::uniform_real_distribution<double> uq(0.1, 40.0), ux(0.05, 1.2);
    for (int trial = 0; trial < 100; ++trial) {
      const MathieuKind kind = trial % 2 ? MathieuKind::Odd : MathieuKind::Even;
      const int l = std::max(kind == MathieuKind::Odd ? 1 : 0, ul(rng));
      const double q = uq(rng), xi = ux(rng);
      const auto e = mathieu_expansion(kind, l, q);
      const double h = 1e-3;
      auto y = [&](double x) { return mathieu_radial(e, x); };
      const double d2 = (-y(xi + 2 * h) + 16 * y(xi + h) - 30 * y(xi) + 16 * y(xi - h) - y(xi - 2 * h)) / (12 * h * h);
      const double residual = d2 - (e.char_value - 2.0 * q * std::cosh(2.0 * xi)) * y(xi);
      const double scale = mathieu_radial_scale(e, xi) * (1.0 + std::abs(e.char_value) + 2.0 * q * std::cosh(2.0 * xi));
      CHECK(std::abs(residual) / scale < 1e-8);
    }
  }

  TEST_CASE("radial functions continue the angular ones (eta = i xi)") {
    for (int l = 1; l <= 5; ++l) {
      const auto ce = mathieu_expansion(MathieuKind::Even, l, 7.5);
      const auto se = mathieu_expansion(MathieuKind::Odd, l, 7.5);
      CHECK(mathieu_radial(ce, 0.0) == doctest::Approx(mathieu_angular(ce, 0.0)).epsilon(1e-12));
      CHECK(mathieu_radial(se, 0.0) == 0.0);
      CHECK(mathieu_radial_derivative(se, 0.0) ==
            doctest::Approx(mathieu_angular_derivative(se, 0.0)).epsilon(1e-12));
      CHECK(mathieu_radial_derivative(ce, 0.0) == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(mathieu_radial(mathieu_expansion(MathieuKind::Even, 2, 1.0), 500.0), NumericalError);
  }
}
