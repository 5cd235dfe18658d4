#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>

#include <unistd.h>

#include "ebill/coupling_tables.hpp"

using namespace ebill;
namespace fs = std::filesystem;

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("ebill_test_" + std::to_string(::getpid()) + "_" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

double max_asymmetry(const std::vector<Eigen::MatrixXd>& ops) {
  double worst = 0.0;
  for (const auto& A : ops) worst = std::max(worst, (A - A.transpose()).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

TEST_SUITE("coupling_tables") {
  TEST_CASE("basis index is an m-major bijection") {
    const BasisIndex idx(5, 3);
    CHECK(idx.size() == 35);
    int expected = 0;
    for (int m = -3; m <= 3; ++m) {
      for (int n = 1; n <= 5; ++n) {
        CHECK(idx.linear(n, m) == expected);
        CHECK(idx.n_of(expected) == n);
        CHECK(idx.m_of(expected) == m);
        ++expected;
      }
    }
  }

  TEST_CASE("Bessel product integrals: normalisation and orthogonality") {
    for (int m : {-3, 0, 2, 7}) {
      for (int n = 1; n <= 4; ++n) {
        const double k = bessel_zero(std::abs(m), n);
        const double j = bessel_j(m + 1, k);
        CHECK(bessel_product_integral(n, m, n, 0, 0, 1) == doctest::Approx(0.5 * j * j).epsilon(1e-12));
        for (int np = 1; np <= 4; ++np) {
          if (np != n) CHECK(std::abs(bessel_product_integral(n, m, np, 0, 0, 1)) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("Bessel product integral against adaptive Simpson") {
    const double k = bessel_zero(0, 1), kp = bessel_zero(2, 1);
    auto f = [&](double r) { return std::cyl_bessel_j(0.0, k * r) * std::cyl_bessel_j(2.0, kp * r) * r * r * r; };
    CHECK(std::abs(bessel_product_integral(1, 0, 1, 2, 2, 3) - simpson(f, 0.0, 1.0, 1e-14)) < 1e-10);

    const double k2 = bessel_zero(3, 2), kp2 = bessel_zero(1, 3);
    auto g = [&](double r) { return std::cyl_bessel_j(3.0, k2 * r) * std::cyl_bessel_j(1.0, kp2 * r); };
    CHECK(std::abs(bessel_product_integral(2, 3, 3, -2, -2, 0) - simpson(g, 0.0, 1.0, 1e-14)) < 1e-10);

    // Negative orders reduce by J_{-m} = (-1)^m J_m.
    const double k3 = bessel_zero(1, 1), kp3 = bessel_zero(1, 2);
    auto h = [&](double r) { return -std::cyl_bessel_j(1.0, k3 * r) * -std::cyl_bessel_j(3.0, kp3 * r) * r; };
    CHECK(std::abs(bessel_product_integral(1, -1, 2, -2, 0, 1) - simpson(h, 0.0, 1.0, 1e-14)) < 1e-10);
  }

  TEST_CASE("f2 is the r^3 moment over the normalisation") {
    const CouplingTable t = build_tables(4, 4);
    for (int m = -4; m <= 4; ++m) {
      for (int n = 1; n <= 4; ++n) {
        for (int np = 1; np <= 4; ++np) {
          const double den = 2.0 * bessel_j(m + 1, bessel_zero(std::abs(m), n)) *
                             bessel_j(m + 1, bessel_zero(std::abs(m), np));
          CHECK(t.f2(m)(n - 1, np - 1) ==
                doctest::Approx(bessel_product_integral(n, m, np, 0, 0, 3) / den).epsilon(1e-10));
        }
      }
    }
  }

  TEST_CASE("smallest build and absent partners") {
    const CouplingTable t = build_tables(1, 1);
    CHECK(t.f1(0).allFinite());
    CHECK(t.f2(-1).allFinite());
    CHECK(t.has_lower(1));
    CHECK_FALSE(t.has_lower(0));
    CHECK_FALSE(t.has_upper(0));
    CHECK_THROWS_AS(t.f3(0), DomainError);
    CHECK_THROWS_AS(t.f5(1), DomainError);
    CHECK_THROWS_AS(build_tables(0, 2), DomainError);
  }

  TEST_CASE("doubling the quadrature order changes no entry") {
    const CouplingTable a = build_tables(5, 5, 32);
    const CouplingTable b = build_tables(5, 5, 64);
    double worst = 0.0;
    for (int m = -5; m <= 5; ++m) {
      worst = std::max(worst, (a.f1(m) - b.f1(m)).cwiseAbs().maxCoeff());
      worst = std::max(worst, (a.f2(m) - b.f2(m)).cwiseAbs().maxCoeff());
      if (a.has_lower(m)) {
        worst = std::max(worst, (a.f3(m) - b.f3(m)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (a.f4(m) - b.f4(m)).cwiseAbs().maxCoeff());
      }
      if (a.has_upper(m)) {
        worst = std::max(worst, (a.f5(m) - b.f5(m)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (a.f6(m) - b.f6(m)).cwiseAbs().maxCoeff());
      }
    }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("build is deterministic and truncation keeps entries") {
    const CouplingTable a = build_tables(6, 6);
    const CouplingTable b = build_tables(6, 6);
    CHECK(a.checksum() == b.checksum());
    CHECK(a == b);
    const CouplingTable small = a.truncated(4, 3);
    CHECK(small == build_tables(4, 3));
    CHECK_THROWS_AS(a.truncated(7, 2), InsufficientBasisError);
  }

  TEST_CASE("assembled operators: symmetry and selection rule") {
    const CouplingTable t = build_tables(8, 8);
    const auto ops = t.assemble();
    CHECK(max_asymmetry(ops) < 1e-10);
    CHECK(max_asymmetry(t.assemble(OperatorConvention::Appendix)) < 1e-10);

    const BasisIndex idx = t.basis();
    for (const auto& A : ops) {
      for (int i = 0; i < idx.size(); ++i) {
        for (int j = 0; j < idx.size(); ++j) {
          const int dm = std::abs(idx.m_of(i) - idx.m_of(j));
          if (dm != 0 && dm != 2) REQUIRE(A(i, j) == 0.0);
        }
      }
    }

    const CouplingTable literal = build_tables(8, 8, kDefaultQuadOrder, L15Reading::Literal);
    CHECK(max_asymmetry(literal.assemble()) > 1e-3);
  }

  TEST_CASE("cache round trip and distinct load errors") {
    const CouplingTable t = build_tables(4, 4);
    const fs::path file = temp_file("tables.ebt");
    save_table(t, file);
    const CouplingTable back = load_table(file);
    CHECK(back == t);
    CHECK(back.checksum() == t.checksum());
    CHECK(load_table(file, 3, 2) == t.truncated(3, 2));
    CHECK_THROWS_AS(load_table(file, 5, 4), InsufficientBasisError);

    const std::string bytes = slurp(file);
    const fs::path bad = temp_file("bad.ebt");

    std::string corrupt = bytes;
    corrupt[corrupt.size() - 3] = static_cast<char>(corrupt[corrupt.size() - 3] ^ 0x5a);
    spit(bad, corrupt);
    CHECK_THROWS_AS(load_table(bad), ChecksumError);

    spit(bad, bytes.substr(0, bytes.size() - 17));
    CHECK_THROWS_AS(load_table(bad), TruncatedFileError);

    std::string versioned = bytes;
    const auto pos = versioned.find("\"version\":1");
    REQUIRE(pos != std::string::npos);
    versioned[pos + 10] = '7';
    spit(bad, versioned);
    CHECK_THROWS_AS(load_table(bad), VersionError);

    spit(bad, "not a table at all");
    CHECK_THROWS_AS(load_table(bad), IoError);
    CHECK_THROWS_AS(load_table(temp_file("missing.ebt")), IoError);

    fs::remove(file);
    fs::remove(bad);
  }
}
