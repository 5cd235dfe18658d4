#include "ebill/special_functions.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ebill {

namespace {

constexpr double kPi = std::numbers::pi;

int miller_start_index(int max_order, double x) {
  const double top = std::max(static_cast<double>(max_order), std::ceil(x));
  int start = static_cast<int>(top) + 30 + static_cast<int>(std::ceil(6.0 * std::cbrt(x)));
  return start + (start % 2);  // even, so the normalisation sum closes on J_0
}

}  // namespace

void bessel_j_sequence(double x, std::span<double> out) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_j: argument must be finite and non-negative, got " + std::to_string(x));
  }
  if (out.empty()) return;
  const int max_order = static_cast<int>(out.size()) - 1;
  if (x == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    return;
  }

  // Miller: recur J_{n-1} = (2n/x) J_n - J_{n+1} downwards from an arbitrary
  // seed, then normalise with J_0 + 2 sum_k J_{2k} = 1.
  const int start = miller_start_index(max_order, x);
  const double two_over_x = 2.0 / x;
  double next = 0.0;   // J_{n+1}
  double curr = 1e-300;  // J_n
  double norm = 0.0;
  std::fill(out.begin(), out.end(), 0.0);
  for (int n = start; n > 0; --n) {
    const double prev = n * two_over_x * curr - next;  // J_{n-1}
    next = curr;
    curr = prev;
    if (n - 1 <= max_order) out[n - 1] = curr;
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * curr;
    if (std::abs(curr) > 1e250) {
      curr *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      for (int j = n - 1; j <= max_order; ++j) out[j] *= 1e-250;
    }
  }
  norm += curr;  // J_0
  const double scale = 1.0 / norm;
  for (double& v : out) v *= scale;
}

double bessel_j(int m, double x) {
  const int order = std::abs(m);
  std::vector<double> values(static_cast<std::size_t>(order) + 1);
  bessel_j_sequence(x, values);
  const double v = values[order];
  return (m < 0 && (order % 2 == 1)) ? -v : v;
}

double bessel_j_derivative(int m, double x) {
  return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x));
}

// ---------------------------------------------------------------------------

namespace {

double mcmahon_j0_zero(int n) {
  const double beta = (n - 0.25) * kPi;
  const double b8 = 8.0 * beta;
  return beta + 1.0 / b8 - 124.0 / (3.0 * b8 * b8 * b8);
}

// Safeguarded Newton for the single zero of J_m inside (lo, hi).
double refine_zero(int m, double lo, double hi, double guess) {
  double flo = bessel_j(m, lo);
  double x = std::clamp(guess, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = bessel_j(m, x);
    if (fx == 0.0) return x;
    if ((fx < 0) == (flo < 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double dfx = bessel_j_derivative(m, x);
    double step = (dfx != 0.0) ? fx / dfx : 0.0;
    double candidate = x - step;
    if (!(candidate > lo && candidate < hi) || dfx == 0.0) {
      candidate = 0.5 * (lo + hi);
      step = x - candidate;
    }
    x = candidate;
    if (std::abs(step) <= 4e-16 * x || hi - lo <= 4e-16 * x) break;
  }
  if (std::abs(bessel_j(m, x)) >= 1e-12) {
    throw NumericalError("bessel zero refinement failed for order " + std::to_string(m));
  }
  return x;
}

}  // namespace

BesselZeroTable::BesselZeroTable(int max_order, int max_index)
    : max_order_(max_order), max_index_(max_index) {
  if (max_order < 0 || max_index < 1) {
    throw DomainError("BesselZeroTable: need max_order >= 0 and max_index >= 1");
  }
  // Order m needs zeros of order m-1 up to index max_index + 1.
  const int base_count = max_index + max_order;
  std::vector<double> previous(static_cast<std::size_t>(base_count));
  for (int n = 1; n <= base_count; ++n) {
    const double guess = mcmahon_j0_zero(n);
    previous[n - 1] = refine_zero(0, guess - 0.5, guess + 0.5, guess);
  }
  zeros_.resize(max_order + 1, max_index);
  for (int n = 1; n <= max_index; ++n) zeros_(0, n - 1) = previous[n - 1];

  for (int m = 1; m <= max_order; ++m) {
    const int count = base_count - m;
    std::vector<double> current(static_cast<std::size_t>(count));
    for (int n = 1; n <= count; ++n) {
      const double lo = previous[n - 1];
      const double hi = previous[n];
      current[n - 1] = refine_zero(m, lo, hi, 0.5 * (lo + hi));
    }
    for (int n = 1; n <= max_index; ++n) zeros_(m, n - 1) = current[n - 1];
    previous = std::move(current);
  }
}

double BesselZeroTable::operator()(int m, int n) const {
  const int order = std::abs(m);
  if (order > max_order_ || n < 1 || n > max_index_) {
    throw DomainError("BesselZeroTable: (" + std::to_string(m) + ", " + std::to_string(n) +
                      ") outside table");
  }
  return zeros_(order, n - 1);
}

double bessel_zero(int m, int n) {
  if (n < 1) throw DomainError("bessel_zero: index must be >= 1");
  const BesselZeroTable table(std::abs(m), n);
  return table(m, n);
}

// ---------------------------------------------------------------------------
// Mathieu
// ---------------------------------------------------------------------------

const char* to_string(MathieuKind kind) { return kind == MathieuKind::Even ? "e" : "o"; }

namespace {

// One of the four parity blocks of the Fourier recurrence in symmetric form.
struct RecurrenceBlock {
  Eigen::VectorXd diag;
  Eigen::VectorXd sub;
  int first_wavenumber = 0;
  bool scaled_first = false;  // ce of even order: first unknown is sqrt(2) A_0
};

RecurrenceBlock recurrence_block(MathieuKind kind, int parity, double q, int size) {
  RecurrenceBlock b;
  b.diag.resize(size);
  b.sub = Eigen::VectorXd::Constant(std::max(size - 1, 0), q);
  if (kind == MathieuKind::Even) {
    b.first_wavenumber = parity;
  } else {
    b.first_wavenumber = parity == 1 ? 1 : 2;
  }
  for (int j = 0; j < size; ++j) {
    const double k = b.first_wavenumber + 2.0 * j;
    b.diag(j) = k * k;
  }
  if (kind == MathieuKind::Even && parity == 0) {
    b.scaled_first = true;
    if (size > 1) b.sub(0) = std::sqrt(2.0) * q;
  } else if (parity == 1) {
    b.diag(0) += (kind == MathieuKind::Even ? q : -q);
  }
  return b;
}

int block_index(MathieuKind kind, int order) {
  return kind == MathieuKind::Even ? order / 2 : (order - 1) / 2;
}

// Number of eigenvalues of the tridiagonal matrix strictly below x.
int sturm_count(const RecurrenceBlock& b, double x) {
  int count = 0;
  double d = 1.0;
  const Eigen::Index n = b.diag.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double off = (i == 0) ? 0.0 : b.sub(i - 1) * b.sub(i - 1);
    d = (b.diag(i) - x) - (i == 0 ? 0.0 : off / d);
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

// index-th (0-based) eigenvalue by Sturm bisection.
double tridiagonal_eigenvalue(const RecurrenceBlock& b, int index) {
  const Eigen::Index n = b.diag.size();
  double lo = b.diag.minCoeff();
  double hi = b.diag.maxCoeff();
  double radius = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(b.sub(i - 1));
    if (i + 1 < n) r += std::abs(b.sub(i));
    radius = std::max(radius, r);
  }
  lo -= radius + 1.0;
  hi += radius + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(b, mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Solves (T - shift I) x = rhs for symmetric tridiagonal T with partial pivoting.
Eigen::VectorXd shifted_tridiagonal_solve(const RecurrenceBlock& b, double shift, Eigen::VectorXd rhs) {
  const Eigen::Index n = b.diag.size();
  Eigen::VectorXd d = b.diag.array() - shift;
  Eigen::VectorXd dl = b.sub;
  Eigen::VectorXd du = b.sub;
  Eigen::VectorXd du2 = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 2, 0));
  std::vector<bool> swapped(static_cast<std::size_t>(n), false);
  const double tiny = 1e-300;

  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs(d(i)) >= std::abs(dl(i))) {
      if (d(i) == 0.0) d(i) = tiny;
      const double fact = dl(i) / d(i);
      dl(i) = fact;
      d(i + 1) -= fact * du(i);
    } else {
      const double fact = d(i) / dl(i);
      d(i) = dl(i);
      dl(i) = fact;
      const double temp = du(i);
      du(i) = d(i + 1);
      d(i + 1) = temp - fact * d(i + 1);
      if (i + 2 < n) {
        du2(i) = du(i + 1);
        du(i + 1) = -fact * du(i + 1);
      }
      swapped[static_cast<std::size_t>(i)] = true;
    }
  }
  if (d(n - 1) == 0.0) d(n - 1) = tiny;

  // L solve
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (swapped[static_cast<std::size_t>(i)]) std::swap(rhs(i), rhs(i + 1));
    rhs(i + 1) -= dl(i) * rhs(i);
  }
  // U solve
  rhs(n - 1) /= d(n - 1);
  if (n > 1) rhs(n - 2) = (rhs(n - 2) - du(n - 2) * rhs(n - 1)) / d(n - 2);
  for (Eigen::Index i = n - 3; i >= 0; --i) {
    rhs(i) = (rhs(i) - du(i) * rhs(i + 1) - du2(i) * rhs(i + 2)) / d(i);
  }
  return rhs;
}

struct BlockSolution {
  double value;
  Eigen::VectorXd coeffs;  // unscaled Fourier coefficients
};

BlockSolution solve_block(MathieuKind kind, int order, double q, int size) {
  const RecurrenceBlock b = recurrence_block(kind, order % 2, q, size);
  const int index = block_index(kind, order);
  const double value = tridiagonal_eigenvalue(b, index);
  if (q == 0.0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
    v(index) = (b.scaled_first && index == 0) ? 1.0 / std::sqrt(2.0) : 1.0;
    return {value, std::move(v)};
  }

  Eigen::VectorXd v = Eigen::VectorXd::Ones(size);
  for (int it = 0; it < 3; ++it) {
    v = shifted_tridiagonal_solve(b, value, v);
    v /= v.norm();
  }
  if (b.scaled_first) v(0) /= std::sqrt(2.0);

  // Replace the recessive tail by continued-fraction ratios
  //   A_k / A_{k-2} = q / ((a - k^2) - q A_{k+2}/A_k),
  // which keeps relative accuracy where inverse iteration only has absolute.
  int tail_start = -1;
  for (int j = 2; j < size; ++j) {
    const double k = b.first_wavenumber + 2.0 * j;
    if (k * k > value + 4.0 * q + 4.0) {
      tail_start = j;
      break;
    }
  }
  if (tail_start > 0 && q > 0.0) {
    std::vector<double> ratio(static_cast<std::size_t>(size) + 1, 0.0);
    for (int j = size - 1; j >= tail_start; --j) {
      const double k = b.first_wavenumber + 2.0 * j;
      ratio[j] = q / ((value - k * k) - q * ratio[j + 1]);
    }
    for (int j = tail_start; j < size; ++j) v(j) = ratio[j] * v(j - 1);
  }

  double norm2 = v.squaredNorm();
  if (b.scaled_first) norm2 += v(0) * v(0);  // 2 A_0^2 + sum_{k>0} A_k^2 = 1
  v /= std::sqrt(norm2);

  double sign_probe = 0.0;
  for (int j = 0; j < size; ++j) {
    sign_probe += kind == MathieuKind::Even ? v(j) : (b.first_wavenumber + 2.0 * j) * v(j);
  }
  if (sign_probe < 0.0) v = -v;
  return {value, std::move(v)};
}

void validate_order(MathieuKind kind, int order, double q) {
  if (order < 0 || (kind == MathieuKind::Odd && order < 1)) {
    throw DomainError("mathieu: invalid order " + std::to_string(order));
  }
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw DomainError("mathieu: q must be finite and non-negative");
  }
}

constexpr int kMaxMathieuTruncation = 4096;
constexpr double kCharValueTolerance = 1e-10;
constexpr double kTailTolerance = 1e-12;

}  // namespace

MathieuExpansion mathieu_expansion(MathieuKind kind, int order, double q, int truncation) {
  validate_order(kind, order, q);
  int size = std::max(truncation, block_index(kind, order) + 16);
  while (size <= kMaxMathieuTruncation) {
    BlockSolution s = solve_block(kind, order, q, size);
    const double refined = tridiagonal_eigenvalue(recurrence_block(kind, order % 2, q, 2 * size),
                                                  block_index(kind, order));
    const double tail = std::abs(s.coeffs(size - 1)) / s.coeffs.cwiseAbs().maxCoeff();
    if (std::abs(refined - s.value) <= kCharValueTolerance && tail < kTailTolerance) {
      MathieuExpansion e;
      e.kind = kind;
      e.order = order;
      e.q = q;
      e.char_value = s.value;
      e.first_wavenumber = recurrence_block(kind, order % 2, q, 1).first_wavenumber;
      e.coeffs = std::move(s.coeffs);
      return e;
    }
    size *= 2;
  }
  throw TruncationError("mathieu_expansion: Fourier truncation did not converge (order " +
                        std::to_string(order) + ", q " + std::to_string(q) + ")");
}

std::vector<CharacteristicValue> mathieu_char_values(double q, int max_order, int truncation) {
  if (max_order < 1) throw DomainError("mathieu_char_values: max_order must be >= 1");
  validate_order(MathieuKind::Even, 0, q);

  auto block_values = [&](MathieuKind kind, int parity, int size) {
    const RecurrenceBlock b = recurrence_block(kind, parity, q, size);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(b.diag, b.sub, Eigen::EigenvaluesOnly);
    return Eigen::VectorXd(solver.eigenvalues());
  };
  auto collect = [&](int size) {
    std::vector<CharacteristicValue> out;
    for (int kind_i = 0; kind_i < 2; ++kind_i) {
      const MathieuKind kind = kind_i == 0 ? MathieuKind::Even : MathieuKind::Odd;
      for (int parity = 0; parity < 2; ++parity) {
        const Eigen::VectorXd values = block_values(kind, parity, size);
        for (Eigen::Index j = 0; j < values.size(); ++j) {
          const int first = recurrence_block(kind, parity, q, 1).first_wavenumber;
          const int order = first + 2 * static_cast<int>(j);
          if (order <= max_order) out.push_back({kind, order, values(j)});
        }
      }
    }
    std::sort(out.begin(), out.end(),
              [](const CharacteristicValue& a, const CharacteristicValue& b) { return a.value < b.value; });
    return out;
  };

  int size = std::max(truncation, max_order + 16);
  while (size <= kMaxMathieuTruncation) {
    auto coarse = collect(size);
    auto fine = collect(2 * size);
    bool converged = coarse.size() == fine.size();
    for (std::size_t i = 0; converged && i < coarse.size(); ++i) {
      converged = coarse[i].kind == fine[i].kind && coarse[i].order == fine[i].order &&
                  std::abs(coarse[i].value - fine[i].value) <= kCharValueTolerance;
    }
    if (converged) return coarse;
    size *= 2;
  }
  throw TruncationError("mathieu_char_values: truncation did not converge at q " + std::to_string(q));
}

double mathieu_angular(const MathieuExpansion& e, double eta) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < e.coeffs.size(); ++j) {
    const double arg = e.wavenumber(j) * eta;
    sum += e.coeffs(j) * (e.kind == MathieuKind::Even ? std::cos(arg) : std::sin(arg));
  }
  return sum;
}

double mathieu_angular_derivative(const MathieuExpansion& e, double eta) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < e.coeffs.size(); ++j) {
    const double k = e.wavenumber(j);
    sum += e.coeffs(j) * k * (e.kind == MathieuKind::Even ? -std::sin(k * eta) : std::cos(k * eta));
  }
  return sum;
}

namespace {

void check_radial_argument(const MathieuExpansion& e, double xi, double bound) {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw DomainError("mathieu_radial: xi must be >= 0");
  const double kmax = e.wavenumber(e.coeffs.size() - 1);
  if (kmax * xi > bound) {
    throw NumericalError("mathieu_radial: k xi = " + std::to_string(kmax * xi) +
                         " exceeds the cosh overflow bound");
  }
}

}  // namespace

double mathieu_radial(const MathieuExpansion& e, double xi, double overflow_bound) {
  check_radial_argument(e, xi, overflow_bound);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < e.coeffs.size(); ++j) {
    const double arg = e.wavenumber(j) * xi;
    sum += e.coeffs(j) * (e.kind == MathieuKind::Even ? std::cosh(arg) : std::sinh(arg));
  }
  return sum;
}

double mathieu_radial_derivative(const MathieuExpansion& e, double xi, double overflow_bound) {
  check_radial_argument(e, xi, overflow_bound);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < e.coeffs.size(); ++j) {
    const double k = e.wavenumber(j);
    sum += e.coeffs(j) * k * (e.kind == MathieuKind::Even ? std::sinh(k * xi) : std::cosh(k * xi));
  }
  return sum;
}

double mathieu_radial_scale(const MathieuExpansion& e, double xi) {
  double scale = 0.0;
  for (Eigen::Index j = 0; j < e.coeffs.size(); ++j) {
    scale = std::max(scale, std::abs(e.coeffs(j)) * std::cosh(e.wavenumber(j) * xi));
  }
  return scale;
}

}  // namespace ebill
