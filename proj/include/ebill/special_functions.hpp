#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "ebill/errors.hpp"

namespace ebill {

// ---------------------------------------------------------------------------
// Bessel functions of the first kind
// ---------------------------------------------------------------------------

/// J_m(x) for x >= 0. Negative orders use J_{-m} = (-1)^m J_m.
double bessel_j(int m, double x);

/// Fills out[j] = J_j(x) for j = 0 .. out.size()-1 with one backward
/// (Miller) recurrence. x >= 0.
void bessel_j_sequence(double x, std::span<double> out);

/// d/dx J_m(x).
double bessel_j_derivative(int m, double x);

/// Positive zeros k_{m,n} of J_m, m = 0..max_order, n = 1..max_index.
///
/// Zeros of J_0 start from McMahon's expansion; higher orders are bracketed
/// by interlacing, k_{m-1,n} < k_{m,n} < k_{m-1,n+1}, and refined by a
/// safeguarded Newton iteration until |J_m(k)| < 1e-12.
class BesselZeroTable {
 public:
  BesselZeroTable() = default;
  BesselZeroTable(int max_order, int max_index);

  /// k_{|m|,n}; throws DomainError when outside the table.
  double operator()(int m, int n) const;

  int max_order() const { return max_order_; }
  int max_index() const { return max_index_; }

 private:
  int max_order_ = -1;
  int max_index_ = 0;
  Eigen::MatrixXd zeros_;  // (order, index-1)
};

/// n-th positive zero of J_m (n >= 1).
double bessel_zero(int m, int n);

// ---------------------------------------------------------------------------
// Mathieu functions
// ---------------------------------------------------------------------------

enum class MathieuKind { Even, Odd };  // ce / se

const char* to_string(MathieuKind kind);

/// Fourier expansion of ce_l(.,q) or se_l(.,q):
///   ce_l(eta) = sum_j coeffs[j] cos(k_j eta),  se_l(eta) = sum_j coeffs[j] sin(k_j eta)
/// with k_j = first_wavenumber + 2 j. The same coefficients give the
/// modified functions with cosh / sinh kernels.
///
/// Normalisation: integral of Theta^2 over [0, 2 pi] equals pi. Sign: ce_l(0) > 0
/// and se_l'(0) > 0, which is continuous in q and reduces to cos(l eta),
/// sin(l eta) at q = 0.
struct MathieuExpansion {
  MathieuKind kind = MathieuKind::Even;
  int order = 0;
  double q = 0.0;
  double char_value = 0.0;
  int first_wavenumber = 0;
  Eigen::VectorXd coeffs;

  int truncation() const { return static_cast<int>(coeffs.size()); }
  int wavenumber(Eigen::Index j) const { return first_wavenumber + 2 * static_cast<int>(j); }
};

struct CharacteristicValue {
  MathieuKind kind;
  int order;
  double value;
};

inline constexpr int kDefaultMathieuTruncation = 64;

/// alpha_0..alpha_max_order and beta_1..beta_max_order, sorted ascending.
/// Each value is an eigenvalue of one of the four symmetric tridiagonal
/// recurrence matrices; the truncation is doubled until no value moves by
/// more than 1e-10.
std::vector<CharacteristicValue> mathieu_char_values(double q, int max_order,
                                                     int truncation = kDefaultMathieuTruncation);

/// Characteristic value and Fourier coefficients of one Mathieu function.
MathieuExpansion mathieu_expansion(MathieuKind kind, int order, double q,
                                   int truncation = kDefaultMathieuTruncation);

/// ce_l(eta, q) or se_l(eta, q).
double mathieu_angular(const MathieuExpansion& e, double eta);
double mathieu_angular_derivative(const MathieuExpansion& e, double eta);

/// Largest argument accepted by the cosh/sinh kernels of the radial functions.
inline constexpr double kRadialOverflowBound = 700.0;

/// Ce_l(xi, q) or Se_l(xi, q).
double mathieu_radial(const MathieuExpansion& e, double xi,
                      double overflow_bound = kRadialOverflowBound);
double mathieu_radial_derivative(const MathieuExpansion& e, double xi,
                                 double overflow_bound = kRadialOverflowBound);

/// Largest single term |A_k cosh(k xi)| of the radial series, a scale for the
/// cancellation error of mathieu_radial.
double mathieu_radial_scale(const MathieuExpansion& e, double xi);

}  // namespace ebill
