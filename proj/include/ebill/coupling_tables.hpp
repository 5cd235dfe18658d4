#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ebill/special_functions.hpp"

namespace ebill {

/// Flat index of the circular-billiard basis Phi_{n,m}, n = 1..N, m = -M..M,
/// m-major and n-minor: linear = (m + M) * N + (n - 1).
class BasisIndex {
 public:
  BasisIndex(int N, int M);

  int N() const { return N_; }
  int M() const { return M_; }
  int size() const { return (2 * M_ + 1) * N_; }

  int linear(int n, int m) const;
  int n_of(int linear) const { return linear % N_ + 1; }
  int m_of(int linear) const { return linear / N_ - M_; }
  bool contains(int n, int m) const { return n >= 1 && n <= N_ && m >= -M_ && m <= M_; }

 private:
  int N_;
  int M_;
};

/// Which entry of the appendix L-table is used for L^15.
enum class L15Reading {
  Consistent,  ///< I(3, 2, 0), matching the offsets of the neighbouring entries
  Literal,     ///< I(3, 3, 0), as printed
};

/// I(o, z, s) = int_0^1 J_m(k_{m,n} r) J_{m+o}(k_{m+z,n'} r) r^s dr
/// with o the Bessel order offset and z the offset of the zero family.
/// Negative orders reduce via J_{-m} = (-1)^m J_m; k_{m,n} = k_{|m|,n}.
/// Composite Gauss-Legendre, panels doubled until two successive estimates
/// agree to `tolerance`.
double bessel_product_integral(int n, int m, int n_prime, int order_offset, int zero_offset, int power,
                               double tolerance = 1e-13);

/// Sign of the kinetic m -> m -+ 2 couplings when assembling operators.
enum class OperatorConvention {
  Consistent,  ///< kinetic and potential terms describe the same ellipse (major axis along x)
  Appendix,    ///< f3, f5 with the printed sign: kinetic part of the ellipse rotated by 90 degrees
};

/// Time-independent coupling tensors f^(1..6)_{n m n'}.
///
/// f1, f2 couple (n, m) to (n', m); f3, f4 to (n', m - 2); f5, f6 to (n', m + 2).
/// Partners outside -M..M are absent: lower(m) exists for m - 2 >= -M and
/// upper(m) for m + 2 <= M; asking for an absent block throws DomainError.
class CouplingTable {
 public:
  CouplingTable() = default;

  int N() const { return N_; }
  int M() const { return M_; }
  int quad_order() const { return quad_order_; }
  L15Reading l15() const { return l15_; }
  BasisIndex basis() const { return {N_, M_}; }

  bool has_lower(int m) const { return m - 2 >= -M_ && m <= M_; }
  bool has_upper(int m) const { return m + 2 <= M_ && m >= -M_; }

  /// N x N blocks indexed (n - 1, n' - 1).
  const Eigen::MatrixXd& f1(int m) const { return diag_.at(slot(m)).first; }
  const Eigen::MatrixXd& f2(int m) const { return diag_.at(slot(m)).second; }
  const Eigen::MatrixXd& f3(int m) const;
  const Eigen::MatrixXd& f4(int m) const;
  const Eigen::MatrixXd& f5(int m) const;
  const Eigen::MatrixXd& f6(int m) const;

  /// The leading N' x N' blocks for |m| <= M' (entries do not depend on the truncation).
  CouplingTable truncated(int N, int M) const;

  /// FNV-1a over the little-endian payload.
  std::uint64_t checksum() const;

  /// Full-basis operators with H(t) = g1 A1 + g2 A2 + g3 A3 + g4 A4:
  /// A1 = f1, A2 = f2 on m -> m; A3 = -f3 / -f5 (Consistent) and A4 = f4 / f6
  /// on m -> m -+ 2.
  std::vector<Eigen::MatrixXd> assemble(OperatorConvention convention = OperatorConvention::Consistent) const;

  friend CouplingTable build_tables(int, int, int, L15Reading);
  friend CouplingTable load_table(const std::filesystem::path&, int, int);
  friend void save_table(const CouplingTable&, const std::filesystem::path&);
  friend bool operator==(const CouplingTable& a, const CouplingTable& b);

 private:
  std::size_t slot(int m) const;
  std::vector<double> payload() const;
  void fill_from(const std::vector<double>& payload);
  void allocate();

  int N_ = 0;
  int M_ = 0;
  int quad_order_ = 0;
  L15Reading l15_ = L15Reading::Consistent;
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> diag_;   // (f1, f2) per m
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> lower_;  // (f3, f4) per m
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> upper_;  // (f5, f6) per m
};

inline constexpr int kDefaultQuadOrder = 64;  // Gauss-Legendre panels of 16 nodes on [0, 1]

/// Builds all tensors for n, n' = 1..N and m = -M..M. `quad_order` is the
/// number of 16-point Gauss-Legendre panels on [0, 1]; DomainError if it
/// resolves fewer than 8 nodes per wavelength of the fastest integrand.
CouplingTable build_tables(int N, int M, int quad_order = kDefaultQuadOrder,
                           L15Reading l15 = L15Reading::Consistent);

inline constexpr std::uint32_t kTableFormatVersion = 1;

/// Binary cache: 8-byte magic "EBILLTAB", uint32 header length, JSON header
/// {magic, version, N, M, quad_order, l15, checksum, payload_bytes}, then
/// the payload as little-endian doubles.
void save_table(const CouplingTable& table, const std::filesystem::path& path);

/// Loads a cache and truncates it to (N, M) when given (-1 keeps the stored
/// size). Distinct errors: IoError (unreadable / not a table), VersionError,
/// TruncatedFileError, ChecksumError, InsufficientBasisError.
CouplingTable load_table(const std::filesystem::path& path, int N = -1, int M = -1);

}  // namespace ebill
