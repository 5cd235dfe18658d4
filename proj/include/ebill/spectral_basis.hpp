#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "ebill/coupling_tables.hpp"
#include "ebill/static_spectrum.hpp"

namespace ebill {

/// Real orthonormal subspace of the circular basis that the breathing drive
/// leaves invariant.
///
///  - Sector: one reflection-symmetry sector, spanned by
///      cos-type (Phi_{n,m} + Phi_{n,-m}) / sqrt 2  (Phi_{n,0} for m = 0), or
///      sin-type (Phi_{n,m} - Phi_{n,-m}) / sqrt 2,
///    with (pi_x, pi_y) = (+,+): cos, m even; (-,+): cos, m odd;
///    (+,-): sin, m odd; (-,-): sin, m even.
///  - MParity: all Phi_{n,m} with m of one parity (two sectors).
///  - Full: every Phi_{n,m}.
struct BasisSelection {
  enum class Kind { Sector, MParity, Full };
  Kind kind = Kind::Sector;
  Symmetry symmetry{};  ///< for Sector
  int m_parity = 0;     ///< for MParity: 0 even, 1 odd

  static BasisSelection sector(Symmetry s) { return {Kind::Sector, s, 0}; }
  static BasisSelection m_parity_block(int parity) { return {Kind::MParity, {}, parity & 1}; }
  static BasisSelection full() { return {Kind::Full, {}, 0}; }
  /// The m-parity block containing a symmetry sector.
  static BasisSelection block_of(Symmetry s);
};

struct SpectralBasis {
  BasisIndex index{1, 0};
  BasisSelection selection;
  Eigen::MatrixXd projector;  ///< full_dim x dim, orthonormal real columns

  int dim() const { return static_cast<int>(projector.cols()); }
  int full_dim() const { return index.size(); }
};

SpectralBasis make_basis(const BasisIndex& index, const BasisSelection& selection);

}  // namespace ebill
