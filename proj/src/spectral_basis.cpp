#include "ebill/spectral_basis.hpp"

#include <cmath>

namespace ebill {

BasisSelection BasisSelection::block_of(Symmetry s) {
  // cos-type m parity: pi_x = (-1)^m; sin-type: pi_x = -(-1)^m.
  const bool cos_type = s.pi_y > 0;
  const int parity = cos_type ? (s.pi_x > 0 ? 0 : 1) : (s.pi_x > 0 ? 1 : 0);
  return m_parity_block(parity);
}

SpectralBasis make_basis(const BasisIndex& index, const BasisSelection& selection) {
  SpectralBasis basis;
  basis.index = index;
  basis.selection = selection;
  const int N = index.N();
  const int M = index.M();
  std::vector<Eigen::VectorXd> columns;
  auto unit = [&](int n, int m) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(index.size());
    v(index.linear(n, m)) = 1.0;
    return v;
  };

  switch (selection.kind) {
    case BasisSelection::Kind::Full:
      for (int m = -M; m <= M; ++m)
        for (int n = 1; n <= N; ++n) columns.push_back(unit(n, m));
      break;
    case BasisSelection::Kind::MParity:
      for (int m = -M; m <= M; ++m) {
        if (std::abs(m) % 2 != selection.m_parity) continue;
        for (int n = 1; n <= N; ++n) columns.push_back(unit(n, m));
      }
      break;
    case BasisSelection::Kind::Sector: {
      const Symmetry s = selection.symmetry;
      if (std::abs(s.pi_x) != 1 || std::abs(s.pi_y) != 1) throw DomainError("make_basis: parities must be +-1");
      const bool cos_type = s.pi_y > 0;
      const int parity = BasisSelection::block_of(s).m_parity;
      const double h = 1.0 / std::sqrt(2.0);
      for (int m = 0; m <= M; ++m) {
        if (m % 2 != parity) continue;
        if (m == 0 && !cos_type) continue;
        for (int n = 1; n <= N; ++n) {
          if (m == 0) {
            columns.push_back(unit(n, 0));
          } else {
            columns.push_back(h * (unit(n, m) + (cos_type ? 1.0 : -1.0) * unit(n, -m)));
          }
        }
      }
      break;
    }
  }
  if (columns.empty()) throw DomainError("make_basis: selection is empty for this truncation");
  basis.projector.resize(index.size(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) basis.projector.col(static_cast<Eigen::Index>(j)) = columns[j];
  return basis;
}

}  // namespace ebill
