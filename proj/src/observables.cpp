#include "ebill/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ebill/quadrature.hpp"

namespace ebill {

using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// C_eta and C_xi over the full circular basis. With P = int R_i R_j' r^2 dr and
// Q = int R_i R_j r dr (radial factors of |m|), the angular integrals give
//   C_eta: dm = 0 -> P/2, dm = +2 -> P/4 - m_j Q/4, dm = -2 -> P/4 + m_j Q/4,
//   C_xi : dm = 0 -> P/2, dm = +2 -> -P/4 + m_j Q/4, dm = -2 -> -P/4 - m_j Q/4,
// with dm = m_i - m_j.
void dilation_matrices(const BasisIndex& index, int panels, Eigen::MatrixXd& c_eta, Eigen::MatrixXd& c_xi) {
  const int N = index.N();
  const int M = index.M();
  const BesselZeroTable zeros(M, N);
  const QuadratureRule rule = composite_gauss_legendre(panels, 16, 0.0, 1.0);
  const Eigen::Index nodes = rule.size();
  const int funcs = (M + 1) * N;
  Eigen::MatrixXd value(nodes, funcs), deriv(nodes, funcs);
  std::vector<double> seq(static_cast<std::size_t>(M) + 2);
  for (int o = 0; o <= M; ++o) {
    for (int n = 1; n <= N; ++n) {
      const double k = zeros(o, n);
      const double norm = std::sqrt(2.0) / bessel_j(o + 1, k);
      for (Eigen::Index i = 0; i < nodes; ++i) {
        bessel_j_sequence(k * rule.nodes(i), seq);
        const auto so = static_cast<std::size_t>(o);
        const double dj = o == 0 ? -seq[1] : 0.5 * (seq[so - 1] - seq[so + 1]);
        value(i, o * N + n - 1) = norm * seq[so];
        deriv(i, o * N + n - 1) = norm * k * dj;
      }
    }
  }
  const Eigen::VectorXd w1 = rule.weights.cwiseProduct(rule.nodes);
  const Eigen::VectorXd w2 = w1.cwiseProduct(rule.nodes);
  const Eigen::MatrixXd P = value.transpose() * w2.asDiagonal() * deriv;
  const Eigen::MatrixXd Q = value.transpose() * w1.asDiagonal() * value;

  const int dim = index.size();
  c_eta = Eigen::MatrixXd::Zero(dim, dim);
  c_xi = Eigen::MatrixXd::Zero(dim, dim);
  for (int mi = -M; mi <= M; ++mi) {
    for (int mj = std::max(-M, mi - 2); mj <= std::min(M, mi + 2); mj += 2) {
      const int dm = mi - mj;
      for (int n = 1; n <= N; ++n) {
        for (int np = 1; np <= N; ++np) {
          const int fi = std::abs(mi) * N + n - 1;
          const int fj = std::abs(mj) * N + np - 1;
          const double p = P(fi, fj), q = Q(fi, fj);
          double e = 0.0, x = 0.0;
          if (dm == 0) {
            e = x = 0.5 * p;
          } else if (dm == 2) {
            e = 0.25 * p - 0.25 * mj * q;
            x = -0.25 * p + 0.25 * mj * q;
          } else {
            e = 0.25 * p + 0.25 * mj * q;
            x = -0.25 * p - 0.25 * mj * q;
          }
          c_eta(index.linear(n, mi), index.linear(np, mj)) = e;
          c_xi(index.linear(n, mi), index.linear(np, mj)) = x;
        }
      }
    }
  }
}

}  // namespace

EnergyOperator::EnergyOperator(const HamiltonianOperators& ops, const ReducedModel& model, int radial_panels)
    : model_(&model) {
  if (ops.index.size() != model.basis.full_dim()) throw DomainError("EnergyOperator: basis mismatch");
  dilation_matrices(ops.index, radial_panels, c_eta_, c_xi_);
  const Eigen::MatrixXd E = model.embedding();
  const Eigen::MatrixXd eta = E.transpose() * (c_eta_ - c_eta_.transpose()) * E;
  const Eigen::MatrixXd xi = E.transpose() * (c_xi_ - c_xi_.transpose()) * E;
  // (C - C^T) / 2i for real C.
  d_eta_ = cd(0.0, -0.5) * eta.cast<cd>();
  d_xi_ = cd(0.0, -0.5) * xi.cast<cd>();
}

Eigen::MatrixXcd EnergyOperator::matrix(double t, const DrivingLaw& d) const {
  const ReducedModel& m = *model_;
  const double a = d.a(t), b = d.b(t), ad = d.a_dot(t), bd = d.b_dot(t);
  const GValues g = g_functions_static(a, b);
  const Eigen::MatrixXd real_part = g.g1 * m.G[0] + g.g3 * m.G[2] + ad * ad * (m.G[1] + m.G[3]) +
                                    bd * bd * (m.G[1] - m.G[3]);
  return real_part.cast<cd>() + (ad / a) * d_eta_ + (bd / b) * d_xi_;
}

double EnergyOperator::expectation(const Eigen::VectorXcd& s, double t, const DrivingLaw& d) const {
  const cd e = s.dot(matrix(t, d) * s);
  if (std::abs(e.imag()) > 1e-9 * std::max(1.0, std::abs(e.real()))) {
    throw NumericalError("EnergyOperator: imaginary energy residue " + std::to_string(e.imag()));
  }
  return e.real();
}

std::vector<cd> lab_wavefunction(const SpectralState& state, const DrivingLaw& driving, const CircularBasisGrid& grid,
                                 const std::vector<std::pair<double, double>>& points) {
  const double t = state.t;
  const double a = driving.a(t), b = driving.b(t), ad = driving.a_dot(t), bd = driving.b_dot(t);
  std::vector<cd> out;
  out.reserve(points.size());
  for (const auto& [x, y] : points) {
    const double eta = x / a, xi = y / b;
    const double r = std::hypot(eta, xi);
    if (r > 1.0 + 1e-12) throw DomainError("lab_wavefunction: point outside the ellipse");
    const double s = 0.5 * (ad * x * x / a + bd * y * y / b);
    out.push_back(std::polar(1.0 / std::sqrt(a * b), s) *
                  grid.basis_sum(state.coeffs, std::min(r, 1.0), std::atan2(xi, eta)));
  }
  return out;
}

// ---------------------------------------------------------------------------

PopulationProjector::PopulationProjector(const SpectrumTracker& tracker, std::vector<int> labels,
                                         const DrivingLaw& driving, const ReducedModel& model,
                                         const CircularBasisGrid& grid, int phases_per_period)
    : tracker_(&tracker),
      labels_(std::move(labels)),
      driving_(driving),
      model_(&model),
      grid_(&grid),
      embedding_(model.embedding()),
      phases_(phases_per_period) {
  if (phases_ < 1) throw DomainError("PopulationProjector: need at least one phase");
  if (grid.index().size() != model.basis.full_dim()) throw DomainError("PopulationProjector: basis mismatch");
  for (int label : labels_) tracker.quantum_numbers(label);  // validates
  rows_.reserve(static_cast<std::size_t>(phases_));
  for (int k = 0; k < phases_; ++k) rows_.push_back(compute_row(static_cast<double>(k) / phases_));
}

PopulationProjector::Row PopulationProjector::compute_row(double zeta) const {
  const double t = driving_.time_at_phase(zeta);
  const EllipseGeometry geom = EllipseGeometry::at(driving_, t);
  Eigen::VectorXd x, y;
  grid_->ellipse_points(geom.a, geom.b, x, y);
  Row row;
  row.overlap.resize(static_cast<Eigen::Index>(labels_.size()), model_->dim());
  row.energy.resize(static_cast<Eigen::Index>(labels_.size()));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const EllipticEigenstate s = tracker_->state_at(labels_[i], zeta);
    const Eigen::VectorXd samples = evaluate_eigenstate(s, geom, x, y);
    const Eigen::VectorXcd w = grid_->project(samples, geom.a, geom.b, driving_.a_dot(t), driving_.b_dot(t));
    row.overlap.row(static_cast<Eigen::Index>(i)) = (w.transpose() * embedding_).eval();
    row.energy(static_cast<Eigen::Index>(i)) = s.energy;
  }
  return row;
}

std::optional<int> PopulationProjector::grid_index(double t) const {
  const double x = t / driving_.period() * phases_;
  const double k = std::round(x);
  if (std::abs(x - k) > 1e-7) return std::nullopt;
  long idx = static_cast<long>(k) % phases_;
  if (idx < 0) idx += phases_;
  return static_cast<int>(idx);
}

Eigen::VectorXd PopulationProjector::populations(const Eigen::VectorXcd& reduced, double t) const {
  if (auto k = grid_index(t)) return (rows_[static_cast<std::size_t>(*k)].overlap * reduced).cwiseAbs();
  return (compute_row(driving_.phase(t)).overlap * reduced).cwiseAbs();
}

Eigen::VectorXd PopulationProjector::energies(double t) const {
  if (auto k = grid_index(t)) return rows_[static_cast<std::size_t>(*k)].energy;
  return compute_row(driving_.phase(t)).energy;
}

// ---------------------------------------------------------------------------

ObservableSeries evaluate_observables(const Trajectory& traj, const DrivingLaw& driving, const EnergyOperator& energy,
                                      const PopulationProjector* projector) {
  ObservableSeries out;
  out.omega = driving.omega();
  out.times = traj.times;
  out.energy.reserve(traj.times.size());
  if (projector) {
    for (int label : projector->labels()) out.populations[label].reserve(traj.times.size());
  }
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    out.energy.push_back(energy.expectation(traj.states[k], t, driving));
    if (projector) {
      const Eigen::VectorXd p = projector->populations(traj.states[k], t);
      const Eigen::VectorXd e = projector->energies(t);
      for (std::size_t i = 0; i < projector->labels().size(); ++i) {
        out.populations[projector->labels()[i]].push_back(p(static_cast<Eigen::Index>(i)));
      }
      out.population_sum.push_back(p.squaredNorm());
      out.spectral_energy.push_back(e.dot(p.cwiseAbs2()));
    }
  }
  if (!out.energy.empty()) {
    const auto [lo, hi] = std::minmax_element(out.energy.begin(), out.energy.end());
    out.e_min = *lo;
    out.e_max = *hi;
  }
  return out;
}

Extremes extremal_energies(const ObservableSeries& series) {
  if (series.energy.empty()) throw DomainError("extremal_energies: empty series");
  const auto [lo, hi] = std::minmax_element(series.energy.begin(), series.energy.end());
  bool under = true;
  if (series.times.size() > 1 && series.omega > 0.0) {
    const double span = std::abs(series.times.back() - series.times.front());
    const double per_period = (series.times.size() - 1) / (span * series.omega / (2.0 * kPi));
    under = per_period < 40.0;
  }
  return {*hi, *lo, under};
}

std::optional<double> beating_period(const ObservableSeries& series, int label) {
  const auto it = series.populations.find(label);
  if (it == series.populations.end()) throw DomainError("beating_period: label not tracked");
  const std::vector<double>& p = it->second;
  const std::size_t n = p.size();
  if (n < 8 || series.omega <= 0.0) return std::nullopt;

  const double t0 = series.times.front();
  const double span = series.times.back() - t0;
  double mean = 0.0, wsum = 0.0;
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n - 1));
    wsum += w[k];
    mean += w[k] * p[k];
  }
  mean /= wsum;

  // Direct DFT on an 8x oversampled frequency grid; at least two beats in the window.
  const double f_max = series.omega / 4.0 / (2.0 * kPi);
  const double df = 1.0 / (8.0 * span);
  const double f_min = 2.0 / span;
  std::vector<double> freq, amp;
  for (double f = f_min; f <= f_max; f += df) {
    cd sum = 0.0;
    const cd step = std::polar(1.0, -2.0 * kPi * f * (series.times[1] - t0));
    cd rot = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      sum += w[k] * (p[k] - mean) * rot;
      rot *= step;
    }
    freq.push_back(f);
    amp.push_back(2.0 * std::abs(sum) / wsum);
  }
  if (amp.size() < 3) return std::nullopt;
  std::vector<double> sorted = amp;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const auto peak = std::max_element(amp.begin(), amp.end());
  if (*peak < 1e-5 || *peak < 5.0 * median) return std::nullopt;
  const auto k = static_cast<std::size_t>(peak - amp.begin());
  double f = freq[k];
  if (k > 0 && k + 1 < amp.size()) {
    const double den = amp[k - 1] - 2.0 * amp[k] + amp[k + 1];
    if (den < 0.0) f += 0.5 * (amp[k - 1] - amp[k + 1]) / den * df;
  }
  return 1.0 / f;
}

}  // namespace ebill
