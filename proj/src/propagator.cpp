#include "ebill/propagator.hpp"

#include <cmath>
#include <complex>

namespace ebill {

using cd = std::complex<double>;

GValues g_functions(double t, const DrivingLaw& d) {
  const double a = d.a(t), b = d.b(t);
  const double aa = d.a_ddot(t) * a, bb = d.b_ddot(t) * b;
  return {-1.0 / (a * a) - 1.0 / (b * b), aa + bb, 1.0 / (a * a) - 1.0 / (b * b), aa - bb};
}

GValues g_functions_static(double a, double b) {
  return {-1.0 / (a * a) - 1.0 / (b * b), 0.0, 1.0 / (a * a) - 1.0 / (b * b), 0.0};
}

HamiltonianOperators assemble_operators(const CouplingTable& table, OperatorConvention convention) {
  HamiltonianOperators ops;
  ops.index = table.basis();
  const auto a = table.assemble(convention);
  for (int k = 0; k < 4; ++k) ops.A[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)];
  return ops;
}

Eigen::VectorXcd rhs(double t, const Eigen::VectorXcd& c, const HamiltonianOperators& ops, const DrivingLaw& driving) {
  if (c.size() != ops.index.size()) throw DomainError("rhs: state and table bases differ");
  return cd(0.0, -1.0) * (ops.at(g_functions(t, driving)) * c);
}

Eigen::VectorXcd ReducedModel::to_full(const Eigen::VectorXcd& s) const {
  return basis.projector * (modes * s);
}

Eigen::VectorXcd ReducedModel::from_full(const Eigen::VectorXcd& c) const {
  return modes.transpose() * (basis.projector.transpose() * c);
}

ReducedModel build_reduced_model(const HamiltonianOperators& ops, const SpectralBasis& basis,
                                 const DrivingLaw& driving, double energy_cutoff) {
  if (basis.full_dim() != ops.index.size()) throw DomainError("build_reduced_model: basis and table differ");
  ReducedModel model;
  model.basis = basis;
  model.energy_cutoff = energy_cutoff;
  model.reference = g_functions_static(driving.a0(), driving.b0());

  const Eigen::MatrixXd& P = basis.projector;
  std::array<Eigen::MatrixXd, 4> F;
  for (std::size_t k = 0; k < 4; ++k) F[k] = P.transpose() * ops.A[k] * P;
  const GValues& r = model.reference;
  Eigen::MatrixXd h_ref = r.g1 * F[0] + r.g3 * F[2];
  h_ref = 0.5 * (h_ref + h_ref.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h_ref);
  if (solver.info() != Eigen::Success) throw NumericalError("build_reduced_model: eigensolver failed");
  Eigen::Index keep = 0;
  while (keep < solver.eigenvalues().size() && solver.eigenvalues()(keep) <= energy_cutoff) ++keep;
  if (keep == 0) throw DomainError("build_reduced_model: no modes below the energy cutoff");
  if (keep == solver.eigenvalues().size()) {
    throw TruncationError("build_reduced_model: energy cutoff exceeds the circular basis; enlarge N, M");
  }
  model.modes = solver.eigenvectors().leftCols(keep);
  model.levels = solver.eigenvalues().head(keep);
  for (std::size_t k = 0; k < 4; ++k) {
    Eigen::MatrixXd g = model.modes.transpose() * F[k] * model.modes;
    model.G[k] = 0.5 * (g + g.transpose());
  }
  return model;
}

PreparedState prepare_initial_state(const EllipticEigenstate& eig, const DrivingLaw& driving,
                                    const ReducedModel& model, const CircularBasisGrid& grid,
                                    double max_discarded, double max_model_discarded) {
  if (grid.index().size() != model.basis.full_dim()) {
    throw DomainError("prepare_initial_state: grid and model bases differ");
  }
  const double t = 0.0;
  const EllipseGeometry geom = EllipseGeometry::at(driving, t);
  Eigen::VectorXd x, y;
  grid.ellipse_points(geom.a, geom.b, x, y);
  const Eigen::VectorXd samples = evaluate_eigenstate(eig, geom, x, y);
  const Eigen::VectorXcd c = grid.project(samples, geom.a, geom.b, driving.a_dot(t), driving.b_dot(t)).conjugate();

  PreparedState out;
  out.report.basis_discarded = 1.0 - c.squaredNorm();
  if (out.report.basis_discarded > max_discarded) {
    throw TruncationError("prepare_initial_state: discarded weight " + std::to_string(out.report.basis_discarded) +
                          " exceeds " + std::to_string(max_discarded) + "; enlarge N, M");
  }
  Eigen::VectorXcd s = model.from_full(c);
  out.report.model_discarded = 1.0 - s.squaredNorm();
  if (out.report.model_discarded > max_model_discarded) {
    throw TruncationError("prepare_initial_state: weight outside the reduced model " +
                          std::to_string(out.report.model_discarded) + " exceeds " +
                          std::to_string(max_model_discarded) + "; raise the energy cutoff");
  }
  s /= s.norm();
  out.reduced = s;
  out.state = {model.to_full(s), t};
  return out;
}

std::vector<double> sample_times(double t_start, double t_end, double dt) {
  if (!(dt > 0.0)) throw DomainError("sample_times: sample_dt must be positive");
  const double span = std::abs(t_end - t_start);
  const double dir = t_end >= t_start ? 1.0 : -1.0;
  const auto count = static_cast<long>(std::floor(span / dt + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count) + 2);
  for (long k = 0; k <= count; ++k) out.push_back(t_start + dir * static_cast<double>(k) * dt);
  if (std::abs(out.back() - t_end) > 1e-9 * dt) out.push_back(t_end);
  return out;
}

namespace {

// Interaction-picture generator of the reduced model: u' = -i e^{i L t} Delta(t) e^{-i L t} u.
class InteractionRhs {
 public:
  InteractionRhs(const DrivingLaw& driving, const ReducedModel& model)
      : driving_(&driving), model_(&model), delta_(model.dim(), model.dim()), phase_(model.dim()) {}

  const Eigen::VectorXcd& rotation(double t, double sign) {
    const Eigen::VectorXd& levels = model_->levels;
    for (Eigen::Index i = 0; i < levels.size(); ++i) phase_(i) = std::polar(1.0, sign * levels(i) * t);
    return phase_;
  }

  template <class State>
  State operator()(double t, const State& u) {
    const GValues g = g_functions(t, *driving_);
    const GValues& ref = model_->reference;
    delta_.noalias() = (g.g1 - ref.g1) * model_->G[0];
    delta_.noalias() += g.g2 * model_->G[1];
    delta_.noalias() += (g.g3 - ref.g3) * model_->G[2];
    delta_.noalias() += g.g4 * model_->G[3];
    const Eigen::VectorXcd back = rotation(t, -1.0);
    const State s = back.asDiagonal() * u;
    const State hs = delta_ * s;
    return cd(0.0, -1.0) * (back.conjugate().asDiagonal() * hs);
  }

 private:
  const DrivingLaw* driving_;
  const ReducedModel* model_;
  Eigen::MatrixXd delta_;
  Eigen::VectorXcd phase_;
};

}  // namespace

Trajectory propagate(const Eigen::VectorXcd& initial, const DrivingLaw& driving, const ReducedModel& model,
                     const PropagationConfig& config) {
  if (initial.size() != model.dim()) throw DomainError("propagate: initial state does not match the model");
  if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0)) throw DomainError("propagate: tolerances must be positive");
  if (!(config.norm_tol > 0.0)) throw DomainError("propagate: norm_tol must be positive");

  InteractionRhs f(driving, model);
  const std::vector<double> times = sample_times(config.t_start, config.t_end, config.sample_dt);
  Trajectory traj;
  traj.times.reserve(times.size());
  traj.states.reserve(times.size());
  const double norm0 = initial.norm();

  const Eigen::VectorXcd u0 = f.rotation(config.t_start, 1.0).cwiseProduct(initial);
  OdeTolerances tol{config.rel_tol, config.abs_tol};
  traj.stats = integrate_dp45<Eigen::VectorXcd>(f, config.t_start, u0, times, tol,
                                                [&](double t, const Eigen::VectorXcd& u) {
    Eigen::VectorXcd s = f.rotation(t, -1.0).cwiseProduct(u);
    const double drift = std::abs(s.norm() - norm0);
    traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
    if (drift > config.norm_tol) {
      throw NumericalError("propagate: norm drift " + std::to_string(drift) + " at t = " + std::to_string(t) +
                           " exceeds " + std::to_string(config.norm_tol));
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(s));
  });
  return traj;
}

PeriodMap period_map(const DrivingLaw& driving, const ReducedModel& model, int phases, const OdeTolerances& tol) {
  if (phases < 1) throw DomainError("period_map: need at least one phase per period");
  InteractionRhs f(driving, model);
  PeriodMap map;
  map.period = driving.period();
  std::vector<double> times(static_cast<std::size_t>(phases) + 1);
  for (int k = 0; k <= phases; ++k) times[static_cast<std::size_t>(k)] = map.period * k / phases;
  times.back() = map.period;

  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(model.dim(), model.dim());
  map.steps.reserve(times.size());
  map.stats = integrate_dp45<Eigen::MatrixXcd>(f, 0.0, identity, times, tol,
                                               [&](double t, const Eigen::MatrixXcd& u) {
    map.steps.push_back(f.rotation(t, -1.0).asDiagonal() * u);
  });

  Eigen::MatrixXcd& u_period = map.steps.back();
  map.unitarity_defect = (u_period.adjoint() * u_period - identity).norm();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(u_period, Eigen::ComputeFullU | Eigen::ComputeFullV);
  u_period = svd.matrixU() * svd.matrixV().adjoint();
  return map;
}

Trajectory propagate_periodic(const Eigen::VectorXcd& initial, const PeriodMap& map, int periods, double norm_tol) {
  if (map.steps.size() < 2) throw DomainError("propagate_periodic: empty period map");
  if (initial.size() != map.steps.front().rows()) throw DomainError("propagate_periodic: dimension mismatch");
  if (periods < 1) throw DomainError("propagate_periodic: need at least one period");
  const int phases = static_cast<int>(map.steps.size()) - 1;
  Trajectory traj;
  traj.stats = map.stats;
  traj.times.reserve(static_cast<std::size_t>(periods) * phases + 1);
  traj.states.reserve(traj.times.capacity());
  const double norm0 = initial.norm();
  Eigen::VectorXcd v = initial;
  for (int n = 0; n < periods; ++n) {
    for (int k = 0; k < phases; ++k) {
      Eigen::VectorXcd s = map.steps[static_cast<std::size_t>(k)] * v;
      traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(s.norm() - norm0));
      traj.times.push_back(map.period * (n + static_cast<double>(k) / phases));
      traj.states.push_back(std::move(s));
    }
    v = map.steps.back() * v;
  }
  traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(v.norm() - norm0));
  traj.times.push_back(map.period * periods);
  traj.states.push_back(v);
  if (traj.max_norm_drift > norm_tol) {
    throw NumericalError("propagate_periodic: norm drift " + std::to_string(traj.max_norm_drift) + " exceeds " +
                         std::to_string(norm_tol));
  }
  return traj;
}

}  // namespace ebill
