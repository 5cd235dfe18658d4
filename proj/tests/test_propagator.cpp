#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ebill/propagator.hpp"

using namespace ebill;

namespace {

const double kB0 = std::sqrt(0.51);

struct Setup {
  CouplingTable table;
  HamiltonianOperators ops;
  SpectrumTracker tracker;
  CircularBasisGrid grid;

  explicit Setup(double omega)
      : table(build_tables(20, 20)),
        ops(assemble_operators(table)),
        tracker(DrivingLaw(1.0, kB0, 0.1, omega), 50.0),
        grid(ops.index) {}

  ReducedModel model_for(int label, const DrivingLaw& d) const {
    const Symmetry s = tracker.equilibrium()[label - 1].symmetry;
    return build_reduced_model(ops, make_basis(ops.index, BasisSelection::sector(s)), d);
  }
};

const Setup& setup() {
  static const Setup s(5.0);
  return s;
}

double population(const Eigen::VectorXcd& reduced, const PreparedState& ref) {
  return std::abs(ref.reduced.dot(reduced));
}

}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("g-functions") {
    const DrivingLaw still(1.0, kB0, 0.0, 5.0);
    const GValues g0 = g_functions(0.37, still);
    CHECK(g0.g2 == 0.0);
    CHECK(g0.g4 == 0.0);
    CHECK(g0.g1 == doctest::Approx(-1.0 - 1.0 / 0.51));
    CHECK(g_functions_static(1.3, 1.3).g3 == 0.0);

    const DrivingLaw d(1.0, kB0, 0.1, 5.0);
    auto a = [](double t) { return 1.0 + 0.1 * std::sin(5.0 * t); };
    auto b = [](double t) { return std::sqrt(0.51) + 0.1 * std::sin(5.0 * t); };
    for (double t : {0.1, d.period() / 2, 0.9}) {
      const double h = 1e-4;
      const double add = (a(t + h) - 2 * a(t) + a(t - h)) / (h * h);
      const double bdd = (b(t + h) - 2 * b(t) + b(t - h)) / (h * h);
      const GValues g = g_functions(t, d);
      CHECK(g.g1 == doctest::Approx(-1.0 / (a(t) * a(t)) - 1.0 / (b(t) * b(t))).epsilon(1e-12));
      CHECK(g.g3 == doctest::Approx(1.0 / (a(t) * a(t)) - 1.0 / (b(t) * b(t))).epsilon(1e-12));
      CHECK(std::abs(g.g2 - (a(t) * add + b(t) * bdd)) < 1e-5);
      CHECK(std::abs(g.g4 - (a(t) * add - b(t) * bdd)) < 1e-5);
    }
  }

  TEST_CASE("Hamiltonian is real symmetric and conserves m parity") {
    const HamiltonianOperators ops = assemble_operators(build_tables(8, 8));
    const DrivingLaw d(1.0, kB0, 0.1, 7.0);
    for (double t : {0.0, 0.2, 0.71}) {
      const Eigen::MatrixXd H = ops.at(g_functions(t, d));
      CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      for (int i = 0; i < ops.index.size(); ++i) {
        for (int j = 0; j < ops.index.size(); ++j) {
          if ((ops.index.m_of(i) - ops.index.m_of(j)) % 2 != 0) REQUIRE(H(i, j) == 0.0);
        }
      }
    }
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(ops.index.size());
    c(ops.index.linear(2, 0)) = 1.0;
    const Eigen::VectorXcd dc = rhs(0.3, c, ops, d);
    const Eigen::MatrixXd H = ops.at(g_functions(0.3, d));
    CHECK((dc - std::complex<double>(0, -1) * H.col(ops.index.linear(2, 0)).cast<std::complex<double>>())
              .norm() < 1e-14);
    CHECK_THROWS_AS(rhs(0.0, Eigen::VectorXcd::Zero(3), ops, d), DomainError);
  }

  TEST_CASE("sector bases are orthonormal and invariant") {
    const HamiltonianOperators ops = assemble_operators(build_tables(8, 8));
    const DrivingLaw d(1.0, kB0, 0.1, 7.0);
    const Eigen::MatrixXd H = ops.at(g_functions(0.4, d));
    for (int px : {1, -1}) {
      for (int py : {1, -1}) {
        const SpectralBasis basis = make_basis(ops.index, BasisSelection::sector(Symmetry{py, px}));
        const Eigen::MatrixXd& P = basis.projector;
        CHECK((P.transpose() * P - Eigen::MatrixXd::Identity(P.cols(), P.cols())).norm() < 1e-13);
        // H maps the sector into itself.
        const Eigen::MatrixXd HP = H * P;
        CHECK((HP - P * (P.transpose() * HP)).norm() < 1e-10 * H.norm());
      }
    }
    const SpectralBasis even = make_basis(ops.index, BasisSelection::m_parity_block(0));
    const SpectralBasis full = make_basis(ops.index, BasisSelection::full());
    CHECK(even.dim() == 9 * 8);
    CHECK(full.dim() == ops.index.size());
  }

  TEST_CASE("static eigenstates are captured by the basis with mirrored coefficients") {
    const Setup& s = setup();
    const DrivingLaw d(1.0, kB0, 0.0, 5.0);
    for (int label : {1, 4}) {
      const ReducedModel model = s.model_for(label, d);
      const PreparedState prep = prepare_initial_state(s.tracker.equilibrium()[label - 1], d, model, s.grid);
      CHECK(prep.report.basis_discarded < 1e-8);
      CHECK(prep.report.model_discarded < 1e-6);
      CHECK(prep.state.coeffs.norm() == doctest::Approx(1.0).epsilon(1e-12));
      const BasisIndex& idx = s.ops.index;
      for (int m = 1; m <= idx.M(); ++m) {
        for (int n = 1; n <= idx.N(); ++n) {
          const auto cp = prep.state.coeffs(idx.linear(n, m));
          const auto cm = prep.state.coeffs(idx.linear(n, -m));
          CHECK(std::abs(cp - cm) < 1e-10);
          if (m % 2 == 1) CHECK(std::abs(cp) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("reduced model levels reproduce the static spectrum") {
    const Setup& s = setup();
    const DrivingLaw d(1.0, kB0, 0.1, 5.0);
    const ReducedModel model = s.model_for(1, d);
    const auto labels = s.tracker.labels_with(Symmetry{1, 1});
    REQUIRE(labels.size() >= 5);
    for (std::size_t i = 0; i < 5; ++i) {
      const double e = s.tracker.equilibrium()[labels[i] - 1].energy;
      CHECK(model.levels(Eigen::Index(i)) == doctest::Approx(e).epsilon(1e-5));
    }
    CHECK(model.dim() > 20);
    const Eigen::MatrixXd E = model.embedding();
    CHECK((E.transpose() * E - Eigen::MatrixXd::Identity(model.dim(), model.dim())).norm() < 1e-10);
  }

  TEST_CASE("static ellipse leaves an eigenstate stationary") {
    const Setup& s = setup();
    const DrivingLaw d(1.0, kB0, 0.0, 5.0);
    const ReducedModel model = s.model_for(4, d);
    const PreparedState prep = prepare_initial_state(s.tracker.equilibrium()[3], d, model, s.grid);
    PropagationConfig pc;
    pc.t_end = 10 * d.period();
    pc.sample_dt = d.period() / 8;
    const Trajectory traj = propagate(prep.reduced, d, model, pc);
    REQUIRE(traj.times.size() == 81);
    for (const auto& st : traj.states) CHECK(population(st, prep) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(traj.max_norm_drift < 1e-8);
  }

  TEST_CASE("forward then backward integration returns the initial state") {
    const Setup& s = setup();
    const DrivingLaw d(1.0, kB0, 0.1, 5.0);
    const ReducedModel model = s.model_for(4, d);
    const PreparedState prep = prepare_initial_state(s.tracker.equilibrium()[3], d, model, s.grid);
    PropagationConfig fwd;
    fwd.t_end = 3.3 * d.period();
    fwd.sample_dt = d.period();
    const Trajectory there = propagate(prep.reduced, d, model, fwd);
    PropagationConfig back = fwd;
    back.t_start = fwd.t_end;
    back.t_end = 0.0;
    const Trajectory home = propagate(there.states.back(), d, model, back);
    CHECK(home.times.back() == 0.0);
    CHECK((home.states.back() - prep.reduced).norm() < 1e-5);
  }

  TEST_CASE("period map agrees with direct integration") {
    const Setup& s = setup();
    const DrivingLaw d(1.0, kB0, 0.1, 5.0);
    const ReducedModel model = s.model_for(4, d);
    const PreparedState prep = prepare_initial_state(s.tracker.equilibrium()[3], d, model, s.grid);
    const PeriodMap map = period_map(d, model, 16, OdeTolerances{});
    CHECK(map.steps.size() == 17);
    CHECK(map.unitarity_defect < 1e-6);
    const Trajectory periodic = propagate_periodic(prep.reduced, map, 20);
    PropagationConfig pc;
    pc.t_end = 20 * d.period();
    pc.sample_dt = d.period() / 16;
    const Trajectory direct = propagate(prep.reduced, d, model, pc);
    REQUIRE(periodic.times.size() == direct.times.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < direct.times.size(); ++k) {
      REQUIRE(std::abs(periodic.times[k] - direct.times[k]) < 1e-12);
      worst = std::max(worst, (periodic.states[k] - direct.states[k]).norm());
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("ground state stays put under slow driving") {
    const Setup& s = setup();
    const DrivingLaw d(1.0, kB0, 0.1, 5.0);
    const ReducedModel model = s.model_for(1, d);
    const PreparedState prep = prepare_initial_state(s.tracker.equilibrium()[0], d, model, s.grid);
    const PeriodMap map = period_map(d, model, 8, OdeTolerances{});
    const Trajectory traj = propagate_periodic(prep.reduced, map, 50);
    // Stroboscopic samples sit at the equilibrium shape, so the overlap with
    // the prepared state is the ground-state population.
    for (std::size_t k = 0; k < traj.times.size(); k += 8) CHECK(population(traj.states[k], prep) > 0.99);
  }

  TEST_CASE("norm drift beyond tolerance aborts") {
    const Setup& s = setup();
    const DrivingLaw d(1.0, kB0, 0.1, 5.0);
    const ReducedModel model = s.model_for(4, d);
    const PreparedState prep = prepare_initial_state(s.tracker.equilibrium()[3], d, model, s.grid);
    PropagationConfig pc;
    pc.rel_tol = 1e-2;
    pc.abs_tol = 1e-2;
    pc.t_end = 5 * d.period();
    pc.sample_dt = d.period() / 4;
    pc.norm_tol = 1e-14;
    CHECK_THROWS_AS(propagate(prep.reduced, d, model, pc), NumericalError);
  }

  TEST_CASE("sample times") {
    const auto t = sample_times(0.0, 1.0, 0.25);
    REQUIRE(t.size() == 5);
    CHECK(t.back() == 1.0);
    const auto u = sample_times(0.0, 1.1, 0.25);
    CHECK(u.size() == 6);
    CHECK(u.back() == 1.1);
    const auto back = sample_times(1.0, 0.0, 0.5);
    CHECK(back == std::vector<double>{1.0, 0.5, 0.0});
    CHECK_THROWS_AS(sample_times(0.0, 1.0, 0.0), DomainError);
  }
}
