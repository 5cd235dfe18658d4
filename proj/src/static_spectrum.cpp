#include "ebill/static_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>

#include "ebill/quadrature.hpp"

namespace ebill {

namespace {

constexpr double kPi = std::numbers::pi;

// Brent's method on [lo, hi] with f(lo) f(hi) <= 0.
double brent_root(const std::function<double(double)>& f, double lo, double hi, double flo, double fhi,
                  double xtol) {
  double a = lo, b = hi, fa = flo, fb = fhi;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < 200; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

double boundary_function(const EllipseGeometry& geom, MathieuKind kind, int l, double q) {
  return mathieu_radial(mathieu_expansion(kind, l, q), geom.xi0());
}

// Initial scan step: a quarter of the Weyl-law estimate of the q-spacing of
// consecutive radial roots at q = 1 (spacing grows like sqrt(q)).
double initial_q_step(const EllipseGeometry& geom) {
  const double xi0 = geom.xi0();
  return 0.25 * 0.5 * kPi * std::sqrt(2.0) / (xi0 * std::sqrt(std::cosh(2.0 * xi0)));
}

struct Bracket {
  double lo, hi, flo, fhi;
};

std::vector<Bracket> scan_brackets(const EllipseGeometry& geom, MathieuKind kind, int l, double q_max,
                                   double step) {
  std::vector<Bracket> out;
  const int n = std::max(2, static_cast<int>(std::ceil(q_max / step)));
  double q_prev = 0.0;
  double f_prev = boundary_function(geom, kind, l, q_prev);
  for (int i = 1; i <= n; ++i) {
    const double q = q_max * i / n;
    const double f = boundary_function(geom, kind, l, q);
    if ((f_prev < 0) != (f < 0) || f == 0.0) out.push_back({q_prev, q, f_prev, f});
    q_prev = q;
    f_prev = f;
  }
  return out;
}

double refine_bracket(const EllipseGeometry& geom, MathieuKind kind, int l, const Bracket& br) {
  auto f = [&](double q) { return boundary_function(geom, kind, l, q); };
  return brent_root(f, br.lo, br.hi, br.flo, br.fhi, 1e-14 * std::max(1.0, br.hi));
}

double normalisation(const MathieuExpansion& e, const EllipseGeometry& geom) {
  constexpr int kRadial = 64;
  constexpr int kAngular = 256;
  const double xi0 = geom.xi0();
  const double f = geom.focal();
  const QuadratureRule rule = gauss_legendre(kRadial, 0.0, xi0);
  double s0 = 0.0, s2 = 0.0;
  const double deta = 2.0 * kPi / kAngular;
  for (int j = 0; j < kAngular; ++j) {
    const double eta = j * deta;
    const double th = mathieu_angular(e, eta);
    s0 += th * th * deta;
    s2 += th * th * std::cos(2.0 * eta) * deta;
  }
  double integral = 0.0;
  for (Eigen::Index i = 0; i < rule.size(); ++i) {
    const double xi = rule.nodes(i);
    const double r = mathieu_radial(e, xi);
    integral += rule.weights(i) * r * r * (std::cosh(2.0 * xi) * s0 - s2);
  }
  integral *= 0.5 * f * f;
  return 1.0 / std::sqrt(integral);
}

EllipticEigenstate make_state(const EllipseGeometry& geom, const QuantumNumbers& qn, double q) {
  EllipticEigenstate s;
  s.qn = qn;
  s.symmetry = classify_symmetry(qn.kind, qn.l);
  s.q = q;
  s.energy = geom.energy_from_q(q);
  s.expansion = mathieu_expansion(qn.kind, qn.l, q);
  s.norm = normalisation(s.expansion, geom);
  return s;
}

std::string kind_name(MathieuKind k) { return k == MathieuKind::Even ? "even" : "odd"; }

}  // namespace

RootBracketError::RootBracketError(MathieuKind kind_, int l_, double q_lo_, double q_hi_)
    : NumericalError("root bracketing failed for " + kind_name(kind_) + " l=" + std::to_string(l_) +
                     " in q interval [" + std::to_string(q_lo_) + ", " + std::to_string(q_hi_) + "]"),
      kind(kind_),
      l(l_),
      q_lo(q_lo_),
      q_hi(q_hi_) {}

Symmetry classify_symmetry(MathieuKind kind, int l) {
  const bool even_l = l % 2 == 0;
  if (kind == MathieuKind::Even) return {even_l ? 1 : -1, 1};
  return {even_l ? -1 : 1, -1};
}

std::string to_string(const QuantumNumbers& qn) {
  std::ostringstream os;
  os << (qn.kind == MathieuKind::Even ? "e" : "o") << "(l=" << qn.l << ",r=" << qn.r << ")";
  return os.str();
}

int radial_interior_zeros(const MathieuExpansion& e, double xi0) {
  constexpr int kSamples = 512;
  int zeros = 0;
  double prev = mathieu_radial(e, xi0 / kSamples);
  for (int i = 2; i < kSamples; ++i) {
    const double v = mathieu_radial(e, xi0 * i / kSamples);
    if ((v < 0) != (prev < 0)) ++zeros;
    prev = v;
  }
  return zeros;
}

std::vector<EllipticEigenstate> solve_eigenstates(const EllipseGeometry& geom, double e_max) {
  if (!(e_max > 0.0)) throw DomainError("solve_eigenstates: e_max must be positive");
  const double q_max = geom.q_from_energy(e_max);
  std::vector<EllipticEigenstate> states;

  for (MathieuKind kind : {MathieuKind::Even, MathieuKind::Odd}) {
    for (int l = (kind == MathieuKind::Even ? 0 : 1);; ++l) {
      double step = initial_q_step(geom);
      std::vector<Bracket> brackets = scan_brackets(geom, kind, l, q_max, step);
      for (int refinements = 0;; ++refinements) {
        step *= 0.5;
        std::vector<Bracket> finer = scan_brackets(geom, kind, l, q_max, step);
        if (finer.size() == brackets.size()) break;
        brackets = std::move(finer);
        if (refinements > 12) throw RootBracketError(kind, l, 0.0, q_max);
      }
      if (brackets.empty()) break;  // lowest root of higher l lies higher still
      int r = 0;
      for (const Bracket& br : brackets) {
        ++r;
        const double q = refine_bracket(geom, kind, l, br);
        EllipticEigenstate s = make_state(geom, {kind, l, r}, q);
        if (radial_interior_zeros(s.expansion, geom.xi0()) != r - 1) {
          throw RootBracketError(kind, l, br.lo, br.hi);
        }
        if (s.energy <= e_max) states.push_back(std::move(s));
      }
    }
  }
  std::sort(states.begin(), states.end(),
            [](const EllipticEigenstate& x, const EllipticEigenstate& y) { return x.energy < y.energy; });
  for (std::size_t i = 0; i < states.size(); ++i) states[i].label = static_cast<int>(i) + 1;
  return states;
}

EllipticEigenstate solve_eigenstate(const EllipseGeometry& geom, const QuantumNumbers& qn,
                                    std::optional<double> q_hint) {
  if (qn.r < 1) throw DomainError("solve_eigenstate: r must be >= 1");
  if (qn.kind == MathieuKind::Odd && qn.l < 1) throw DomainError("solve_eigenstate: odd modes need l >= 1");
  const double xi0 = geom.xi0();
  auto f = [&](double q) { return boundary_function(geom, qn.kind, qn.l, q); };

  if (q_hint && *q_hint > 0.0) {
    // Expand a bracket around the hint, then certify r by the zero count.
    double h = 0.02 * *q_hint + 1e-3;
    double lo = std::max(0.0, *q_hint - h), hi = *q_hint + h;
    double flo = f(lo), fhi = f(hi);
    for (int it = 0; it < 8 && (flo < 0) == (fhi < 0); ++it) {
      h *= 2.0;
      lo = std::max(0.0, *q_hint - h);
      hi = *q_hint + h;
      flo = f(lo);
      fhi = f(hi);
    }
    if ((flo < 0) != (fhi < 0)) {
      // A wide bracket may hold several roots; shrink to the one nearest the hint.
      const double q = brent_root(f, lo, hi, flo, fhi, 1e-14 * std::max(1.0, hi));
      EllipticEigenstate s = make_state(geom, qn, q);
      if (radial_interior_zeros(s.expansion, xi0) == qn.r - 1) return s;
    }
  }

  // Full scan from q = 0 until the r-th sign change.
  double step = initial_q_step(geom) * 0.5;
  for (int attempt = 0; attempt < 6; ++attempt, step *= 0.5) {
    int found = 0;
    double q_prev = 0.0, f_prev = f(0.0);
    for (int i = 1; i < 200000; ++i) {
      const double q = i * step;
      const double fq = f(q);
      if ((fq < 0) != (f_prev < 0)) {
        if (++found == qn.r) {
          const double root = brent_root(f, q_prev, q, f_prev, fq, 1e-14 * std::max(1.0, q));
          EllipticEigenstate s = make_state(geom, qn, root);
          if (radial_interior_zeros(s.expansion, xi0) == qn.r - 1) return s;
          break;  // missed a root: refine the step
        }
      }
      q_prev = q;
      f_prev = fq;
    }
  }
  throw RootBracketError(qn.kind, qn.l, 0.0, 0.0);
}

double evaluate_eigenstate(const EllipticEigenstate& state, const EllipseGeometry& geom, double x, double y) {
  const double rho = (x * x) / (geom.a * geom.a) + (y * y) / (geom.b * geom.b);
  if (!(rho <= 1.0 + 1e-12)) throw DomainError("evaluate_eigenstate: point outside the ellipse");
  const double f = geom.focal();
  std::complex<double> w = std::acosh(std::complex<double>(x, y) / f);
  if (w.real() < 0.0) w = -w;
  const double xi = std::min(w.real(), geom.xi0());
  const double eta = w.imag();
  return state.norm * mathieu_radial(state.expansion, xi) * mathieu_angular(state.expansion, eta);
}

Eigen::VectorXd evaluate_eigenstate(const EllipticEigenstate& state, const EllipseGeometry& geom,
                                    const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw DomainError("evaluate_eigenstate: coordinate arrays differ in length");
  const MathieuExpansion& e = state.expansion;
  const double xi0 = geom.xi0();
  const double f = geom.focal();

  // Drop coefficients that cannot contribute inside the ellipse.
  const double scale = mathieu_radial_scale(e, xi0);
  Eigen::Index terms = e.coeffs.size();
  while (terms > 1 && std::abs(e.coeffs(terms - 1)) * std::cosh(e.wavenumber(terms - 1) * xi0) < 1e-17 * scale) {
    --terms;
  }
  const bool even = e.kind == MathieuKind::Even;
  const int k0 = e.first_wavenumber;

  Eigen::VectorXd out(x.size());
  for (Eigen::Index p = 0; p < x.size(); ++p) {
    const double rho = (x(p) * x(p)) / (geom.a * geom.a) + (y(p) * y(p)) / (geom.b * geom.b);
    if (!(rho <= 1.0 + 1e-12)) throw DomainError("evaluate_eigenstate: point outside the ellipse");
    std::complex<double> w = std::acosh(std::complex<double>(x(p), y(p)) / f);
    if (w.real() < 0.0) w = -w;
    const double xi = std::min(w.real(), xi0);
    const double eta = w.imag();

    // cos/sin(k eta) and cosh/sinh(k xi) for k = k0 + 2j by rotation.
    const std::complex<double> step_eta = std::polar(1.0, 2.0 * eta);
    std::complex<double> rot = std::polar(1.0, k0 * eta);
    const double grow = std::exp(2.0 * xi);
    double up = std::exp(k0 * xi), down = 1.0 / up;
    double radial = 0.0, angular = 0.0;
    for (Eigen::Index j = 0; j < terms; ++j) {
      const double c = e.coeffs(j);
      radial += c * (even ? 0.5 * (up + down) : 0.5 * (up - down));
      angular += c * (even ? rot.real() : rot.imag());
      rot *= step_eta;
      up *= grow;
      down /= grow;
    }
    out(p) = state.norm * radial * angular;
  }
  return out;
}

double boundary_residual(const EllipticEigenstate& state, const EllipseGeometry& geom) {
  const double xi0 = geom.xi0();
  return std::abs(mathieu_radial(state.expansion, xi0)) / mathieu_radial_scale(state.expansion, xi0);
}

// ---------------------------------------------------------------------------

SpectrumTracker::SpectrumTracker(const DrivingLaw& driving, double e_max)
    : driving_(driving), equilibrium_(solve_eigenstates(EllipseGeometry(driving.a0(), driving.b0()), e_max)) {
  for (const auto& s : equilibrium_) labels_[s.qn] = s.label;
}

const QuantumNumbers& SpectrumTracker::quantum_numbers(int label) const {
  if (label < 1 || label > size()) {
    throw DomainError("SpectrumTracker: label " + std::to_string(label) + " not tracked");
  }
  return equilibrium_[static_cast<std::size_t>(label) - 1].qn;
}

std::optional<int> SpectrumTracker::label_of(const QuantumNumbers& qn) const {
  auto it = labels_.find(qn);
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

EllipticEigenstate SpectrumTracker::state_at(int label, double zeta) const {
  const auto& eq = equilibrium_.at(static_cast<std::size_t>(quantum_numbers(label).r > 0 ? label - 1 : 0));
  const EllipseGeometry geom = EllipseGeometry::at(driving_, driving_.time_at_phase(zeta));
  EllipticEigenstate s = solve_eigenstate(geom, eq.qn, eq.q);
  s.label = label;
  return s;
}

std::vector<int> SpectrumTracker::labels_with(const Symmetry& sym) const {
  std::vector<int> out;
  for (const auto& s : equilibrium_) {
    if (s.symmetry == sym) out.push_back(s.label);
  }
  return out;
}

std::vector<EllipticEigenstate> instantaneous_spectrum(const DrivingLaw& driving, double zeta, double e_max,
                                                       std::optional<Symmetry> filter) {
  const EllipseGeometry geom = EllipseGeometry::at(driving, driving.time_at_phase(zeta));
  std::vector<EllipticEigenstate> states = solve_eigenstates(geom, e_max);

  // Equilibrium labels: the highest state found here must be inside the
  // equilibrium list, so size it from the largest equilibrium energy needed.
  double e_needed = e_max;
  for (const auto& s : states) {
    const EllipticEigenstate eq = solve_eigenstate({driving.a0(), driving.b0()}, s.qn);
    e_needed = std::max(e_needed, eq.energy);
  }
  const SpectrumTracker tracker(driving, e_needed * (1.0 + 1e-9));

  std::vector<EllipticEigenstate> out;
  for (auto& s : states) {
    if (filter && !(s.symmetry == *filter)) continue;
    s.label = tracker.label_of(s.qn).value_or(0);
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::vector<double> phase_energies(const SpectrumTracker& tracker, int label, int phases) {
  std::vector<double> out(static_cast<std::size_t>(phases));
  const QuantumNumbers& qn = tracker.quantum_numbers(label);
  const DrivingLaw& d = tracker.driving();
  double hint = tracker.equilibrium()[static_cast<std::size_t>(label) - 1].q;
  for (int k = 0; k < phases; ++k) {
    const double zeta = static_cast<double>(k) / phases;
    const EllipseGeometry geom = EllipseGeometry::at(d, d.time_at_phase(zeta));
    const EllipticEigenstate s = solve_eigenstate(geom, qn, hint);
    hint = s.q;
    out[static_cast<std::size_t>(k)] = s.energy;
  }
  return out;
}

}  // namespace

double mean_energy_difference(const SpectrumTracker& tracker, int label_i, int label_j, double tolerance) {
  if (label_i == label_j) throw DomainError("mean_energy_difference: labels must differ");
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int phases = 16; phases <= 4096; phases *= 2) {
    const auto ei = phase_energies(tracker, label_i, phases);
    const auto ej = phase_energies(tracker, label_j, phases);
    double sum = 0.0;
    for (int k = 0; k < phases; ++k) sum += std::abs(ei[k] - ej[k]);
    const double mean = sum / phases;  // periodic trapezoid rule
    if (std::abs(mean - previous) < tolerance) return mean;
    previous = mean;
  }
  throw NumericalError("mean_energy_difference: phase quadrature did not converge");
}

EnergyDifferenceRange energy_difference_range(const SpectrumTracker& tracker, int label_i, int label_j,
                                              int phases) {
  const auto ei = phase_energies(tracker, label_i, phases);
  const auto ej = phase_energies(tracker, label_j, phases);
  EnergyDifferenceRange range{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int k = 0; k < phases; ++k) {
    range.min = std::min(range.min, ej[k] - ei[k]);
    range.max = std::max(range.max, ej[k] - ei[k]);
  }
  return range;
}

}  // namespace ebill
