#include "ebill/coupling_tables.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "ebill/errors.hpp"
#include "ebill/quadrature.hpp"

namespace ebill {

BasisIndex::BasisIndex(int N, int M) : N_(N), M_(M) {
  if (N < 1 || M < 0) throw DomainError("BasisIndex: need N >= 1 and M >= 0");
}

int BasisIndex::linear(int n, int m) const {
  if (!contains(n, m)) {
    throw DomainError("BasisIndex: (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ") outside basis");
  }
  return (m + M_) * N_ + (n - 1);
}

namespace {

constexpr int kPanelNodes = 16;
constexpr double kPi = std::numbers::pi;

double signed_bessel(int order, double x) { return bessel_j(order, x); }

}  // namespace

double bessel_product_integral(int n, int m, int n_prime, int order_offset, int zero_offset, int power,
                               double tolerance) {
  if (n < 1 || n_prime < 1) throw DomainError("bessel_product_integral: radial indices start at 1");
  if (power < 0) throw DomainError("bessel_product_integral: power must be >= 0");
  const double k1 = bessel_zero(std::abs(m), n);
  const double k2 = bessel_zero(std::abs(m + zero_offset), n_prime);
  const int second = m + order_offset;

  auto estimate = [&](int panels) {
    const QuadratureRule rule = composite_gauss_legendre(panels, kPanelNodes, 0.0, 1.0);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < rule.size(); ++i) {
      const double r = rule.nodes(i);
      sum += rule.weights(i) * signed_bessel(m, k1 * r) * signed_bessel(second, k2 * r) * std::pow(r, power);
    }
    return sum;
  };

  int panels = static_cast<int>(std::ceil((k1 + k2) / kPi)) + 1;
  double previous = estimate(panels);
  for (; panels <= 4096; ) {
    panels *= 2;
    const double current = estimate(panels);
    if (std::abs(current - previous) <= tolerance) return current;
    previous = current;
  }
  throw NumericalError("bessel_product_integral: no convergence, last panel-doubling change " +
                       std::to_string(std::abs(estimate(panels) - previous)));
}

// ---------------------------------------------------------------------------

const Eigen::MatrixXd& CouplingTable::f3(int m) const {
  if (!has_lower(m)) throw DomainError("CouplingTable: no m-2 partner for m=" + std::to_string(m));
  return lower_[slot(m)].first;
}
const Eigen::MatrixXd& CouplingTable::f4(int m) const {
  if (!has_lower(m)) throw DomainError("CouplingTable: no m-2 partner for m=" + std::to_string(m));
  return lower_[slot(m)].second;
}
const Eigen::MatrixXd& CouplingTable::f5(int m) const {
  if (!has_upper(m)) throw DomainError("CouplingTable: no m+2 partner for m=" + std::to_string(m));
  return upper_[slot(m)].first;
}
const Eigen::MatrixXd& CouplingTable::f6(int m) const {
  if (!has_upper(m)) throw DomainError("CouplingTable: no m+2 partner for m=" + std::to_string(m));
  return upper_[slot(m)].second;
}

std::size_t CouplingTable::slot(int m) const {
  if (m < -M_ || m > M_) throw DomainError("CouplingTable: m=" + std::to_string(m) + " outside table");
  return static_cast<std::size_t>(m + M_);
}

void CouplingTable::allocate() {
  const auto slots = static_cast<std::size_t>(2 * M_ + 1);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(N_, N_);
  diag_.assign(slots, {zero, zero});
  lower_.assign(slots, {Eigen::MatrixXd(), Eigen::MatrixXd()});
  upper_.assign(slots, {Eigen::MatrixXd(), Eigen::MatrixXd()});
  for (int m = -M_; m <= M_; ++m) {
    if (has_lower(m)) lower_[slot(m)] = {zero, zero};
    if (has_upper(m)) upper_[slot(m)] = {zero, zero};
  }
}

std::vector<double> CouplingTable::payload() const {
  std::vector<double> out;
  auto append = [&](const Eigen::MatrixXd& a) { out.insert(out.end(), a.data(), a.data() + a.size()); };
  for (int m = -M_; m <= M_; ++m) {
    append(diag_[slot(m)].first);
    append(diag_[slot(m)].second);
  }
  for (int m = -M_; m <= M_; ++m) {
    if (!has_lower(m)) continue;
    append(lower_[slot(m)].first);
    append(lower_[slot(m)].second);
  }
  for (int m = -M_; m <= M_; ++m) {
    if (!has_upper(m)) continue;
    append(upper_[slot(m)].first);
    append(upper_[slot(m)].second);
  }
  return out;
}

void CouplingTable::fill_from(const std::vector<double>& payload) {
  allocate();
  std::size_t pos = 0;
  auto take = [&](Eigen::MatrixXd& a) {
    std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(pos), a.size(), a.data());
    pos += static_cast<std::size_t>(a.size());
  };
  for (int m = -M_; m <= M_; ++m) {
    take(diag_[slot(m)].first);
    take(diag_[slot(m)].second);
  }
  for (int m = -M_; m <= M_; ++m) {
    if (!has_lower(m)) continue;
    take(lower_[slot(m)].first);
    take(lower_[slot(m)].second);
  }
  for (int m = -M_; m <= M_; ++m) {
    if (!has_upper(m)) continue;
    take(upper_[slot(m)].first);
    take(upper_[slot(m)].second);
  }
}

namespace {

std::vector<unsigned char> to_little_endian(const std::vector<double>& values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return bytes;
}

std::vector<double> from_little_endian(const std::vector<unsigned char>& bytes) {
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[8 * i + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

std::uint64_t fnv1a(const std::vector<unsigned char>& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::uint64_t CouplingTable::checksum() const { return fnv1a(to_little_endian(payload())); }

bool operator==(const CouplingTable& a, const CouplingTable& b) {
  return a.N_ == b.N_ && a.M_ == b.M_ && a.quad_order_ == b.quad_order_ && a.l15_ == b.l15_ &&
         a.payload() == b.payload();
}

CouplingTable CouplingTable::truncated(int N, int M) const {
  if (N > N_ || M > M_) {
    throw InsufficientBasisError("CouplingTable: requested N=" + std::to_string(N) + ", M=" + std::to_string(M) +
                                 " but table holds N=" + std::to_string(N_) + ", M=" + std::to_string(M_));
  }
  if (N < 1 || M < 0) throw DomainError("CouplingTable::truncated: need N >= 1 and M >= 0");
  CouplingTable t;
  t.N_ = N;
  t.M_ = M;
  t.quad_order_ = quad_order_;
  t.l15_ = l15_;
  t.allocate();
  for (int m = -M; m <= M; ++m) {
    t.diag_[t.slot(m)] = {diag_[slot(m)].first.topLeftCorner(N, N), diag_[slot(m)].second.topLeftCorner(N, N)};
    if (t.has_lower(m)) {
      t.lower_[t.slot(m)] = {lower_[slot(m)].first.topLeftCorner(N, N),
                             lower_[slot(m)].second.topLeftCorner(N, N)};
    }
    if (t.has_upper(m)) {
      t.upper_[t.slot(m)] = {upper_[slot(m)].first.topLeftCorner(N, N),
                             upper_[slot(m)].second.topLeftCorner(N, N)};
    }
  }
  return t;
}

std::vector<Eigen::MatrixXd> CouplingTable::assemble(OperatorConvention convention) const {
  const BasisIndex idx = basis();
  const double kinetic_sign = convention == OperatorConvention::Consistent ? -1.0 : 1.0;
  const int dim = idx.size();
  std::vector<Eigen::MatrixXd> a(4, Eigen::MatrixXd::Zero(dim, dim));
  for (int m = -M_; m <= M_; ++m) {
    const int row = idx.linear(1, m);
    a[0].block(row, row, N_, N_) = f1(m);
    a[1].block(row, row, N_, N_) = f2(m);
    if (has_lower(m)) {
      const int col = idx.linear(1, m - 2);
      a[2].block(row, col, N_, N_) = kinetic_sign * f3(m);
      a[3].block(row, col, N_, N_) = f4(m);
    }
    if (has_upper(m)) {
      const int col = idx.linear(1, m + 2);
      a[2].block(row, col, N_, N_) = kinetic_sign * f5(m);
      a[3].block(row, col, N_, N_) = f6(m);
    }
  }
  return a;
}

// ---------------------------------------------------------------------------

namespace {

// Bessel values J_o(k_{f,n} r_i) on the quadrature nodes for zero families
// f = 0..max_family and orders o = f-2..f+2 (clamped at 0).
class NodeBessel {
 public:
  NodeBessel(const BesselZeroTable& zeros, const Eigen::VectorXd& nodes, int max_family, int N)
      : N_(N), nodes_(nodes.size()) {
    values_.resize(static_cast<std::size_t>((max_family + 1) * N));
    std::vector<double> seq;
    for (int f = 0; f <= max_family; ++f) {
      for (int n = 1; n <= N; ++n) {
        const double k = zeros(f, n);
        Eigen::MatrixXd block(5, nodes_);
        seq.assign(static_cast<std::size_t>(f + 3), 0.0);
        for (Eigen::Index i = 0; i < nodes_; ++i) {
          bessel_j_sequence(k * nodes(i), seq);
          for (int d = -2; d <= 2; ++d) {
            const int o = f + d;
            block(d + 2, i) = o >= 0 ? seq[static_cast<std::size_t>(o)] : 0.0;
          }
        }
        values_[static_cast<std::size_t>(f * N + n - 1)] = std::move(block);
      }
    }
  }

  // J_order(k_{|family|,n} r) on the nodes for signed order and family.
  Eigen::VectorXd operator()(int order, int family, int n) const {
    const int o = std::abs(order);
    const int f = std::abs(family);
    const int d = o - f;
    if (d < -2 || d > 2) throw DomainError("NodeBessel: order offset out of range");
    Eigen::VectorXd v = values_[static_cast<std::size_t>(f * N_ + n - 1)].row(d + 2).transpose();
    if (order < 0 && (o % 2 == 1)) v = -v;
    return v;
  }

 private:
  int N_;
  Eigen::Index nodes_;
  std::vector<Eigen::MatrixXd> values_;
};

}  // namespace

CouplingTable build_tables(int N, int M, int quad_order, L15Reading l15) {
  if (N < 1 || M < 0) throw DomainError("build_tables: need N >= 1 and M >= 0");
  if (quad_order < 1) throw DomainError("build_tables: quad_order must be >= 1");

  const int max_family = M + 3;
  const BesselZeroTable zeros(max_family, N);
  const double k_max = zeros(max_family, N);
  const double nodes_per_wavelength = kPanelNodes * quad_order * 2.0 * kPi / (2.0 * k_max);
  if (nodes_per_wavelength < 8.0) {
    throw DomainError("build_tables: quad_order " + std::to_string(quad_order) +
                      " under-resolves Bessel products for N=" + std::to_string(N) + ", M=" + std::to_string(M));
  }

  const QuadratureRule rule = composite_gauss_legendre(quad_order, kPanelNodes, 0.0, 1.0);
  const NodeBessel J(zeros, rule.nodes, max_family, N);
  const Eigen::VectorXd w0 = rule.weights;
  const Eigen::VectorXd w1 = rule.weights.cwiseProduct(rule.nodes);
  const Eigen::VectorXd w3 = w1.cwiseProduct(rule.nodes.cwiseAbs2());

  CouplingTable t;
  t.N_ = N;
  t.M_ = M;
  t.quad_order_ = quad_order;
  t.l15_ = l15;
  t.allocate();

  const int l15_zero = l15 == L15Reading::Consistent ? 2 : 3;

  for (int m = -M; m <= M; ++m) {
    for (int n = 1; n <= N; ++n) {
      const double k = zeros(m, n);
      const Eigen::VectorXd left = J(m, m, n);
      const double norm_left = bessel_j(m + 1, k);
      // I(o, z, s) for this (n, m) against zero family m + z, index n'.
      auto I = [&](int o, int z, int np, const Eigen::VectorXd& w) {
        return left.cwiseProduct(w).dot(J(m + o, m + z, np));
      };

      for (int np = 1; np <= N; ++np) {
        {
          const double kp = zeros(m, np);
          const double den = norm_left * bessel_j(m + 1, kp);
          const double L1 = I(-2, 0, np, w1), L2 = I(0, 0, np, w1), L3 = I(2, 0, np, w1);
          const double L10 = I(-1, 0, np, w0), L11 = I(1, 0, np, w0);
          const double L16 = I(0, 0, np, w3);
          t.diag_[t.slot(m)].first(n - 1, np - 1) =
              (kp * kp * (L1 - 2.0 * L2 + L3) - 2.0 * kp * (m - 1) * L10 - 2.0 * kp * (m + 1) * L11) / (8.0 * den);
          t.diag_[t.slot(m)].second(n - 1, np - 1) = L16 / (2.0 * den);
        }
        if (t.has_lower(m)) {
          const double kp = zeros(m - 2, np);
          const double den = norm_left * bessel_j(m - 1, kp);
          const double L7 = I(-4, -2, np, w1), L8 = I(-2, -2, np, w1), L9 = I(0, -2, np, w1);
          const double L12 = I(-3, -2, np, w0), L13 = I(-1, -2, np, w0);
          const double L18 = I(-2, -2, np, w3);
          t.lower_[t.slot(m)].first(n - 1, np - 1) =
              (kp * kp * (L7 - 2.0 * L8 + L9) + 6.0 * kp * (m - 1) * L13 - 2.0 * kp * (m - 3) * L12) / (16.0 * den);
          t.lower_[t.slot(m)].second(n - 1, np - 1) = L18 / (4.0 * den);
        }
        if (t.has_upper(m)) {
          const double kp = zeros(m + 2, np);
          const double den = norm_left * bessel_j(m + 3, kp);
          const double L4 = I(0, 2, np, w1), L5 = I(2, 2, np, w1), L6 = I(4, 2, np, w1);
          const double L14 = I(1, 2, np, w0), L15 = I(3, l15_zero, np, w0);
          const double L17 = I(2, 2, np, w3);
          t.upper_[t.slot(m)].first(n - 1, np - 1) =
              (kp * kp * (L4 - 2.0 * L5 + L6) + 6.0 * kp * (m + 1) * L14 - 2.0 * kp * (m + 3) * L15) / (16.0 * den);
          t.upper_[t.slot(m)].second(n - 1, np - 1) = L17 / (4.0 * den);
        }
      }
    }
  }

  for (double v : t.payload()) {
    if (!std::isfinite(v)) throw NumericalError("build_tables: non-finite coupling entry");
  }
  return t;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<char, 8> kMagic = {'E', 'B', 'I', 'L', 'L', 'T', 'A', 'B'};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void save_table(const CouplingTable& table, const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = to_little_endian(table.payload());
  nlohmann::json header = {
      {"magic", "EBILLTAB"},
      {"version", kTableFormatVersion},
      {"N", table.N_},
      {"M", table.M_},
      {"quad_order", table.quad_order_},
      {"l15", table.l15_ == L15Reading::Consistent ? "I(3,2,0)" : "I(3,3,0)"},
      {"checksum", hex64(fnv1a(bytes))},
      {"payload_bytes", bytes.size()},
  };
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("save_table: cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  const auto len = static_cast<std::uint32_t>(text.size());
  const unsigned char len_bytes[4] = {static_cast<unsigned char>(len), static_cast<unsigned char>(len >> 8),
                                      static_cast<unsigned char>(len >> 16), static_cast<unsigned char>(len >> 24)};
  out.write(reinterpret_cast<const char*>(len_bytes), 4);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("save_table: write failed for " + path.string());
}

CouplingTable load_table(const std::filesystem::path& path, int N, int M) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_table: cannot open " + path.string());

  std::array<char, 8> magic{};
  unsigned char len_bytes[4];
  if (!in.read(magic.data(), magic.size()) || !in.read(reinterpret_cast<char*>(len_bytes), 4)) {
    throw TruncatedFileError("load_table: " + path.string() + " ends inside the preamble");
  }
  if (magic != kMagic) throw IoError("load_table: " + path.string() + " is not a coupling-table cache");
  const std::uint32_t len = len_bytes[0] | (len_bytes[1] << 8) | (len_bytes[2] << 16) |
                            (static_cast<std::uint32_t>(len_bytes[3]) << 24);
  std::string text(len, '\0');
  if (!in.read(text.data(), len)) throw TruncatedFileError("load_table: " + path.string() + " ends inside the header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_table: malformed header in " + path.string() + ": " + e.what());
  }
  const auto version = header.value("version", 0u);
  if (version != kTableFormatVersion) {
    throw VersionError("load_table: " + path.string() + " has format version " + std::to_string(version) +
                       ", expected " + std::to_string(kTableFormatVersion));
  }

  CouplingTable t;
  try {
    t.N_ = header.at("N").get<int>();
    t.M_ = header.at("M").get<int>();
    t.quad_order_ = header.at("quad_order").get<int>();
    t.l15_ = header.at("l15").get<std::string>() == "I(3,3,0)" ? L15Reading::Literal : L15Reading::Consistent;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_table: incomplete header in " + path.string() + ": " + e.what());
  }
  if (t.N_ < 1 || t.M_ < 0) throw IoError("load_table: invalid basis size in " + path.string());

  const auto payload_bytes = header.value("payload_bytes", std::size_t{0});
  std::vector<unsigned char> bytes(payload_bytes);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(payload_bytes));
  if (static_cast<std::size_t>(in.gcount()) != payload_bytes) {
    throw TruncatedFileError("load_table: " + path.string() + " holds " + std::to_string(in.gcount()) + " of " +
                             std::to_string(payload_bytes) + " payload bytes");
  }
  if (hex64(fnv1a(bytes)) != header.value("checksum", std::string())) {
    throw ChecksumError("load_table: checksum mismatch in " + path.string());
  }

  t.allocate();
  const std::vector<double> values = from_little_endian(bytes);
  if (values.size() != t.payload().size()) {
    throw IoError("load_table: payload size does not match N, M in " + path.string());
  }
  t.fill_from(values);

  if (N < 0) N = t.N_;
  if (M < 0) M = t.M_;
  if (N == t.N_ && M == t.M_) return t;
  return t.truncated(N, M);
}

}  // namespace ebill
