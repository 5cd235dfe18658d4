#include "ebill/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ebill {

std::string csv_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw DomainError("CsvTable: header must not be empty");
}

void CsvTable::add_row(std::vector<std::string> fields) {
  if (fields.size() != header_.size()) throw DomainError("CsvTable: row width differs from the header");
  rows_.push_back(std::move(fields));
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << csv_quote(fields[i]);
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

std::string CsvTable::str() const {
  std::ostringstream s;
  write(s);
  return s.str();
}

CsvTable spectrum_table(const std::vector<EllipticEigenstate>& states) {
  CsvTable t({"label", "E", "l", "r", "parity", "pi_y", "pi_x"});
  for (const EllipticEigenstate& s : states) {
    t.add_row({std::to_string(s.label), csv_number(s.energy), std::to_string(s.qn.l), std::to_string(s.qn.r),
               s.qn.kind == MathieuKind::Even ? "even" : "odd", s.symmetry.pi_y > 0 ? "+" : "-",
               s.symmetry.pi_x > 0 ? "+" : "-"});
  }
  return t;
}

CsvTable energy_table(const ObservableSeries& series, double period) {
  CsvTable t({"t/T", "E"});
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    t.add_row({csv_number(series.times[k] / period), csv_number(series.energy[k])});
  }
  return t;
}

CsvTable populations_table(const ObservableSeries& series, double period) {
  std::vector<std::string> header{"t/T"};
  for (const auto& [label, p] : series.populations) header.push_back("p_" + std::to_string(label));
  CsvTable t(header);
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    std::vector<std::string> row{csv_number(series.times[k] / period)};
    for (const auto& [label, p] : series.populations) row.push_back(csv_number(p.at(k)));
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable scan_table(const ScanResult& result) {
  CsvTable t({"omega", "E_max", "E_min", "T_b", "horizon_periods", "partners", "error"});
  for (const ScanRow& r : result.rows) {
    std::string partners;
    for (std::size_t i = 0; i < r.partners.size(); ++i) partners += (i ? " " : "") + std::to_string(r.partners[i]);
    t.add_row({csv_number(r.omega), csv_number(r.e_max), csv_number(r.e_min), r.t_b ? csv_number(*r.t_b) : "",
               std::to_string(r.horizon_periods), partners, r.error});
  }
  return t;
}

std::uint64_t content_checksum(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace ebill
