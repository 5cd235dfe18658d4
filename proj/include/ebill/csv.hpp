#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ebill/frequency_scan.hpp"

namespace ebill {

/// Shortest round-trip decimal ('.' separator); "nan" / "inf" for non-finite values.
std::string csv_number(double value);
/// RFC 4180 quoting when the field holds a comma, quote or line break.
std::string csv_quote(std::string_view field);

/// Header plus rows of already formatted fields, CRLF-free.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> fields);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Columns: label, E, l, r, parity, pi_y, pi_x (parity is "even" for ce, "odd" for se).
CsvTable spectrum_table(const std::vector<EllipticEigenstate>& states);
/// Columns: t/T, E.
CsvTable energy_table(const ObservableSeries& series, double period);
/// Columns: t/T, p_<label>... in label order.
CsvTable populations_table(const ObservableSeries& series, double period);
/// Columns: omega, E_max, E_min, T_b, horizon_periods, partners, error.
CsvTable scan_table(const ScanResult& result);

/// FNV-1a 64 of a byte string (output checksums in run metadata).
std::uint64_t content_checksum(std::string_view bytes);

/// Writes text to a file; IoError when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ebill
