#include "mri/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace mri::cli {

std::string format_number(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, digits);
  if (res.ec != std::errc{}) throw std::runtime_error("format_number: buffer too small");
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  if (text == "nan") return NAN;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_matrix_rows(std::ostream& out, std::string_view name, const Matrix& m, int digits) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << name << ',' << r << ',' << c << ',' << format_number(m(r, c), digits) << '\n';
    }
  }
}

std::map<std::string, Matrix> parse_matrix_csv(std::string_view text) {
  struct Entry {
    long row, col;
    double value;
  };
  std::map<std::string, std::vector<Entry>> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line == kMatrixCsvHeader) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 4) {
      throw std::invalid_argument("matrix csv line " + std::to_string(line_no) +
                                  ": expected 4 fields");
    }
    try {
      entries[std::string(fields[0])].push_back({static_cast<long>(parse_number(fields[1])),
                                                 static_cast<long>(parse_number(fields[2])),
                                                 parse_number(fields[3])});
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("matrix csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  std::map<std::string, Matrix> out;
  for (const auto& [name, list] : entries) {
    long rows = 0, cols = 0;
    for (const auto& e : list) {
      if (e.row < 0 || e.col < 0) throw std::invalid_argument("negative matrix index for " + name);
      rows = std::max(rows, e.row + 1);
      cols = std::max(cols, e.col + 1);
    }
    Matrix m = Matrix::Constant(rows, cols, NAN);
    for (const auto& e : list) m(e.row, e.col) = e.value;
    if (m.hasNaN() && list.size() != static_cast<std::size_t>(rows * cols)) {
      throw std::invalid_argument("matrix " + name + " is missing entries");
    }
    out.emplace(name, std::move(m));
  }
  return out;
}

}  // namespace mri::cli
