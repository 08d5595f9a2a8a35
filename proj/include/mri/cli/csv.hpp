#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "mri/numkernel.hpp"

namespace mri::cli {

/// Shortest "%.{digits}g"-style rendering, independent of the C locale.
std::string format_number(double value, int digits);

/// Parses a decimal number with no locale influence. Throws on junk.
double parse_number(std::string_view text);

inline constexpr std::string_view kMatrixCsvHeader = "matrix,row,col,value";

/// Appends one "name,row,col,value" line per entry (0-based indices).
void write_matrix_rows(std::ostream& out, std::string_view name, const Matrix& m, int digits);

/// Inverse of write_matrix_rows over a whole document (header included).
std::map<std::string, Matrix> parse_matrix_csv(std::string_view text);

}  // namespace mri::cli
