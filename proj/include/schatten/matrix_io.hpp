#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "schatten/linop.hpp"
#include "schatten/parse_error.hpp"

namespace schatten {

enum class MatrixFormat { kMatrixMarket, kDenseCsv };

/// .mtx -> Matrix Market, anything else -> dense CSV.
MatrixFormat format_from_path(const std::filesystem::path& path);

/// Matrix Market (coordinate or array; real or integer; general or
/// symmetric), 1-indexed, duplicate coordinates summed. Dense CSV: one row
/// per line, all rows the same length, blank lines ignored.
LinearOperator read_matrix(const std::filesystem::path& path, MatrixFormat format);
LinearOperator read_matrix(const std::filesystem::path& path);

LinearOperator parse_matrix(std::istream& in, MatrixFormat format,
                            const std::string& source = "<input>");

}  // namespace schatten
