#include "schatten/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

namespace schatten {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); });
}

double to_double(std::string_view token, const std::string& source, int line) {
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(source, line, "not a number: '" + std::string(token) + "'");
  }
  if (!std::isfinite(x)) throw ParseError(source, line, "non-finite value");
  return x;
}

long long to_index(const std::string& token, const std::string& source, int line) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(source, line, "not an integer: '" + token + "'");
  }
  return x;
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

LinearOperator parse_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (blank(line)) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(to_double(rest.substr(0, comma), source, number));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, number, "row has " + std::to_string(row.size()) +
                                           " entries, expected " +
                                           std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source, number, "empty matrix file");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return LinearOperator::dense(std::move(m));
}

LinearOperator parse_market(std::istream& in, const std::string& source) {
  std::string line;
  int number = 0;
  if (!std::getline(in, line)) throw ParseError(source, 1, "empty matrix file");
  ++number;
  const std::vector<std::string> banner = words(lower(line));
  if (banner.size() != 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix") {
    throw ParseError(source, number, "missing '%%MatrixMarket matrix' banner");
  }
  const bool coordinate = banner[2] == "coordinate";
  if (!coordinate && banner[2] != "array") throw ParseError(source, number, "unsupported layout '" + banner[2] + "'");
  if (banner[3] != "real" && banner[3] != "integer") {
    throw ParseError(source, number, "unsupported field '" + banner[3] + "'");
  }
  const bool symmetric = banner[4] == "symmetric";
  if (!symmetric && banner[4] != "general") {
    throw ParseError(source, number, "unsupported symmetry '" + banner[4] + "'");
  }

  auto next_data_line = [&](std::vector<std::string>& tokens) {
    while (std::getline(in, line)) {
      ++number;
      if (blank(line) || line.front() == '%') continue;
      tokens = words(line);
      return true;
    }
    return false;
  };

  std::vector<std::string> tokens;
  if (!next_data_line(tokens)) throw ParseError(source, number, "missing size line");
  if (tokens.size() != (coordinate ? 3u : 2u)) throw ParseError(source, number, "malformed size line");
  const long long rows = to_index(tokens[0], source, number);
  const long long cols = to_index(tokens[1], source, number);
  // symmetric arrays list the lower triangle only, column by column
  const long long count = coordinate  ? to_index(tokens[2], source, number)
                          : symmetric ? rows * (rows + 1) / 2
                                      : rows * cols;
  if (rows < 1 || cols < 1 || count < 0) throw ParseError(source, number, "invalid dimensions");
  if (symmetric && rows != cols) throw ParseError(source, number, "symmetric matrix must be square");

  if (!coordinate) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    long long seen = 0;
    Index lower_row = 0;
    Index lower_col = 0;
    while (next_data_line(tokens)) {
      if (tokens.size() != 1) throw ParseError(source, number, "expected one value per line");
      if (seen >= count) throw ParseError(source, number, "more entries than the size line declares");
      const double v = to_double(tokens[0], source, number);
      if (symmetric) {
        m(lower_row, lower_col) = v;
        if (++lower_row == rows) lower_row = ++lower_col;
      } else {
        m(seen % rows, seen / rows) = v;
      }
      ++seen;
    }
    if (seen != count) {
      throw ParseError(source, number, "size line declares " + std::to_string(count) +
                                           " entries, found " + std::to_string(seen));
    }
    if (symmetric) m = m.selfadjointView<Eigen::Lower>();
    return LinearOperator::dense(std::move(m));
  }

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(count) * (symmetric ? 2 : 1));
  long long seen = 0;
  while (next_data_line(tokens)) {
    if (tokens.size() != 3) throw ParseError(source, number, "expected 'row col value'");
    if (seen >= count) throw ParseError(source, number, "more entries than the size line declares");
    const long long i = to_index(tokens[0], source, number);
    const long long j = to_index(tokens[1], source, number);
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw ParseError(source, number, "entry (" + tokens[0] + ", " + tokens[1] + ") out of bounds");
    }
    const double v = to_double(tokens[2], source, number);
    entries.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    ++seen;
  }
  if (seen != count) {
    throw ParseError(source, number, "size line declares " + std::to_string(count) +
                                         " entries, found " + std::to_string(seen));
  }
  return LinearOperator::sparse(rows, cols, entries);
}

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
  return lower(path.extension().string()) == ".mtx" ? MatrixFormat::kMatrixMarket
                                                    : MatrixFormat::kDenseCsv;
}

LinearOperator parse_matrix(std::istream& in, MatrixFormat format, const std::string& source) {
  return format == MatrixFormat::kMatrixMarket ? parse_market(in, source) : parse_csv(in, source);
}

LinearOperator read_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_matrix(in, format, path.string());
}

LinearOperator read_matrix(const std::filesystem::path& path) {
  return read_matrix(path, format_from_path(path));
}

}  // namespace schatten
