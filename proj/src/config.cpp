#include "schatten/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace schatten {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source) {
  std::vector<KeyValue> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, number, "expected 'key = value'");
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), number};
    if (kv.key.empty()) throw ParseError(source, number, "empty key");
    if (kv.value.empty()) throw ParseError(source, number, "empty value for '" + kv.key + "'");
    out.push_back(std::move(kv));
  }
  return out;
}

double parse_double(const KeyValue& kv, const std::string& source) {
  double x = 0.0;
  const char* end = kv.value.data() + kv.value.size();
  const auto [ptr, ec] = std::from_chars(kv.value.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
    throw ParseError(source, kv.line, "'" + kv.key + "' needs a finite number, got '" + kv.value + "'");
  }
  return x;
}

long long parse_integer(const KeyValue& kv, const std::string& source) {
  long long x = 0;
  const char* end = kv.value.data() + kv.value.size();
  const auto [ptr, ec] = std::from_chars(kv.value.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(source, kv.line, "'" + kv.key + "' needs an integer, got '" + kv.value + "'");
  }
  return x;
}

std::uint64_t parse_unsigned(const KeyValue& kv, const std::string& source) {
  std::uint64_t x = 0;
  const char* end = kv.value.data() + kv.value.size();
  const auto [ptr, ec] = std::from_chars(kv.value.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(source, kv.line,
                     "'" + kv.key + "' needs a non-negative integer, got '" + kv.value + "'");
  }
  return x;
}

LraConfig parse_lra_config(std::istream& in, const std::string& source, LraConfig base) {
  for (const KeyValue& kv : parse_key_values(in, source)) {
    try {
      if (kv.key == "k") {
        base.k = parse_integer(kv, source);
      } else if (kv.key == "eps") {
        base.eps = parse_double(kv, source);
      } else if (kv.key == "p") {
        base.p = NormOrder::parse(kv.value);
      } else if (kv.key == "c") {
        base.c = parse_double(kv, source);
      } else if (kv.key == "seed") {
        base.seed = parse_unsigned(kv, source);
      } else if (kv.key == "repetitions") {
        base.repetitions = static_cast<int>(parse_integer(kv, source));
      } else if (kv.key == "block_cap") {
        base.block_cap = parse_integer(kv, source);
      } else {
        throw ParseError(source, kv.line, "unknown key '" + kv.key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, kv.line, e.what());
    }
  }
  return base;
}

LraConfig read_lra_config(const std::filesystem::path& path, LraConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_lra_config(in, path.string(), std::move(base));
}

}  // namespace schatten
