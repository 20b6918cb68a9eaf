#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "schatten/lra.hpp"
#include "schatten/parse_error.hpp"

namespace schatten {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// `key = value` lines; '#' starts a comment, blank lines are skipped.
std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source);

double parse_double(const KeyValue& kv, const std::string& source);
long long parse_integer(const KeyValue& kv, const std::string& source);
std::uint64_t parse_unsigned(const KeyValue& kv, const std::string& source);

/// Keys: k, eps, p, c, seed, repetitions, block_cap. Unknown keys are errors.
/// Starts from `base`, so unspecified keys keep their values.
LraConfig parse_lra_config(std::istream& in, const std::string& source = "<config>",
                           LraConfig base = {});
LraConfig read_lra_config(const std::filesystem::path& path, LraConfig base = {});

}  // namespace schatten
