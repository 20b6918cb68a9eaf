#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace schatten {

class UnknownSuiteError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Result of one trial: the inequality holds when margin >= -tolerance.
struct TrialOutcome {
  double margin = 0.0;
  double tolerance = 0.0;
  bool ok() const { return margin >= -tolerance; }
};

struct SuiteReport {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worst_margin = 0.0;  // smallest margin seen; meaningless when trials == 0
  bool passed() const { return failures == 0; }
};

struct VerifyReport {
  std::vector<SuiteReport> suites;
  int total_trials() const;
  int total_failures() const;
  bool passed() const { return total_failures() == 0; }
  /// "no trials", "pass" or "fail".
  std::string status() const;
};

std::vector<std::string_view> verify_suite_names();

/// One trial of `suite` with the given seed. Trial `index` selects the
/// parameter (p, r, degree, ...) from the suite's grid.
TrialOutcome run_trial(std::string_view suite, std::uint64_t seed, int index);

/// `selector` is a suite name or "all". Throws UnknownSuiteError.
VerifyReport run_verify(std::string_view selector, std::span<const std::uint64_t> seeds);

std::string format_report(const VerifyReport& report);

}  // namespace schatten
