#include <vector>

#include <gtest/gtest.h>

#include "schatten/random.hpp"
#include "schatten/verify.hpp"

namespace schatten {
namespace {

std::vector<std::uint64_t> seeds(std::size_t count, std::uint64_t base) {
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = derive_seed(base, i);
  return out;
}

class SuiteTest : public ::testing::TestWithParam<std::string> {};

TEST_P(SuiteTest, PassesAllTrials) {
  const VerifyReport report = run_verify(GetParam(), seeds(40, 11));
  ASSERT_EQ(report.suites.size(), 1u);
  EXPECT_EQ(report.suites[0].trials, 40);
  EXPECT_EQ(report.suites[0].failures, 0) << "worst margin " << report.suites[0].worst_margin;
  EXPECT_EQ(report.status(), "pass");
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (std::string_view name : verify_suite_names()) out.emplace_back(name);
  return out;
}

INSTANTIATE_TEST_SUITE_P(AllSuites, SuiteTest, ::testing::ValuesIn(suite_names()),
                         [](const auto& info) { return info.param; });

TEST(Verify, PinchingFiveHundredTrials) {
  const VerifyReport report = run_verify("pinching", seeds(500, 4));
  EXPECT_EQ(report.total_trials(), 500);
  EXPECT_EQ(report.total_failures(), 0);
}

TEST(Verify, AllRunsEverySuite) {
  const VerifyReport report = run_verify("all", seeds(3, 1));
  EXPECT_EQ(report.suites.size(), verify_suite_names().size());
  EXPECT_EQ(report.total_trials(), static_cast<int>(3 * verify_suite_names().size()));
  EXPECT_FALSE(format_report(report).empty());
}

TEST(Verify, EmptySeedListHasNoTrials) {
  const VerifyReport report = run_verify("all", {});
  EXPECT_EQ(report.total_trials(), 0);
  EXPECT_EQ(report.status(), "no trials");
  EXPECT_TRUE(report.passed());
}

TEST(Verify, UnknownSuiteThrows) {
  EXPECT_THROW(run_verify("nope", seeds(1, 0)), UnknownSuiteError);
  EXPECT_THROW(run_trial("nope", 0, 0), UnknownSuiteError);
}

TEST(Verify, TrialsAreDeterministic) {
  for (std::string_view name : verify_suite_names()) {
    const TrialOutcome a = run_trial(name, 99, 3);
    const TrialOutcome b = run_trial(name, 99, 3);
    EXPECT_EQ(a.margin, b.margin) << name;
    EXPECT_TRUE(a.ok()) << name;
  }
}

TEST(TrialOutcome, ToleranceBoundary) {
  EXPECT_TRUE((TrialOutcome{-1e-10, 1e-9}.ok()));
  EXPECT_FALSE((TrialOutcome{-2e-9, 1e-9}.ok()));
}

}  // namespace
}  // namespace schatten
