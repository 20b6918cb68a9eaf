#include <sstream>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "schatten/bench.hpp"
#include "schatten/parse_error.hpp"

namespace schatten {
namespace {

const std::string kData = TEST_DATA_DIR;

BenchPlan small_plan() {
  BenchPlan plan;
  plan.instance.generator = Generator::kPowerLaw;
  plan.instance.n = 30;
  plan.instance.d = 20;
  plan.eps = {0.2};
  plan.p = {NormOrder(2.0)};
  plan.k = {1};
  plan.seeds = 10;
  plan.timing = false;
  return plan;
}

std::string csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  write_bench_csv(out, rows);
  return out.str();
}

TEST(Bench, OneOursAndOneBaselineRowPerSeed) {
  const std::vector<BenchRow> rows = run_bench(small_plan());
  ASSERT_EQ(rows.size(), 20u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].baseline, i % 2 == 1);
    EXPECT_EQ(rows[i].seed_index, static_cast<int>(i / 2));
    EXPECT_TRUE(rows[i].error.empty()) << rows[i].error;
    EXPECT_EQ(rows[i].total, rows[i].applies + rows[i].adjoint_applies);
    ASSERT_TRUE(rows[i].ratio.has_value());
    EXPECT_GE(*rows[i].ratio, 1.0 - 1e-9);
    EXPECT_FALSE(rows[i].wall_ms.has_value());
  }
  EXPECT_EQ(rows[1].branch, "BASELINE");
}

TEST(Bench, CsvIsByteStable) {
  const std::string first = csv(run_bench(small_plan()));
  EXPECT_EQ(first, csv(run_bench(small_plan())));
  EXPECT_EQ(first.rfind("# schatten bench v1\n", 0), 0u);
  EXPECT_NE(first.find("instance,n,d,k,p,eps,branch,applies,adjoint_applies,total,residual,optimum,"
                       "ratio,wall_ms,error\n"),
            std::string::npos);
}

TEST(Bench, WorkerCountDoesNotChangeResults) {
  BenchPlan plan = small_plan();
  plan.eps = {0.2, 0.1};
  plan.seeds = 3;
  const std::string one = csv(run_bench(plan));
  plan.workers = 4;
  EXPECT_EQ(one, csv(run_bench(plan)));
}

TEST(Bench, TotalsGrowAsEpsShrinks) {
  BenchPlan plan = small_plan();
  plan.instance.n = 400;
  plan.instance.d = 300;
  plan.eps = {0.3, 0.1, 0.03};
  plan.seeds = 1;
  plan.certify = false;
  const std::vector<BenchRow> rows = run_bench(plan);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_LE(rows[0].total, rows[2].total);
  EXPECT_LE(rows[2].total, rows[4].total);
  EXPECT_LE(rows[1].total, rows[3].total);
  EXPECT_LE(rows[3].total, rows[5].total);
  EXPECT_FALSE(rows[0].residual.has_value());
}

TEST(Bench, ReadsPlanFile) {
  const BenchPlan plan = read_bench_plan(kData + "/small.plan");
  EXPECT_EQ(plan.instance.n, 30);
  EXPECT_EQ(plan.instance.d, 20);
  EXPECT_EQ(plan.eps, (std::vector<double>{0.2, 0.1}));
  EXPECT_EQ(plan.p.size(), 2u);
  EXPECT_EQ(plan.seeds, 2);
  EXPECT_FALSE(plan.timing);
  // cells nest k, then p, then eps
  const std::vector<BenchRow> rows = run_bench(plan);
  ASSERT_EQ(rows.size(), 16u);
  EXPECT_DOUBLE_EQ(rows[0].eps, 0.2);
  EXPECT_DOUBLE_EQ(rows[4].eps, 0.1);
  EXPECT_EQ(rows[8].p, NormOrder(2.0));
}

TEST(Bench, PlanErrors) {
  std::istringstream unknown("generator = powerlaw\ncolour = red\n");
  EXPECT_THROW(parse_bench_plan(unknown), ParseError);
  std::istringstream generator("generator = banana\n");
  EXPECT_THROW(parse_bench_plan(generator), ParseError);
  std::istringstream list("eps = 0.1,,0.2\n");
  EXPECT_THROW(parse_bench_plan(list), ParseError);
  EXPECT_THROW(read_bench_plan(kData + "/missing.plan"), ParseError);

  BenchPlan plan = small_plan();
  plan.eps = {1.5};
  EXPECT_THROW(plan.validate(), std::invalid_argument);
  plan = small_plan();
  plan.instance.generator = Generator::kFile;
  EXPECT_THROW(plan.validate(), std::invalid_argument);
}

TEST(Bench, RankTooLargeBecomesRowError) {
  BenchPlan plan = small_plan();
  plan.k = {25};
  plan.seeds = 1;
  const std::vector<BenchRow> rows = run_bench(plan);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].error.empty());
}

TEST(Bench, PowerLawSpectrum) {
  const Eigen::MatrixXd a = power_law_matrix(30, 20, 1.0, 5);
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
  for (Index i = 0; i < 20; ++i) EXPECT_NEAR(s(i), 1.0 / (i + 1), 1e-10);
}

}  // namespace
}  // namespace schatten
