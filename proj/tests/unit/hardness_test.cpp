#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "schatten/hardness.hpp"
#include "schatten/random.hpp"

namespace schatten {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::uint64_t kWishartLabel = 0x57495348;  // seed label used by hardness_experiment

TEST(Wishart, OneDimensionalMeanIsOne) {
  double sum = 0.0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) sum += sample_wishart(1, t).w(0, 0);
  // chi-squared(1) has variance 2, so the standard error is 0.022
  EXPECT_NEAR(sum / trials, 1.0, 0.1);
}

TEST(Wishart, ExactlyTheGramOfX) {
  const WishartInstance inst = sample_wishart(30, 4);
  EXPECT_EQ(inst.n, 30);
  EXPECT_EQ(inst.w, inst.w.transpose());
  EXPECT_LE((inst.w - inst.x * inst.x.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Wishart, TraceMeanAtThousand) {
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) sum += sample_wishart(1000, seed).w.trace() / 1000.0;
  EXPECT_NEAR(sum / 3.0, 1.0, 0.1);
}

TEST(HardInstance, ZeroWishartGivesIdentity) {
  const LinearOperator a = hard_instance(MatrixXd::Zero(5, 5));
  EXPECT_EQ(a.to_dense(), MatrixXd::Identity(5, 5));
}

TEST(HardInstance, RejectsAsymmetric) {
  MatrixXd w = MatrixXd::Zero(3, 3);
  w(0, 1) = 1.0;
  EXPECT_THROW(hard_instance(w), std::invalid_argument);
}

TEST(HardInstance, EigenvaluesShiftFromWishart) {
  const WishartInstance inst = sample_wishart(25, 9);
  const MatrixXd a = hard_instance(inst.w).to_dense();
  const VectorXd wl = Eigen::SelfAdjointEigenSolver<MatrixXd>(inst.w).eigenvalues();
  const VectorXd al = Eigen::SelfAdjointEigenSolver<MatrixXd>(a).eigenvalues();
  // ascending in W means descending in A
  for (Index i = 0; i < 25; ++i) EXPECT_NEAR(al(24 - i), 1.0 - wl(i) / 5.0, 1e-12);

  const HardSpectrum spec = hard_spectrum(inst.w);
  EXPECT_NEAR(spec.lambda_min, wl(0), 1e-12);
  EXPECT_NEAR(spec.opnorm_w, wl(24), 1e-12);
  EXPECT_GE(spec.lambda_min, -1e-12);
}

TEST(HardInstance, SchattenPowerScalesWithN) {
  const Index n = 100;  // ceil(1 / eps^{1/3}) for eps = 1e-6
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const HardSpectrum spec = hard_spectrum(sample_wishart(n, seed).w);
    for (double p : {1.0, 2.0, 3.0}) {
      EXPECT_GE(spec.schatten_power(p), 0.1 * n);
      EXPECT_LE(spec.schatten_power(p), static_cast<double>(n));
      EXPECT_LE(spec.tail_power(p), spec.schatten_power(p));
    }
  }
}

TEST(MinEigEstimate, IdentityGivesZero) {
  const LinearOperator a = LinearOperator::identity(6);
  const VectorXd v = GaussianStream(1).matrix(6, 1).col(0).normalized();
  for (double p : {1.0, 2.0, 5.0}) EXPECT_NEAR(min_eig_estimate(a, v, p), 0.0, 1e-14);
  EXPECT_EQ(a.ledger(), (QueryLedger{3, 0}));
}

TEST(MinEigEstimate, TopEigenvector) {
  const WishartInstance inst = sample_wishart(20, 2);
  const LinearOperator a = hard_instance(inst.w);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(inst.w);
  const VectorXd v = eig.eigenvectors().col(0);
  const double lambda = eig.eigenvalues()(0);
  EXPECT_NEAR(min_eig_estimate(a, v, 1.0), lambda, 1e-12);
  for (double p : {2.0, 4.0}) {
    EXPECT_NEAR(min_eig_estimate(a, v, p), 5.0 / p * (1.0 - std::pow(1.0 - lambda / 5.0, p)), 1e-12);
  }
}

TEST(MinEigEstimate, RejectsNonUnitVector) {
  const LinearOperator a = LinearOperator::identity(4);
  EXPECT_THROW(min_eig_estimate(a, VectorXd::Constant(4, 1.0), 2.0), std::invalid_argument);
  EXPECT_NO_THROW(min_eig_estimate(a, VectorXd::Unit(4, 1) * (1.0 + 1e-10), 2.0));
}

TEST(HardnessExperiment, ReportIsConsistent) {
  HardnessConfig cfg;
  cfg.seed = 3;
  const HardnessReport r = hardness_experiment(20, 2.0, cfg);
  EXPECT_EQ(r.queries_used, r.lra_queries + r.refine_queries + r.estimate_queries);
  EXPECT_EQ(r.estimate_queries, (QueryLedger{1, 0}));
  EXPECT_DOUBLE_EQ(r.abs_error, std::abs(r.lambda_hat - r.lambda_min_true));
  EXPECT_DOUBLE_EQ(r.eps, 1.0 / 8000.0);
  EXPECT_EQ(r.refine_iterations, static_cast<std::int64_t>(std::ceil(1.0 / (4.0 * std::cbrt(r.eps)))));
  EXPECT_GE(r.lambda_min_true, 0.0);
  EXPECT_GE(r.residual, r.optimum * (1 - 1e-12));
  EXPECT_EQ(r.opnorm_exceeded, r.opnorm_w > 5.0);
}

void expect_error_bound(double p) {
  const Index n = 40;
  const double bound = 2.0 * std::pow(1.0 / (n * n * n), 2.0 / 3.0);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    HardnessConfig cfg;
    cfg.seed = seed;
    const HardnessReport r = hardness_experiment(n, p, cfg);
    // independent check of the true minimum eigenvalue
    const double lambda = Eigen::SelfAdjointEigenSolver<MatrixXd>(sample_wishart(n, derive_seed(seed, kWishartLabel)).w).eigenvalues()(0);
    EXPECT_NEAR(r.lambda_min_true, lambda, 1e-12);
    good += std::abs(r.lambda_hat - lambda) <= bound;
  }
  EXPECT_GE(good, 9) << "p=" << p;
}

TEST(HardnessExperiment, ErrorBoundP2) { expect_error_bound(2.0); }
TEST(HardnessExperiment, ErrorBoundP1) { expect_error_bound(1.0); }

TEST(HardnessExperiment, RejectsTinyN) {
  EXPECT_THROW(hardness_experiment(1, 2.0, {}), std::invalid_argument);
}

}  // namespace
}  // namespace schatten
