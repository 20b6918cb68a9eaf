#include <cmath>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "schatten/random.hpp"
#include "schatten/spectral.hpp"

namespace schatten {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::Index;

// Independent oracle: one-sided Jacobi SVD.
VectorXd jacobi_sigma(const MatrixXd& m) { return Eigen::JacobiSVD<MatrixXd>(m).singularValues(); }

TEST(NormOrder, ParsesAndRejects) {
  EXPECT_TRUE(NormOrder::parse("inf").is_infinite());
  EXPECT_EQ(NormOrder::parse("2.5").value(), 2.5);
  EXPECT_TRUE(NormOrder(std::numeric_limits<double>::infinity()).is_infinite());
  EXPECT_THROW(NormOrder(0.5), std::invalid_argument);
  EXPECT_THROW(NormOrder(std::nan("")), std::invalid_argument);
  EXPECT_THROW(NormOrder::parse("two"), std::invalid_argument);
  EXPECT_THROW(NormOrder::infinity().value(), std::logic_error);
}

TEST(DenseSvd, Diagonal) {
  const Spectrum s = dense_svd(VectorXd{{3.0, 4.0}}.asDiagonal().toDenseMatrix());
  EXPECT_DOUBLE_EQ(s.singular_values(0), 4.0);
  EXPECT_DOUBLE_EQ(s.singular_values(1), 3.0);
}

TEST(DenseSvd, ZeroMatrix) {
  EXPECT_EQ(dense_svd(MatrixXd::Zero(3, 2)).singular_values, VectorXd::Zero(2));
}

TEST(DenseSvd, FactorsReconstruct) {
  const MatrixXd a = GaussianStream(1).matrix(8, 5);
  const Spectrum s = dense_svd(a);
  EXPECT_LE(orthonormality_defect(s.left), 1e-10);
  EXPECT_LE(orthonormality_defect(s.right), 1e-10);
  const MatrixXd back = s.left * s.singular_values.asDiagonal() * s.right.transpose();
  EXPECT_LE((back - a).norm() / a.norm(), 1e-8);
  for (Index i = 1; i < s.singular_values.size(); ++i) {
    EXPECT_GE(s.singular_values(i - 1), s.singular_values(i));
  }
}

TEST(DenseSvd, RejectsNonFinite) {
  MatrixXd a = MatrixXd::Ones(2, 2);
  a(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(dense_svd(a), std::invalid_argument);
}

TEST(SchattenNorm, SmallCases) {
  EXPECT_DOUBLE_EQ(schatten_norm(VectorXd{{3.0, 4.0}}, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(schatten_norm(VectorXd{{1.0, 1.0, 1.0}}, 1.0), 3.0);
  // 3^4 + 4^4 = 337
  EXPECT_NEAR(schatten_norm(VectorXd{{3.0, 4.0}}, 4.0), 4.284572294953817, 1e-14);
  EXPECT_DOUBLE_EQ(schatten_norm(VectorXd{{3.0, 4.0}}, NormOrder::infinity()), 4.0);
}

TEST(SchattenNorm, LargeOrderDoesNotOverflow) {
  const VectorXd big{{1e200, 1e200}};
  const double got = schatten_norm(big, 50.0);
  EXPECT_TRUE(std::isfinite(got));
  EXPECT_NEAR(got / 1e200, std::pow(2.0, 1.0 / 50.0), 1e-12);
}

TEST(SchattenNorm, MonotoneInOrder) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const VectorXd sigma = GaussianStream(seed).matrix(7, 1).col(0).cwiseAbs();
    double prev = schatten_norm(sigma, 1.0);
    for (double p : {1.1, 1.5, 2.0, 3.0, 6.0, 20.0}) {
      const double cur = schatten_norm(sigma, p);
      EXPECT_LE(cur, prev * (1 + 1e-12));
      prev = cur;
    }
    EXPECT_LE(schatten_norm(sigma, NormOrder::infinity()), prev * (1 + 1e-12));
  }
}

TEST(SchattenNorm, UnitaryInvariance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MatrixXd a = GaussianStream(seed).matrix(6, 4);
    const MatrixXd u = random_orthonormal(6, 6, seed + 100);
    const MatrixXd v = random_orthonormal(4, 4, seed + 200);
    for (double p : {1.0, 2.0, 3.5}) {
      const double want = matrix_schatten_norm(a, p);
      EXPECT_NEAR(matrix_schatten_norm(u * a * v.transpose(), p), want, 1e-9 * want);
    }
  }
}

TEST(BestRankK, DiagonalTail) {
  const MatrixXd a = VectorXd{{5.0, 2.0, 1.0}}.asDiagonal();
  EXPECT_NEAR(best_rank_k_error(a, 1, 2.0), std::sqrt(5.0), 1e-14);
  EXPECT_EQ(best_rank_k_error(a, 3, 2.0), 0.0);
  EXPECT_THROW(best_rank_k_error(a, 4, 2.0), std::out_of_range);
  EXPECT_THROW(best_rank_k_error(a, -1, 2.0), std::out_of_range);
}

TEST(BestRankK, MatchesTruncatedSvdSubtraction) {
  const MatrixXd a = GaussianStream(3).matrix(10, 8);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index k = 3;
  const MatrixXd a_k = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal() *
                       svd.matrixV().leftCols(k).transpose();
  const VectorXd tail = jacobi_sigma(a - a_k);
  const double want = std::pow(tail.array().pow(3.0).sum(), 1.0 / 3.0);
  EXPECT_NEAR(best_rank_k_error(a, k, 3.0), want, 1e-10 * want);
}

TEST(ResidualCost, OptimalAndFullProjections) {
  const MatrixXd a = GaussianStream(4).matrix(9, 6);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinV);
  const MatrixXd z = svd.matrixV().leftCols(2);
  EXPECT_NEAR(residual_cost(a, z, 2.0), best_rank_k_error(a, 2, 2.0), 1e-10);
  EXPECT_NEAR(residual_cost(a, MatrixXd::Identity(6, 6), 1.0), 0.0, 1e-10);
}

TEST(ResidualCost, RandomBasisNeverBeatsOptimum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MatrixXd a = GaussianStream(seed).matrix(9, 6);
    const MatrixXd z = random_orthonormal(6, 2, seed + 50);
    for (double p : {1.0, 2.0, 4.0}) {
      EXPECT_GE(residual_cost(a, z, p), best_rank_k_error(a, 2, p) * (1 - 1e-12));
    }
  }
}

TEST(ResidualCost, RejectsNonOrthonormal) {
  EXPECT_THROW(residual_cost(MatrixXd::Identity(3, 3), MatrixXd::Ones(3, 1), 2.0),
               std::invalid_argument);
}

TEST(Svd2x2, ClosedForms) {
  SingularPair s = svd_2x2(2, 0, 0, 1);
  EXPECT_DOUBLE_EQ(s.first, 2.0);
  EXPECT_DOUBLE_EQ(s.second, 1.0);
  s = svd_2x2(1, 1, 1, 1);
  EXPECT_DOUBLE_EQ(s.first, 2.0);
  EXPECT_NEAR(s.second, 0.0, 1e-15);
  s = svd_2x2(1, 2, 3, 4);
  const VectorXd want = jacobi_sigma(MatrixXd{{1, 2}, {3, 4}});
  EXPECT_NEAR(s.first, want(0), 1e-13);
  EXPECT_NEAR(s.second, want(1), 1e-13);
  // Frozen from the independent oracle above.
  EXPECT_NEAR(s.first, 5.46498570421904, 1e-12);
  EXPECT_NEAR(s.second, 0.365966190626258, 1e-12);
}

TEST(Svd2x2, RandomAgainstOracle) {
  const GaussianStream g(8);
  for (int i = 0; i < 500; ++i) {
    const double a = g.normal(4 * i), b = g.normal(4 * i + 1), c = g.normal(4 * i + 2),
                 d = g.normal(4 * i + 3);
    const SingularPair s = svd_2x2(a, b, c, d);
    const VectorXd want = jacobi_sigma(MatrixXd{{a, b}, {c, d}});
    EXPECT_NEAR(s.first, want(0), 1e-12);
    EXPECT_NEAR(s.second, want(1), 1e-12);
    EXPECT_GE(s.first, s.second);
    EXPECT_GE(s.second, 0.0);
  }
}

TEST(Pinching, AxisAlignedDiagonalIsTight) {
  const MatrixXd a = VectorXd{{4.0, 3.0, 2.0, 1.0}}.asDiagonal();
  const MatrixXd basis = MatrixXd::Identity(4, 2);
  for (double p : {1.0, 2.0, 5.0}) EXPECT_NEAR(pinching_slack(a, basis, basis, p).slack, 0.0, 1e-12);
}

TEST(Pinching, RandomProjectorsNonNegative) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const MatrixXd a = GaussianStream(seed).matrix(12, 10);
    const MatrixXd p = random_orthonormal(12, 3, seed + 1000);
    const MatrixXd q = random_orthonormal(10, 3, seed + 2000);
    for (double order : {1.0, 7.5}) {
      const InequalitySlack s = pinching_slack(a, p, q, order);
      EXPECT_GE(s.slack, -1e-9 * std::max(1.0, s.lhs));
    }
  }
}

TEST(Pinching, RejectsNonOrthonormalBasis) {
  EXPECT_THROW(pinching_slack(MatrixXd::Identity(3, 3), MatrixXd::Ones(3, 1), MatrixXd::Identity(3, 1), 2.0),
               std::invalid_argument);
}

TEST(ArakiLiebThirring, CommutingPairIsEqual) {
  const MatrixXd a = VectorXd{{1.0, 2.0, 3.0}}.asDiagonal();
  const MatrixXd b = VectorXd{{0.5, 4.0, 1.0}}.asDiagonal();
  for (double r : {0.25, 0.5, 1.0, 2.0}) EXPECT_NEAR(alt_slack(a, b, r).slack, 0.0, 1e-10);
}

TEST(ArakiLiebThirring, SignPattern) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const MatrixXd ga = GaussianStream(seed, 1).matrix(5, 5);
    const MatrixXd gb = GaussianStream(seed, 2).matrix(5, 5);
    const MatrixXd a = ga * ga.transpose();
    const MatrixXd b = gb * gb.transpose();
    const InequalitySlack half = alt_slack(a, b, 0.5);
    const InequalitySlack two = alt_slack(a, b, 2.0);
    const InequalitySlack one = alt_slack(a, b, 1.0);
    EXPECT_GE(half.slack, -half.tolerance());
    EXPECT_LE(two.slack, two.tolerance());
    EXPECT_LE(std::abs(one.slack), one.tolerance());
  }
}

TEST(ArakiLiebThirring, RejectsIndefinite) {
  const MatrixXd neg = VectorXd{{1.0, -1.0}}.asDiagonal();
  EXPECT_THROW(alt_slack(neg, MatrixXd::Identity(2, 2), 0.5), std::invalid_argument);
  EXPECT_THROW(alt_slack(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), 0.0), std::invalid_argument);
}

TEST(PsdPower, SquareRootSquares) {
  const MatrixXd g = GaussianStream(5).matrix(4, 4);
  const MatrixXd s = g * g.transpose();
  const MatrixXd root = psd_power(s, 0.5);
  EXPECT_LE((root * root - s).norm() / s.norm(), 1e-10);
}

TEST(OrthonormalRange, CompletesRankDeficientInput) {
  MatrixXd m = MatrixXd::Zero(4, 3);
  m(0, 0) = 2.0;
  m(0, 1) = 1.0;  // parallel to column 0
  const MatrixXd q = orthonormal_range(m, 3);
  EXPECT_LE(orthonormality_defect(q), 1e-12);
  EXPECT_NEAR(std::abs(q(0, 0)), 1.0, 1e-15);
}

}  // namespace
}  // namespace schatten
