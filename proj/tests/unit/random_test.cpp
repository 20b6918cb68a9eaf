#include <cmath>

#include <gtest/gtest.h>

#include "schatten/random.hpp"

namespace schatten {
namespace {

TEST(GaussianStream, SameSeedSameSequence) {
  const GaussianStream a(42), b(42);
  for (std::uint64_t i = 0; i < 100; ++i) EXPECT_EQ(a.normal(i), b.normal(i));
  EXPECT_EQ(a.matrix(5, 3), b.matrix(5, 3));
}

TEST(GaussianStream, StreamsAndSeedsDiffer) {
  EXPECT_NE(GaussianStream(1).normal(0), GaussianStream(2).normal(0));
  EXPECT_NE(GaussianStream(1, 0).normal(0), GaussianStream(1, 1).normal(0));
}

TEST(GaussianStream, MatrixIsColumnMajorPrefix) {
  const GaussianStream g(9);
  const Eigen::MatrixXd m = g.matrix(4, 3);
  EXPECT_EQ(m(0, 0), g.normal(0));
  EXPECT_EQ(m(3, 0), g.normal(3));
  EXPECT_EQ(m(0, 1), g.normal(4));
  EXPECT_EQ(g.matrix(4, 2), m.leftCols(2));
}

TEST(GaussianStream, MomentsLookStandardNormal) {
  const GaussianStream g(3);
  const int count = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < count; ++i) {
    const double x = g.normal(i);
    sum += x;
    sq += x * x;
  }
  // Standard errors: 1/sqrt(n) for the mean, sqrt(2/n) for the variance.
  EXPECT_NEAR(sum / count, 0.0, 5.0 / std::sqrt(count));
  EXPECT_NEAR(sq / count, 1.0, 5.0 * std::sqrt(2.0 / count));
}

TEST(GaussianStream, UniformInOpenInterval) {
  const GaussianStream g(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = g.uniform(i);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RandomOrthonormal, ColumnsAreOrthonormal) {
  const Eigen::MatrixXd q = random_orthonormal(9, 4, 11);
  EXPECT_LE((q.transpose() * q - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(q, random_orthonormal(9, 4, 11));
}

TEST(DeriveSeed, LabelsSeparate) {
  EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 1), derive_seed(2, 1));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

}  // namespace
}  // namespace schatten
