// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include "cfred/error.hpp"
#include "cfred/linalg.hpp"
#include "cfred/metrics.hpp"
#include "support/test_support.hpp"
#include "unit/oracle_constants.hpp"

namespace {

using cfred::CovarianceDivisor;
using cfred::FeatureMatrix;
using Eigen::MatrixXd;

TEST(AccumulateMoments, TwoPointVariance) {
  const FeatureMatrix m{{0.0f}, {2.0f}};
  const auto mo = cfred::accumulate_moments(m);
  EXPECT_EQ(mo.mean(0), 1.0);
  EXPECT_EQ(mo.cov(0, 0), 2.0);
  EXPECT_EQ(cfred::accumulate_moments(m, CovarianceDivisor::kMaximumLikelihood).cov(0, 0), 1.0);
}

TEST(AccumulateMoments, IdenticalRowsGiveZeroCovariance) {
  const FeatureMatrix m{{1.5f, -2.0f, 3.0f}, {1.5f, -2.0f, 3.0f}, {1.5f, -2.0f, 3.0f}};
  const auto mo = cfred::accumulate_moments(m);
  EXPECT_TRUE(mo.cov.isZero(0.0));
  EXPECT_EQ(mo.mean(2), 3.0);
}

TEST(AccumulateMoments, Seed7NormalsNearIdentity) {
  const auto x = testing_support::normal_matrix(7, 0, 1000, 3);
  const auto mo = cfred::accumulate_moments(x);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(mo.cov(i, j), i == j ? 1.0 : 0.0, 0.15);
    }
  }
}

TEST(AccumulateMoments, Seed7RegressionFixture) {
  const auto x = testing_support::normal_matrix(7, 0, 1000, 3);
  const auto mo = cfred::accumulate_moments(x);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(mo.mean(i), oracle::kSeed7Mean[i], 1e-12);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(mo.cov(i, j), oracle::kSeed7Cov[i][j], 1e-12);
  }
}

TEST(AccumulateMoments, TooFewRows) {
  EXPECT_THROW(cfred::accumulate_moments(FeatureMatrix{{1.0f, 2.0f}}),
               cfred::DegenerateInputError);
}

TEST(FeatureMatrix, NonFiniteNamesRowAndCol) {
  try {
    FeatureMatrix(2, 2, {0.0f, 1.0f, std::nanf(""), 0.0f});
    FAIL() << "expected DataError";
  } catch (const cfred::DataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("row 1"), std::string::npos) << what;
    EXPECT_NE(what.find("col 0"), std::string::npos) << what;
  }
}

TEST(JointMoments, SelfPairingGivesCovXX) {
  const auto x = testing_support::normal_matrix(11, 0, 200, 3);
  const auto j = cfred::accumulate_joint_moments(x, x);
  EXPECT_TRUE(j.cov_vx.isApprox(j.cov_xx, 1e-14));
  EXPECT_EQ(j.cov_vx, j.cov_vv);
}

TEST(JointMoments, ConstantImageGivesZeroCross) {
  const auto x = testing_support::normal_matrix(11, 0, 50, 2);
  const FeatureMatrix v(50, 3, std::vector<float>(150, 0.75f));
  EXPECT_TRUE(cfred::accumulate_joint_moments(x, v).cov_vx.isZero(0.0));
}

TEST(JointMoments, SwapCrossIsNegatedCovXX) {
  const auto d = cfred::make_swap_dataset(2, 500);
  const auto j = cfred::accumulate_joint_moments(d.condition, d.generated,
                                                 CovarianceDivisor::kMaximumLikelihood);
  EXPECT_TRUE(j.cov_vx.isApprox(-j.cov_xx, 1e-15));
  EXPECT_NEAR(j.cov_xx(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(j.cov_xx(0, 1), -0.25, 1e-15);
}

TEST(JointMoments, RowMismatchIsPairingError) {
  const auto x = testing_support::normal_matrix(1, 0, 10, 2);
  const auto v = testing_support::normal_matrix(1, 1, 9, 2);
  EXPECT_THROW(cfred::accumulate_joint_moments(x, v), cfred::PairingError);
}

TEST(PsdSqrt, Identity) {
  EXPECT_TRUE(cfred::psd_sqrt(MatrixXd::Identity(4, 4)).isApprox(MatrixXd::Identity(4, 4)));
}

TEST(PsdSqrt, Diagonal) {
  const MatrixXd s = cfred::psd_sqrt(Eigen::Vector2d(4, 9).asDiagonal());
  EXPECT_NEAR(s(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(s(1, 1), 3.0, 1e-15);
  EXPECT_NEAR(s(0, 1), 0.0, 1e-15);
}

TEST(PsdSqrt, SquaresBackOnRandomSpd) {
  cfred::Rng rng(21, 0);
  for (int t = 0; t < 10; ++t) {
    const MatrixXd a = testing_support::random_spd(rng, 5);
    const MatrixXd s = cfred::psd_sqrt(a);
    EXPECT_TRUE((s * s).isApprox(a, 1e-12));
    EXPECT_TRUE(s.isApprox(s.transpose(), 1e-14));
  }
}

TEST(PsdSqrt, RejectsClearlyNegative) {
  try {
    cfred::psd_sqrt(Eigen::Vector2d(1.0, -0.5).asDiagonal());
    FAIL() << "expected NotPsdError";
  } catch (const cfred::NotPsdError& e) {
    EXPECT_DOUBLE_EQ(e.worst_eigenvalue(), -0.5);
  }
}

TEST(PsdSqrt, ClampsRoundoffNegatives) {
  MatrixXd m = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  m(1, 1) = -1e-15;
  const MatrixXd s = cfred::psd_sqrt(m);
  EXPECT_EQ(s(1, 1), 0.0);
}

TEST(PsdSqrt, RejectsAsymmetric) {
  MatrixXd m(2, 2);
  m << 1, 0.5, 0, 1;
  EXPECT_THROW(cfred::psd_sqrt(m), cfred::DimensionError);
}

TEST(PseudoInverse, SingularDiagonal) {
  const auto p = cfred::pseudo_inverse(Eigen::Vector2d(2, 0).asDiagonal());
  EXPECT_EQ(p.rank, 1);
  EXPECT_NEAR(p.matrix(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(p.matrix(1, 1), 0.0, 1e-15);
}

TEST(PseudoInverse, InvertibleMatchesDirectInverse) {
  const MatrixXd m = Eigen::Vector2d(2, 5).asDiagonal();
  const auto p = cfred::pseudo_inverse(m);
  EXPECT_EQ(p.rank, 2);
  EXPECT_TRUE(p.matrix.isApprox(m.inverse(), 1e-15));
  cfred::Rng rng(4, 0);
  const MatrixXd a = testing_support::random_spd(rng, 4, 0.5);
  EXPECT_TRUE(cfred::pseudo_inverse(a).matrix.isApprox(a.inverse(), 1e-12));
}

TEST(PseudoInverse, RankOneTwoByTwo) {
  MatrixXd m(2, 2);
  m << 0.25, -0.25, -0.25, 0.25;
  const auto p = cfred::pseudo_inverse(m);
  EXPECT_EQ(p.rank, 1);
  MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_TRUE(p.matrix.isApprox(expected, 1e-14));
}

TEST(PseudoInverse, RankZeroReturnsZeroMatrix) {
  const auto p = cfred::pseudo_inverse(MatrixXd::Zero(3, 3));
  EXPECT_TRUE(p.rank_zero());
  EXPECT_TRUE(p.matrix.isZero(0.0));
}

TEST(PseudoInverse, MoorePenroseConditions) {
  cfred::Rng rng(8, 0);
  for (int t = 0; t < 10; ++t) {
    const MatrixXd b = testing_support::normal_eigen(rng, 5, 2);
    const MatrixXd m = b * b.transpose();  // rank 2
    const auto p = cfred::pseudo_inverse(m);
    EXPECT_EQ(p.rank, 2);
    EXPECT_TRUE((m * p.matrix * m).isApprox(m, 1e-10));
    EXPECT_TRUE((p.matrix * m * p.matrix).isApprox(p.matrix, 1e-10));
  }
}

TEST(TraceSqrtProduct, IdentityThreeD) {
  EXPECT_NEAR(cfred::trace_sqrt_product(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3)), 3.0,
              1e-14);
}

TEST(TraceSqrtProduct, CommutingDiagonals) {
  EXPECT_NEAR(cfred::trace_sqrt_product(Eigen::Vector2d(4, 1).asDiagonal(),
                                        Eigen::Vector2d(1, 4).asDiagonal()),
              4.0, 1e-14);
}

// Independent path: eigenvalues of a*b are those of a^1/2 b a^1/2.
TEST(TraceSqrtProduct, AgreesWithGeneralEigenSolver) {
  cfred::Rng rng(13, 0);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd a = testing_support::random_spd(rng, 4);
    const MatrixXd b = testing_support::random_spd(rng, 4);
    const Eigen::EigenSolver<MatrixXd> es(a * b);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) expected += std::sqrt(es.eigenvalues()(i).real());
    EXPECT_NEAR(cfred::trace_sqrt_product(a, b), expected, 1e-10);
    EXPECT_NEAR(cfred::trace_sqrt_product(b, a), expected, 1e-10);
  }
}

TEST(TraceSqrtProduct, RotationInvariant) {
  cfred::Rng rng(14, 0);
  const MatrixXd a = testing_support::random_spd(rng, 5);
  const MatrixXd b = testing_support::random_spd(rng, 5);
  const MatrixXd q = testing_support::random_rotation(rng, 5);
  EXPECT_NEAR(cfred::trace_sqrt_product(q * a * q.transpose(), q * b * q.transpose()),
              cfred::trace_sqrt_product(a, b), 1e-11);
}

TEST(ConditionalCov, ZeroCrossLeavesCovUnchanged) {
  cfred::JointMoments j;
  cfred::Rng rng(3, 0);
  j.mean_x = Eigen::VectorXd::Zero(2);
  j.mean_v = Eigen::VectorXd::Zero(3);
  j.cov_xx = testing_support::random_spd(rng, 2);
  j.cov_vv = testing_support::random_spd(rng, 3);
  j.cov_vx = MatrixXd::Zero(3, 2);
  EXPECT_EQ(cfred::conditional_cov(j), j.cov_vv);
}

TEST(ConditionalCov, SelfPairingGivesZero) {
  const auto x = testing_support::normal_matrix(5, 0, 300, 3);
  const auto c = cfred::conditional_cov(cfred::accumulate_joint_moments(x, x));
  EXPECT_TRUE(c.isZero(1e-12));
}

TEST(ConditionalCov, SwapGivesZero) {
  const auto d = cfred::make_swap_dataset(2, 500);
  const auto c = cfred::conditional_cov(cfred::accumulate_joint_moments(d.condition, d.generated));
  EXPECT_TRUE(c.isZero(1e-14));
}

// Against an explicit inverse on a well-conditioned joint.
TEST(ConditionalCov, MatchesExplicitInverse) {
  cfred::Rng rng(17, 0);
  for (int t = 0; t < 10; ++t) {
    const auto spec = testing_support::random_joint_spec(100 + t);
    const auto j = spec.real_moments();
    const MatrixXd expected = j.cov_vv - j.cov_vx * j.cov_xx.inverse() * j.cov_vx.transpose();
    EXPECT_TRUE(cfred::conditional_cov(j).isApprox(expected, 1e-11));
  }
}

}  // namespace
