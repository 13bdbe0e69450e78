// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include "cfred/error.hpp"
#include "cfred/synth.hpp"
#include "support/test_support.hpp"
#include "unit/oracle_constants.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

cfred::JointGaussianSpec identity_spec(Eigen::Index d, std::uint64_t seed) {
  cfred::JointGaussianSpec s;
  s.mean_x = s.mean_y = s.mean_yhat = VectorXd::Zero(d);
  s.cov_xx = s.cov_yy = s.cov_yhat = MatrixXd::Identity(d, d);
  s.cov_yx = s.cov_yhat_x = MatrixXd::Zero(d, d);
  s.seed = seed;
  return s;
}

cfred::JointGaussianSpec documented_spec() {
  using testing_support::to_eigen;
  cfred::JointGaussianSpec s;
  s.mean_x = to_eigen(oracle::kSpec_mean_x);
  s.mean_y = to_eigen(oracle::kSpec_mean_y);
  s.mean_yhat = to_eigen(oracle::kSpec_mean_yhat);
  s.cov_xx = to_eigen(oracle::kSpec_cov_xx);
  s.cov_yy = to_eigen(oracle::kSpec_cov_yy);
  s.cov_yhat = to_eigen(oracle::kSpec_cov_yhat);
  s.cov_yx = to_eigen(oracle::kSpec_cov_yx);
  s.cov_yhat_x = to_eigen(oracle::kSpec_cov_yhat_x);
  return s;
}

TEST(SampleJoint, MomentsConverge) {
  const auto s = identity_spec(3, 5);
  const auto t = cfred::sample_joint(s, 100000);
  const auto j = cfred::accumulate_joint_moments(t.condition, t.real);
  EXPECT_LT((j.mean_x).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LT((j.cov_xx - s.cov_xx).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LT((j.cov_vv - s.cov_yy).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_LT(j.cov_vx.cwiseAbs().maxCoeff(), 0.02);
}

TEST(SampleJoint, CrossMomentsConverge) {
  const auto s = documented_spec();
  const auto t = cfred::sample_joint(s, 100000);
  const auto j = cfred::accumulate_joint_moments(t.condition, t.generated);
  EXPECT_LT((j.cov_vx - s.cov_yhat_x).cwiseAbs().maxCoeff(), 0.03);
  EXPECT_LT((j.cov_vv - s.cov_yhat).cwiseAbs().maxCoeff(), 0.03);
  EXPECT_LT((j.mean_v - s.mean_yhat).cwiseAbs().maxCoeff(), 0.03);
}

TEST(SampleJoint, DeterministicPerSeed) {
  const auto s = documented_spec();
  const auto a = cfred::sample_joint(s, 500);
  const auto b = cfred::sample_joint(s, 500);
  EXPECT_EQ(a.condition, b.condition);
  EXPECT_EQ(a.real, b.real);
  EXPECT_EQ(a.generated, b.generated);
  auto other = s;
  other.seed = 1;
  EXPECT_NE(cfred::sample_joint(other, 500).real, a.real);
}

TEST(SampleJoint, DegenerateConditionIsConstant) {
  auto s = identity_spec(2, 3);
  s.mean_x = VectorXd::Constant(2, 1.5);
  s.cov_xx = MatrixXd::Zero(2, 2);
  const auto t = cfred::sample_joint(s, 50);
  for (std::size_t r = 0; r < 50; ++r) {
    EXPECT_EQ(t.condition(r, 0), 1.5f);
    EXPECT_EQ(t.condition(r, 1), 1.5f);
  }
}

TEST(SampleJoint, RejectsInvalidSpecs) {
  auto s = identity_spec(2, 3);
  s.cov_yx = MatrixXd::Constant(2, 2, 5.0);  // stacked covariance not PSD
  EXPECT_THROW(cfred::validate(s), cfred::NotPsdError);
  auto d = identity_spec(2, 3);
  d.mean_yhat = VectorXd::Zero(3);
  EXPECT_THROW(cfred::validate(d), cfred::DimensionError);
  EXPECT_THROW(cfred::sample_joint(identity_spec(2, 3), 1), cfred::DegenerateInputError);
}

TEST(AnalyticCfred, IdenticalBlocksAreZero) {
  auto s = documented_spec();
  s.mean_yhat = s.mean_y;
  s.cov_yhat = s.cov_yy;
  s.cov_yhat_x = s.cov_yx;
  EXPECT_NEAR(cfred::analytic_cfred(s), 0.0, 1e-12);
}

TEST(AnalyticCfred, OneDimensionalReduction) {
  auto s = identity_spec(1, 0);
  s.cov_yhat(0, 0) = 4.0;
  EXPECT_NEAR(cfred::analytic_cfred(s), 1.0, 1e-14);
  EXPECT_NEAR(cfred::analytic_fd(s), 1.0, 1e-14);
}

TEST(AnalyticCfred, DocumentedSpecFrozenConstant) {
  EXPECT_NEAR(cfred::analytic_cfred(documented_spec()), oracle::kSpecCfred, 1e-10);
  EXPECT_NEAR(cfred::analytic_fd(documented_spec()), oracle::kSpecFd, 1e-10);
}

// Second path: explicit inverse, eigenvalues of the product for the trace term.
TEST(AnalyticCfred, AgreesWithIndependentPath) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = testing_support::random_joint_spec(seed);
    const MatrixXd inv = s.cov_xx.inverse();
    const MatrixXd diff = s.cov_yx - s.cov_yhat_x;
    const MatrixXd cy = s.cov_yy - s.cov_yx * inv * s.cov_yx.transpose();
    const MatrixXd cg = s.cov_yhat - s.cov_yhat_x * inv * s.cov_yhat_x.transpose();
    const Eigen::EigenSolver<MatrixXd> es(cy * cg);
    double tr = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      tr += std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    }
    const double expected = (s.mean_y - s.mean_yhat).squaredNorm() +
                            (diff * inv * diff.transpose()).trace() + cy.trace() + cg.trace() -
                            2.0 * tr;
    EXPECT_NEAR(cfred::analytic_cfred(s), expected, 1e-10);
    EXPECT_GE(cfred::analytic_fd(s), 0.0);
  }
}

TEST(AnalyticCfred, EqualsFdWithoutCrossBlocks) {
  cfred::Rng rng(50, 0);
  for (int t = 0; t < 5; ++t) {
    cfred::JointGaussianSpec s;
    s.mean_x = testing_support::normal_eigen(rng, 2, 1);
    s.mean_y = testing_support::normal_eigen(rng, 3, 1);
    s.mean_yhat = testing_support::normal_eigen(rng, 3, 1);
    s.cov_xx = testing_support::random_spd(rng, 2);
    s.cov_yy = testing_support::random_spd(rng, 3);
    s.cov_yhat = testing_support::random_spd(rng, 3);
    s.cov_yx = s.cov_yhat_x = MatrixXd::Zero(3, 2);
    EXPECT_EQ(cfred::analytic_cfred(s), cfred::analytic_fd(s));
  }
}

TEST(AnalyticFd, IdenticalMarginalsDifferentCross) {
  auto s = identity_spec(2, 0);
  s.cov_yx = 0.6 * MatrixXd::Identity(2, 2);
  s.cov_yhat_x = -0.6 * MatrixXd::Identity(2, 2);
  EXPECT_EQ(cfred::analytic_fd(s), 0.0);
  EXPECT_NEAR(cfred::analytic_cfred(s), 2.0 * 1.44, 1e-12);
}

TEST(SampleConditional, SharesCondition) {
  const auto s = documented_spec();
  const auto t = cfred::sample_joint(s, 200);
  const auto g2 = cfred::sample_conditional(s.generated_moments(), t.condition, s.seed,
                                            cfred::streams::kGenerated);
  EXPECT_EQ(g2, t.generated);
  const auto g3 = cfred::sample_conditional(s.generated_moments(), t.condition, s.seed,
                                            cfred::streams::kGenerated + 1);
  EXPECT_NE(g3, t.generated);
}

cfred::DiscreteConditionSpec four_conditions(std::uint64_t seed) {
  cfred::DiscreteConditionSpec d;
  for (int k = 0; k < 4; ++k) {
    VectorXd e = VectorXd::Zero(4);
    e(k) = 1.0;
    d.condition_embeddings.push_back(e);
    d.real_means.push_back(VectorXd::Constant(2, 0.5 * k));
    d.gen_means.push_back(VectorXd::Constant(2, 0.5 * k + (k % 2 ? 0.4 : -0.2)));
  }
  d.real_cov = MatrixXd::Identity(2, 2);
  d.gen_cov = 1.5 * MatrixXd::Identity(2, 2);
  d.seed = seed;
  return d;
}

TEST(SampleDiscrete, GroupedAndFlatAgree) {
  const auto d = four_conditions(3);
  const auto s = cfred::sample_discrete(d, 100);
  ASSERT_EQ(s.grouped.size(), 4u);
  EXPECT_EQ(s.flat.condition.rows(), 400u);
  EXPECT_EQ(s.flat.real(100, 0), s.grouped.groups()[1].real(0, 0));
  // Analytic: per-group FD = ||dmu||^2 + 2 (1 + 1.5 - 2 sqrt(1.5)).
  double expected = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double dm = k % 2 ? 0.4 : -0.2;
    expected += 2.0 * dm * dm + 2.0 * (2.5 - 2.0 * std::sqrt(1.5));
  }
  EXPECT_NEAR(cfred::analytic_cfred(d), expected / 4.0, 1e-12);
}

}  // namespace
