// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include <cmath>

#include <gtest/gtest.h>

#include "cfred/error.hpp"
#include "cfred/metrics.hpp"
#include "cfred/synth.hpp"
#include "support/test_support.hpp"
#include "unit/oracle_constants.hpp"

namespace {

using cfred::FeatureMatrix;
using cfred::GaussianMoments;
using Eigen::MatrixXd;
using Eigen::VectorXd;

GaussianMoments moments(std::initializer_list<double> mean, std::initializer_list<double> diag) {
  GaussianMoments m;
  m.mean = VectorXd::Map(std::data(mean), static_cast<Eigen::Index>(mean.size()));
  m.cov = VectorXd::Map(std::data(diag), static_cast<Eigen::Index>(diag.size())).asDiagonal();
  return m;
}

TEST(FrechetDistance, IdenticalIsExactlyZero) {
  cfred::Rng rng(1, 0);
  for (int t = 0; t < 20; ++t) {
    GaussianMoments a{testing_support::normal_eigen(rng, 6, 1),
                      testing_support::random_spd(rng, 6)};
    EXPECT_EQ(cfred::frechet_distance(a, a), 0.0);
  }
}

TEST(FrechetDistance, OneDimensionalClosedForms) {
  EXPECT_NEAR(cfred::frechet_distance(moments({0}, {1}), moments({1}, {1})), 1.0, 1e-12);
  EXPECT_NEAR(cfred::frechet_distance(moments({0}, {4}), moments({0}, {1})), 1.0, 1e-12);
}

TEST(FrechetDistance, DiagonalClosedForm) {
  EXPECT_NEAR(cfred::frechet_distance(moments({0, 0}, {1, 4}), moments({1, 0}, {1, 1})), 2.0,
              1e-12);
}

TEST(FrechetDistance, SymmetricAndRotationInvariant) {
  cfred::Rng rng(2, 0);
  for (int t = 0; t < 10; ++t) {
    GaussianMoments a{testing_support::normal_eigen(rng, 4, 1),
                      testing_support::random_spd(rng, 4)};
    GaussianMoments b{testing_support::normal_eigen(rng, 4, 1),
                      testing_support::random_spd(rng, 4)};
    const MatrixXd q = testing_support::random_rotation(rng, 4);
    const double d = cfred::frechet_distance(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_NEAR(cfred::frechet_distance(b, a), d, 1e-10);
    GaussianMoments ra{q * a.mean, q * a.cov * q.transpose()};
    GaussianMoments rb{q * b.mean, q * b.cov * q.transpose()};
    EXPECT_NEAR(cfred::frechet_distance(ra, rb), d, 1e-10);
  }
}

TEST(FrechetDistance, RowPermutationInvariant) {
  const auto a = testing_support::normal_matrix(3, 0, 100, 3);
  const auto b = testing_support::normal_matrix(3, 1, 100, 3, 0.5);
  std::vector<float> reversed;
  for (std::size_t r = a.rows(); r-- > 0;) {
    for (float v : a.row(r)) reversed.push_back(v);
  }
  const FeatureMatrix ar(a.rows(), a.cols(), reversed);
  EXPECT_NEAR(cfred::frechet_distance(ar, b), cfred::frechet_distance(a, b), 1e-12);
}

TEST(FrechetDistance, DimensionMismatch) {
  EXPECT_THROW(cfred::frechet_distance(moments({0}, {1}), moments({0, 0}, {1, 1})),
               cfred::DimensionError);
}

TEST(Cfred, GeneratedEqualsRealIsZero) {
  const auto x = testing_support::normal_matrix(4, 0, 300, 3);
  const auto y = testing_support::normal_matrix(4, 1, 300, 3);
  EXPECT_NEAR(cfred::cfred(x, y, y), 0.0, 1e-12);
}

TEST(Cfred, ZeroCrossReducesToMarginalFd) {
  cfred::JointMoments real, gen;
  cfred::Rng rng(5, 0);
  real.mean_x = gen.mean_x = VectorXd::Zero(2);
  real.cov_xx = gen.cov_xx = testing_support::random_spd(rng, 2);
  real.mean_v = testing_support::normal_eigen(rng, 3, 1);
  gen.mean_v = testing_support::normal_eigen(rng, 3, 1);
  real.cov_vv = testing_support::random_spd(rng, 3);
  gen.cov_vv = testing_support::random_spd(rng, 3);
  real.cov_vx = gen.cov_vx = MatrixXd::Zero(3, 2);
  EXPECT_NEAR(cfred::cfred_unconditional_form(real, gen),
              cfred::frechet_distance(real.marginal_v(), gen.marginal_v()), 1e-12);
}

TEST(Cfred, SwapCounterexample) {
  const auto d = cfred::make_swap_dataset(2, 500);
  EXPECT_EQ(cfred::frechet_distance(d.real, d.generated), 0.0);
  const auto real = cfred::accumulate_joint_moments(d.condition, d.real,
                                                    cfred::CovarianceDivisor::kMaximumLikelihood);
  const auto gen = cfred::accumulate_joint_moments(d.condition, d.generated,
                                                   cfred::CovarianceDivisor::kMaximumLikelihood);
  const auto terms = cfred::cfred_terms(real, gen);
  EXPECT_EQ(terms.mean, 0.0);
  EXPECT_NEAR(terms.cross, 2.0, 1e-12);
  EXPECT_NEAR(terms.conditional, 0.0, 1e-12);
  EXPECT_NEAR(cfred::cfred(d.condition, d.real, d.generated), 2.0, 1e-12);
}

TEST(Cfred, UnshiftedSwapIsZero) {
  const auto d = cfred::make_swap_dataset(2, 500, 0);
  EXPECT_EQ(d.real, d.generated);
  EXPECT_NEAR(cfred::cfred(d.condition, d.real, d.generated), 0.0, 1e-12);
}

TEST(Cfred, LargerSwapValue) {
  // With yhat = P x for a cyclic shift P, the cross term is
  // Tr[(I - P) S (I - P)^T] = ||I - P||_F^2 / k = 2 for every k.
  for (std::size_t k : {3, 4, 7}) {
    const auto d = cfred::make_swap_dataset(k, 50);
    EXPECT_NEAR(cfred::cfred(d.condition, d.real, d.generated), 2.0, 1e-12);
    EXPECT_EQ(cfred::frechet_distance(d.real, d.generated), 0.0);
  }
}

TEST(Cfred, MismatchedConditionStatisticsIsPairingError) {
  const auto x1 = testing_support::normal_matrix(6, 0, 100, 2);
  const auto x2 = testing_support::normal_matrix(6, 5, 100, 2);
  const auto y = testing_support::normal_matrix(6, 1, 100, 2);
  EXPECT_THROW(cfred::cfred_terms(cfred::accumulate_joint_moments(x1, y),
                                  cfred::accumulate_joint_moments(x2, y)),
               cfred::PairingError);
}

TEST(Cfred, AnalyticSpecTermsMatchHighPrecisionOracle) {
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
  const auto t = cfred::cfred_terms(s.real_moments(), s.generated_moments());
  EXPECT_NEAR(t.mean, oracle::kSpecMeanTerm, 1e-12);
  EXPECT_NEAR(t.cross, oracle::kSpecCrossTerm, 1e-12);
  EXPECT_NEAR(t.conditional, oracle::kSpecConditionalTerm, 1e-12);
}

cfred::ConditionGroup group(std::string id, const FeatureMatrix& real, const FeatureMatrix& gen) {
  return cfred::ConditionGroup{std::move(id), {}, real, gen};
}

TEST(ExpectationForm, IdenticalGroupsAreZero) {
  std::vector<cfred::ConditionGroup> g;
  for (int k = 0; k < 3; ++k) {
    const auto r = testing_support::normal_matrix(30 + k, 0, 40, 2);
    g.push_back(group("g" + std::to_string(k), r, r));
  }
  EXPECT_EQ(cfred::cfred_expectation_form(cfred::GroupedDataset(std::move(g))), 0.0);
}

TEST(ExpectationForm, SingleGroupEqualsFd) {
  const auto r = testing_support::normal_matrix(40, 0, 50, 3);
  const auto g = testing_support::normal_matrix(40, 1, 60, 3, 0.3);
  std::vector<cfred::ConditionGroup> groups{group("only", r, g)};
  EXPECT_EQ(cfred::cfred_expectation_form(cfred::GroupedDataset(std::move(groups))),
            cfred::frechet_distance(r, g));
}

TEST(ExpectationForm, UnweightedMeanOfGroups) {
  const auto r1 = testing_support::normal_matrix(41, 0, 20, 2);
  const auto g1 = testing_support::normal_matrix(41, 1, 20, 2, 1.0);
  const auto r2 = testing_support::normal_matrix(42, 0, 80, 2);
  const auto g2 = testing_support::normal_matrix(42, 1, 80, 2);
  std::vector<cfred::ConditionGroup> groups{group("a", r1, g1), group("b", r2, g2)};
  const double expected =
      0.5 * (cfred::frechet_distance(r1, g1) + cfred::frechet_distance(r2, g2));
  EXPECT_NEAR(cfred::cfred_expectation_form(cfred::GroupedDataset(std::move(groups))), expected,
              1e-14);
}

TEST(GroupedDataset, Validation) {
  const auto r = testing_support::normal_matrix(1, 0, 5, 2);
  const auto r3 = testing_support::normal_matrix(1, 0, 5, 3);
  const FeatureMatrix one{{1.0f, 2.0f}};
  EXPECT_THROW(cfred::GroupedDataset({group("a", r, r), group("a", r, r)}), cfred::DataError);
  EXPECT_THROW(cfred::GroupedDataset({group("a", r, one)}), cfred::DegenerateInputError);
  EXPECT_THROW(cfred::GroupedDataset({group("a", r, r), group("b", r3, r3)}),
               cfred::DimensionError);
  EXPECT_THROW(cfred::GroupedDataset({}), cfred::DataError);
}

FeatureMatrix fixture_matrix(const std::vector<std::vector<double>>& rows) {
  std::vector<float> data;
  for (const auto& r : rows) {
    for (double v : r) data.push_back(static_cast<float>(v));
  }
  return FeatureMatrix(rows.size(), rows.front().size(), data);
}

TEST(Cmmd, IdenticalFixtureMatchesKernelSums) {
  const auto f = fixture_matrix(oracle::kCmmdFixture);
  const double v = cfred::cmmd(f, f);
  EXPECT_LE(v, 0.0);
  EXPECT_NEAR(v, oracle::kCmmdFixtureSelf, 1e-9);
}

TEST(Cmmd, SameDistributionFixture) {
  const auto a = testing_support::normal_matrix(101, 0, 2000, 8);
  const auto b = testing_support::normal_matrix(202, 0, 2000, 8);
  const double v = cfred::cmmd(a, b);
  EXPECT_LE(std::abs(v), 1.0);
  EXPECT_NEAR(v, oracle::kCmmdSameDistribution, 1e-9);
}

TEST(Cmmd, ShiftedFixture) {
  const auto a = testing_support::normal_matrix(101, 0, 2000, 8);
  const auto b = testing_support::normal_matrix(202, 0, 2000, 8);
  const auto s = testing_support::normal_matrix(202, 0, 2000, 8, 2.0);
  const double shifted = cfred::cmmd(a, s);
  EXPECT_GT(shifted, cfred::cmmd(a, b));
  EXPECT_NEAR(shifted, oracle::kCmmdShifted, 1e-9);
}

TEST(Cmmd, SymmetricBitForBit) {
  const auto a = testing_support::normal_matrix(5, 0, 100, 4);
  const auto b = testing_support::normal_matrix(5, 1, 70, 4, 0.5);
  EXPECT_EQ(cfred::cmmd(a, b), cfred::cmmd(b, a));
}

TEST(Cmmd, Validation) {
  const auto a = testing_support::normal_matrix(5, 0, 10, 4);
  const auto b = testing_support::normal_matrix(5, 1, 10, 3);
  EXPECT_THROW(cfred::cmmd(a, b), cfred::DimensionError);
  EXPECT_THROW(cfred::cmmd(a, FeatureMatrix(1, 4, {1, 0, 0, 0})), cfred::DegenerateInputError);
  EXPECT_THROW(cfred::cmmd(a, FeatureMatrix(2, 4, {1, 0, 0, 0, 0, 0, 0, 0})), cfred::DataError);
}

TEST(ClipScore, ClosedForms) {
  const FeatureMatrix t{{1, 0}, {0, 2}, {3, 3}};
  EXPECT_NEAR(cfred::clipscore(t, t), 100.0, 1e-12);
  const FeatureMatrix orth{{0, 1}, {5, 0}, {-1, 1}};
  EXPECT_NEAR(cfred::clipscore(t, orth), 0.0, 1e-12);
  const FeatureMatrix anti{{-1, 0}, {0, -1}, {-1, -1}};
  EXPECT_EQ(cfred::clipscore(t, anti), 0.0);
}

TEST(ClipScore, Validation) {
  const FeatureMatrix t{{1, 0}, {0, 2}};
  EXPECT_THROW(cfred::clipscore(t, FeatureMatrix{{1, 0}}), cfred::PairingError);
  EXPECT_THROW(cfred::clipscore(t, FeatureMatrix{{1, 0, 0}, {0, 1, 0}}), cfred::DimensionError);
}

TEST(SwapDataset, Shapes) {
  const auto d = cfred::make_swap_dataset(3, 4);
  EXPECT_EQ(d.condition.rows(), 12u);
  EXPECT_EQ(d.condition.cols(), 3u);
  EXPECT_EQ(d.generated(0, 1), 1.0f);
  EXPECT_EQ(d.generated(11, 0), 1.0f);
  EXPECT_THROW(cfred::make_swap_dataset(1, 4), cfred::DegenerateInputError);
}

}  // namespace
