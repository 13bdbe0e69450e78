// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors
//
// Synthetic jointly Gaussian (condition, real, generated) data with known
// parameters, and the closed-form cFreD / FD at those parameters.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cfred/feature_matrix.hpp"
#include "cfred/linalg.hpp"
#include "cfred/metrics.hpp"
#include "cfred/rng.hpp"

namespace cfred {

/// Ground-truth parameters. Real y and generated yhat are each jointly
/// Gaussian with x; given x they are sampled independently.
struct JointGaussianSpec {
  Eigen::VectorXd mean_x;
  Eigen::VectorXd mean_y;
  Eigen::VectorXd mean_yhat;
  Eigen::MatrixXd cov_xx;
  Eigen::MatrixXd cov_yy;
  Eigen::MatrixXd cov_yhat;
  Eigen::MatrixXd cov_yx;       // d_y x d_x
  Eigen::MatrixXd cov_yhat_x;   // d_y x d_x
  std::uint64_t seed = 0;

  JointMoments real_moments() const;
  JointMoments generated_moments() const;
};

/// Checks shapes and that both stacked covariances are PSD. Throws
/// DimensionError or NotPsdError.
void validate(const JointGaussianSpec& spec);

struct SampleTriple {
  FeatureMatrix condition;
  FeatureMatrix real;
  FeatureMatrix generated;
};

/// Draws n rows. x uses stream streams::kCondition, y stream kReal and yhat
/// stream `generated_stream` (default kGenerated) of spec.seed. Each row
/// consumes d values from its stream.
SampleTriple sample_joint(const JointGaussianSpec& spec, std::size_t n,
                          std::uint64_t generated_stream = streams::kGenerated);

/// Draws only the generated side for an existing condition sample, so that
/// several generators can share one x.
FeatureMatrix sample_conditional(const JointMoments& joint_truth,
                                 const FeatureMatrix& condition,
                                 std::uint64_t seed, std::uint64_t stream);

/// Closed-form cFreD at the true parameters.
double analytic_cfred(const JointGaussianSpec& spec);
/// Fréchet distance between the true marginals of y and yhat.
double analytic_fd(const JointGaussianSpec& spec);

/// A finite set of conditions. Within condition k, real rows are
/// N(real_means[k], real_cov) and generated rows N(gen_means[k], gen_cov).
/// With affinely independent embeddings (e.g. one-hot) the conditional mean
/// is affine in x, so both cFreD estimators target the same value.
struct DiscreteConditionSpec {
  std::vector<Eigen::VectorXd> condition_embeddings;
  std::vector<Eigen::VectorXd> real_means;
  std::vector<Eigen::VectorXd> gen_means;
  Eigen::MatrixXd real_cov;
  Eigen::MatrixXd gen_cov;
  std::uint64_t seed = 0;
};

struct DiscreteSample {
  GroupedDataset grouped;
  SampleTriple flat;  // groups stacked in condition order
};

DiscreteSample sample_discrete(const DiscreteConditionSpec& spec,
                               std::size_t n_per_condition);

/// Mean over conditions of the per-condition Fréchet distance at the true
/// parameters.
double analytic_cfred(const DiscreteConditionSpec& spec);

}  // namespace cfred
