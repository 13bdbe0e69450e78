// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors
//
// Distribution metrics over embedding sets: Fréchet distance, conditional
// Fréchet distance (cFreD) in its closed moment form and as an expectation
// over discrete conditions, CMMD and CLIPScore.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfred/direction.hpp"
#include "cfred/feature_matrix.hpp"
#include "cfred/linalg.hpp"

namespace cfred {

struct MetricReport {
  std::string metric_name;
  double value = 0.0;
  Direction direction = Direction::kLowerBetter;
  std::size_t n_samples = 0;
  std::string image_backbone;
  std::string text_backbone;
  std::optional<std::uint64_t> seed;
};

/// One discrete condition: the shared condition embedding plus the real and
/// generated samples drawn under it.
struct ConditionGroup {
  std::string condition_id;
  std::vector<float> condition_embedding;  // may be empty
  FeatureMatrix real;
  FeatureMatrix generated;
};

/// Validated on construction: ids unique, each side >= 2 rows, a common
/// feature dimension across all groups.
class GroupedDataset {
 public:
  explicit GroupedDataset(std::vector<ConditionGroup> groups);

  const std::vector<ConditionGroup>& groups() const noexcept { return groups_; }
  std::size_t size() const noexcept { return groups_.size(); }

 private:
  std::vector<ConditionGroup> groups_;
};

/// Moment estimator used by the metric front-ends. Maximum-likelihood
/// moments make the closed forms exact on finite discrete data.
struct EstimatorConfig {
  CovarianceDivisor divisor = CovarianceDivisor::kMaximumLikelihood;
};

/// ||mu_a - mu_b||^2 + Tr(S_a) + Tr(S_b) - 2 Tr((S_a^1/2 S_b S_a^1/2)^1/2),
/// clamped at zero. Identical moments return exactly 0.
double frechet_distance(const GaussianMoments& a, const GaussianMoments& b);

/// The three additive pieces of the closed-form cFreD.
struct CfredTerms {
  double mean = 0.0;         // ||mu_y - mu_yhat||^2
  double cross = 0.0;        // Tr[(S_yx - S_yhat x) S_xx^+ (S_xy - S_x yhat)]
  double conditional = 0.0;  // Fréchet trace term of the conditional covariances

  double total() const noexcept;
};

/// `real` and `gen` must be accumulated against the same condition rows;
/// mean_x and cov_xx are compared to within 1e-9 and a PairingError is thrown
/// otherwise.
CfredTerms cfred_terms(const JointMoments& real, const JointMoments& gen);
double cfred_unconditional_form(const JointMoments& real,
                                const JointMoments& gen);

/// Unweighted mean over groups of the per-group Fréchet distance.
double cfred_expectation_form(const GroupedDataset& data,
                              const EstimatorConfig& config = {});

/// Convenience front-ends over raw embeddings.
double frechet_distance(const FeatureMatrix& a, const FeatureMatrix& b,
                        const EstimatorConfig& config = {});
double cfred(const FeatureMatrix& condition, const FeatureMatrix& real,
             const FeatureMatrix& generated, const EstimatorConfig& config = {});

struct CmmdOptions {
  double sigma = 10.0;
  double scale = 1000.0;
};

/// Unbiased MMD^2 under exp(-||a-b||^2 / (2 sigma^2)) on row-normalised
/// embeddings, times `scale`. May be slightly negative. Symmetric in its
/// arguments bit-for-bit.
double cmmd(const FeatureMatrix& real, const FeatureMatrix& generated,
            const CmmdOptions& options = {});

/// 100 * mean_i max(0, cos(text_i, image_i)).
double clipscore(const FeatureMatrix& text, const FeatureMatrix& image);

struct SwapDataset {
  FeatureMatrix condition;  // one-hot class embeddings
  FeatureMatrix real;       // equal to condition
  FeatureMatrix generated;  // class c rendered as class (c + shift) mod k
};

/// k classes, n_per_class rows each. shift = 0 yields a faithful generator.
SwapDataset make_swap_dataset(std::size_t k, std::size_t n_per_class,
                              std::size_t shift = 1);

}  // namespace cfred
