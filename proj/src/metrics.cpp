// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cfred/error.hpp"

namespace cfred {

Direction parse_direction(std::string_view text) {
  if (text == "lower" || text == "lower-better") return Direction::kLowerBetter;
  if (text == "higher" || text == "higher-better") return Direction::kHigherBetter;
  throw DataError("unknown direction '" + std::string(text) +
                  "' (expected lower or higher)");
}

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + " dimension mismatch: " +
                         std::to_string(a) + " vs " + std::to_string(b));
  }
}

// Tr(A) + Tr(B) - 2 Tr((A^1/2 B A^1/2)^1/2); exactly zero for identical inputs.
double frechet_trace_term(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a == b) return 0.0;
  return a.trace() + b.trace() - 2.0 * trace_sqrt_product(a, b);
}

bool close_to(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
}

Eigen::MatrixXd normalized_rows(const FeatureMatrix& m, const char* what) {
  Eigen::MatrixXd out = m.to_eigen();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).norm();
    if (!(norm > 0.0)) {
      throw DataError(std::string(what) + " row " + std::to_string(r) +
                      " has zero norm");
    }
    out.row(r) /= norm;
  }
  return out;
}

bool canonically_before(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  const auto da = a.data();
  const auto db = b.data();
  return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
}

// Kernel matrix exp(-gamma ||a_i - b_j||^2) for unit-norm rows.
Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         double gamma) {
  const Eigen::MatrixXd dots = a * b.transpose();
  return ((2.0 - 2.0 * dots.array()).max(0.0) * -gamma).exp().matrix();
}

}  // namespace

GroupedDataset::GroupedDataset(std::vector<ConditionGroup> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty()) {
    throw DegenerateInputError("grouped dataset has no groups");
  }
  std::set<std::string> seen;
  const std::size_t dim = groups_.front().real.cols();
  for (const auto& g : groups_) {
    if (!seen.insert(g.condition_id).second) {
      throw DataError("duplicate condition id '" + g.condition_id + "'");
    }
    if (g.real.rows() < 2 || g.generated.rows() < 2) {
      throw DegenerateInputError("condition '" + g.condition_id +
                                 "' needs at least 2 real and 2 generated rows");
    }
    if (g.real.cols() != dim || g.generated.cols() != dim) {
      throw DimensionError("condition '" + g.condition_id +
                           "' has a feature dimension different from " +
                           std::to_string(dim));
    }
  }
}

double frechet_distance(const GaussianMoments& a, const GaussianMoments& b) {
  require_same_dim(a.dim(), b.dim(), "frechet_distance");
  if (a.mean == b.mean && a.cov == b.cov) return 0.0;
  const double mean_term = (a.mean - b.mean).squaredNorm();
  return std::max(0.0, mean_term + frechet_trace_term(a.cov, b.cov));
}

double CfredTerms::total() const noexcept {
  return std::max(0.0, mean + cross + conditional);
}

CfredTerms cfred_terms(const JointMoments& real, const JointMoments& gen) {
  require_same_dim(real.dim_x(), gen.dim_x(), "cfred condition");
  require_same_dim(real.dim_v(), gen.dim_v(), "cfred feature");
  if (!close_to(real.mean_x, gen.mean_x, 1e-9) ||
      !close_to(real.cov_xx, gen.cov_xx, 1e-9)) {
    throw PairingError(
        "real and generated moments were accumulated against different "
        "condition embeddings");
  }
  CfredTerms terms;
  terms.mean = (real.mean_v - gen.mean_v).squaredNorm();

  const Eigen::MatrixXd delta = real.cov_vx - gen.cov_vx;
  const PseudoInverse pinv = pseudo_inverse(real.cov_xx);
  terms.cross = (delta * pinv.matrix * delta.transpose()).trace();

  terms.conditional =
      frechet_trace_term(conditional_cov(real), conditional_cov(gen));
  return terms;
}

double cfred_unconditional_form(const JointMoments& real,
                                const JointMoments& gen) {
  return cfred_terms(real, gen).total();
}

double cfred_expectation_form(const GroupedDataset& data,
                              const EstimatorConfig& config) {
  double sum = 0.0;
  for (const auto& g : data.groups()) {
    sum += frechet_distance(accumulate_moments(g.real, config.divisor),
                            accumulate_moments(g.generated, config.divisor));
  }
  return sum / static_cast<double>(data.size());
}

double frechet_distance(const FeatureMatrix& a, const FeatureMatrix& b,
                        const EstimatorConfig& config) {
  return frechet_distance(accumulate_moments(a, config.divisor),
                          accumulate_moments(b, config.divisor));
}

double cfred(const FeatureMatrix& condition, const FeatureMatrix& real,
             const FeatureMatrix& generated, const EstimatorConfig& config) {
  return cfred_unconditional_form(
      accumulate_joint_moments(condition, real, config.divisor),
      accumulate_joint_moments(condition, generated, config.divisor));
}

double cmmd(const FeatureMatrix& real, const FeatureMatrix& generated,
            const CmmdOptions& options) {
  if (real.cols() != generated.cols()) {
    throw DimensionError("cmmd dimension mismatch: " +
                         std::to_string(real.cols()) + " vs " +
                         std::to_string(generated.cols()));
  }
  if (real.rows() < 2 || generated.rows() < 2) {
    throw DegenerateInputError("cmmd needs at least 2 rows per set");
  }
  const bool swap = canonically_before(generated, real);
  const FeatureMatrix& first = swap ? generated : real;
  const FeatureMatrix& second = swap ? real : generated;

  const Eigen::MatrixXd a = normalized_rows(first, "cmmd input");
  const Eigen::MatrixXd b = normalized_rows(second, "cmmd input");
  const double gamma = 1.0 / (2.0 * options.sigma * options.sigma);
  const auto m = static_cast<double>(a.rows());
  const auto n = static_cast<double>(b.rows());

  const Eigen::MatrixXd k_aa = rbf_gram(a, a, gamma);
  const Eigen::MatrixXd k_bb = rbf_gram(b, b, gamma);
  const Eigen::MatrixXd k_ab = rbf_gram(a, b, gamma);
  const double aa = (k_aa.sum() - k_aa.trace()) / (m * (m - 1.0));
  const double bb = (k_bb.sum() - k_bb.trace()) / (n * (n - 1.0));
  const double ab = k_ab.sum() / (m * n);
  return options.scale * (aa + bb - 2.0 * ab);
}

double clipscore(const FeatureMatrix& text, const FeatureMatrix& image) {
  if (text.rows() != image.rows()) {
    throw PairingError("clipscore needs paired rows: " +
                       std::to_string(text.rows()) + " text vs " +
                       std::to_string(image.rows()) + " image");
  }
  if (text.cols() != image.cols()) {
    throw DimensionError("clipscore dimension mismatch: " +
                         std::to_string(text.cols()) + " vs " +
                         std::to_string(image.cols()));
  }
  const Eigen::MatrixXd t = normalized_rows(text, "clipscore text");
  const Eigen::MatrixXd v = normalized_rows(image, "clipscore image");
  double sum = 0.0;
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    sum += std::max(0.0, t.row(r).dot(v.row(r)));
  }
  return 100.0 * sum / static_cast<double>(t.rows());
}

SwapDataset make_swap_dataset(std::size_t k, std::size_t n_per_class,
                              std::size_t shift) {
  if (k < 2 || n_per_class < 2) {
    throw DegenerateInputError("swap dataset needs k >= 2 and n_per_class >= 2");
  }
  const std::size_t n = k * n_per_class;
  std::vector<float> condition(n * k, 0.0f);
  std::vector<float> generated(n * k, 0.0f);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t r = 0; r < n_per_class; ++r) {
      const std::size_t row = c * n_per_class + r;
      condition[row * k + c] = 1.0f;
      generated[row * k + (c + shift) % k] = 1.0f;
    }
  }
  FeatureMatrix x(n, k, condition);
  return SwapDataset{x, x, FeatureMatrix(n, k, std::move(generated))};
}

}  // namespace cfred
