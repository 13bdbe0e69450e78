// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/synth.hpp"

#include <string>

#include <Eigen/Eigenvalues>

#include "cfred/error.hpp"

namespace cfred {

namespace {

void require_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                   const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(what) + " must be " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
  }
}

void require_stacked_psd(const Eigen::MatrixXd& cov_xx, const Eigen::MatrixXd& cov_vv,
                         const Eigen::MatrixXd& cov_vx, const char* what) {
  const auto dx = cov_xx.rows();
  const auto dv = cov_vv.rows();
  Eigen::MatrixXd stacked(dx + dv, dx + dv);
  stacked.topLeftCorner(dx, dx) = cov_xx;
  stacked.bottomRightCorner(dv, dv) = cov_vv;
  stacked.bottomLeftCorner(dv, dx) = cov_vx;
  stacked.topRightCorner(dx, dv) = cov_vx.transpose();
  require_symmetric(stacked, what);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(stacked,
                                                              Eigen::EigenvaluesOnly);
  const double worst = solver.eigenvalues().minCoeff();
  if (worst < -psd_tolerance(stacked)) {
    throw NotPsdError(std::string(what) +
                          " is not positive semi-definite; no Gaussian factor exists "
                          "(eigenvalue " + std::to_string(worst) + ")",
                      worst);
  }
}

Eigen::VectorXd draw_normal(Rng& rng, Eigen::Index d) {
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
  return z;
}

FeatureMatrix to_matrix(const std::vector<Eigen::VectorXd>& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return FeatureMatrix::from_eigen(m);
}

}  // namespace

JointMoments JointGaussianSpec::real_moments() const {
  return JointMoments{mean_x, mean_y, cov_xx, cov_yy, cov_yx};
}

JointMoments JointGaussianSpec::generated_moments() const {
  return JointMoments{mean_x, mean_yhat, cov_xx, cov_yhat, cov_yhat_x};
}

void validate(const JointGaussianSpec& spec) {
  const auto dx = spec.mean_x.size();
  const auto dy = spec.mean_y.size();
  if (dx < 1 || dy < 1) throw DimensionError("spec dimensions must be >= 1");
  if (spec.mean_yhat.size() != dy) {
    throw DimensionError("mean_yhat must have the dimension of mean_y");
  }
  require_shape(spec.cov_xx, dx, dx, "cov_xx");
  require_shape(spec.cov_yy, dy, dy, "cov_yy");
  require_shape(spec.cov_yhat, dy, dy, "cov_yhat");
  require_shape(spec.cov_yx, dy, dx, "cov_yx");
  require_shape(spec.cov_yhat_x, dy, dx, "cov_yhat_x");
  require_stacked_psd(spec.cov_xx, spec.cov_yy, spec.cov_yx, "real joint covariance");
  require_stacked_psd(spec.cov_xx, spec.cov_yhat, spec.cov_yhat_x,
                      "generated joint covariance");
}

FeatureMatrix sample_conditional(const JointMoments& truth, const FeatureMatrix& condition,
                                 std::uint64_t seed, std::uint64_t stream) {
  if (static_cast<Eigen::Index>(condition.cols()) != truth.dim_x()) {
    throw DimensionError("condition sample has " + std::to_string(condition.cols()) +
                         " columns, spec expects " + std::to_string(truth.dim_x()));
  }
  const Eigen::MatrixXd regression = truth.cov_vx * pseudo_inverse(truth.cov_xx).matrix;
  const Eigen::MatrixXd noise = psd_sqrt(conditional_cov(truth));
  Rng rng(seed, stream);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(condition.rows()), truth.dim_v());
  for (std::size_t r = 0; r < condition.rows(); ++r) {
    const Eigen::VectorXd x = condition.row_eigen(r);
    const Eigen::VectorXd z = draw_normal(rng, truth.dim_v());
    out.row(static_cast<Eigen::Index>(r)) =
        (truth.mean_v + regression * (x - truth.mean_x) + noise * z).transpose();
  }
  return FeatureMatrix::from_eigen(out);
}

SampleTriple sample_joint(const JointGaussianSpec& spec, std::size_t n,
                          std::uint64_t generated_stream) {
  if (n < 2) throw DegenerateInputError("sample_joint needs n >= 2");
  validate(spec);
  const Eigen::MatrixXd root_xx = psd_sqrt(spec.cov_xx);
  Rng rng(spec.seed, streams::kCondition);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), spec.mean_x.size());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    x.row(r) = (spec.mean_x + root_xx * draw_normal(rng, spec.mean_x.size())).transpose();
  }
  FeatureMatrix condition = FeatureMatrix::from_eigen(x);
  FeatureMatrix real =
      sample_conditional(spec.real_moments(), condition, spec.seed, streams::kReal);
  FeatureMatrix generated =
      sample_conditional(spec.generated_moments(), condition, spec.seed, generated_stream);
  return SampleTriple{std::move(condition), std::move(real), std::move(generated)};
}

double analytic_cfred(const JointGaussianSpec& spec) {
  validate(spec);
  return cfred_unconditional_form(spec.real_moments(), spec.generated_moments());
}

double analytic_fd(const JointGaussianSpec& spec) {
  validate(spec);
  return frechet_distance(GaussianMoments{spec.mean_y, spec.cov_yy},
                          GaussianMoments{spec.mean_yhat, spec.cov_yhat});
}

DiscreteSample sample_discrete(const DiscreteConditionSpec& spec,
                               std::size_t n_per_condition) {
  const std::size_t k = spec.condition_embeddings.size();
  if (k == 0 || spec.real_means.size() != k || spec.gen_means.size() != k) {
    throw DimensionError("discrete spec needs one embedding, real mean and generated "
                         "mean per condition");
  }
  if (n_per_condition < 2) throw DegenerateInputError("need >= 2 rows per condition");
  const Eigen::MatrixXd root_real = psd_sqrt(spec.real_cov);
  const Eigen::MatrixXd root_gen = psd_sqrt(spec.gen_cov);
  Rng real_rng(spec.seed, streams::kReal);
  Rng gen_rng(spec.seed, streams::kGenerated);

  std::vector<ConditionGroup> groups;
  std::vector<Eigen::VectorXd> all_x, all_y, all_g;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<Eigen::VectorXd> ys, gs;
    for (std::size_t i = 0; i < n_per_condition; ++i) {
      ys.push_back(spec.real_means[c] + root_real * draw_normal(real_rng, root_real.rows()));
      gs.push_back(spec.gen_means[c] + root_gen * draw_normal(gen_rng, root_gen.rows()));
      all_x.push_back(spec.condition_embeddings[c]);
    }
    all_y.insert(all_y.end(), ys.begin(), ys.end());
    all_g.insert(all_g.end(), gs.begin(), gs.end());
    std::vector<float> embedding(spec.condition_embeddings[c].data(),
                                 spec.condition_embeddings[c].data() +
                                     spec.condition_embeddings[c].size());
    groups.push_back(ConditionGroup{"c" + std::to_string(c), std::move(embedding),
                                    to_matrix(ys), to_matrix(gs)});
  }
  return DiscreteSample{GroupedDataset(std::move(groups)),
                        SampleTriple{to_matrix(all_x), to_matrix(all_y), to_matrix(all_g)}};
}

double analytic_cfred(const DiscreteConditionSpec& spec) {
  double sum = 0.0;
  for (std::size_t c = 0; c < spec.real_means.size(); ++c) {
    sum += frechet_distance(GaussianMoments{spec.real_means[c], spec.real_cov},
                            GaussianMoments{spec.gen_means[c], spec.gen_cov});
  }
  return sum / static_cast<double>(spec.real_means.size());
}

}  // namespace cfred
