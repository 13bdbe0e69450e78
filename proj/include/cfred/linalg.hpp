// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors
//
// Moment accumulation and the symmetric-matrix primitives shared by every
// Fréchet-style metric. All functions are pure and deterministic; arithmetic
// is 64-bit regardless of the 32-bit storage of FeatureMatrix.

#pragma once

#include <Eigen/Core>

#include "cfred/feature_matrix.hpp"

namespace cfred {

enum class CovarianceDivisor {
  kUnbiased,           // divide by n - 1
  kMaximumLikelihood,  // divide by n
};

struct GaussianMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Eigen::Index dim() const noexcept { return mean.size(); }
};

/// Moments of the stacked vector (x, v) where x is the condition embedding
/// and v the image embedding. cov_xv is cov_vx transposed and is not stored.
struct JointMoments {
  Eigen::VectorXd mean_x;
  Eigen::VectorXd mean_v;
  Eigen::MatrixXd cov_xx;
  Eigen::MatrixXd cov_vv;
  Eigen::MatrixXd cov_vx;  // d_v x d_x

  Eigen::Index dim_x() const noexcept { return mean_x.size(); }
  Eigen::Index dim_v() const noexcept { return mean_v.size(); }
  GaussianMoments marginal_v() const { return {mean_v, cov_vv}; }
  GaussianMoments marginal_x() const { return {mean_x, cov_xx}; }
};

/// Column means and sample covariance. Requires at least two rows.
GaussianMoments accumulate_moments(
    const FeatureMatrix& features,
    CovarianceDivisor divisor = CovarianceDivisor::kUnbiased);

/// Row i of `x` pairs with row i of `v`. Throws PairingError on a row-count
/// mismatch.
JointMoments accumulate_joint_moments(
    const FeatureMatrix& x, const FeatureMatrix& v,
    CovarianceDivisor divisor = CovarianceDivisor::kUnbiased);

/// Throws DimensionError unless `m` is square and symmetric to within
/// 1e-10 relative to its largest entry.
void require_symmetric(const Eigen::MatrixXd& m, const char* what);

/// Negative eigenvalues at or above -psd_tolerance(m) are treated as zero.
/// The tolerance is 1e-8 * |trace| / d, floored at a few ulps of the matrix
/// norm so that exactly-singular inputs produced by subtraction still pass.
double psd_tolerance(const Eigen::MatrixXd& m);

/// Symmetric square root via eigendecomposition, eigenvalues clamped at 0.
/// Throws NotPsdError when an eigenvalue falls below the clamp threshold.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

/// Projection onto the PSD cone with the same clamp rule as psd_sqrt. Returns
/// the input unchanged when no eigenvalue is negative.
Eigen::MatrixXd clamp_psd(const Eigen::MatrixXd& m);

struct PseudoInverse {
  Eigen::MatrixXd matrix;
  Eigen::Index rank = 0;

  bool rank_zero() const noexcept { return rank == 0; }
};

inline constexpr double kPinvRcond = 1e-10;

/// Moore-Penrose pseudo-inverse of a symmetric matrix. Eigenvalues at or below
/// rcond * lambda_max are treated as exactly zero. A rank-zero input yields a
/// zero matrix with rank 0 rather than an error.
PseudoInverse pseudo_inverse(const Eigen::MatrixXd& m,
                             double rcond = kPinvRcond);

/// Tr((a^1/2 b a^1/2)^1/2) for PSD a, b.
double trace_sqrt_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// cov_vv - cov_vx * pinv(cov_xx) * cov_xv, the residual covariance of v
/// after Gaussian conditioning on x. Small negative eigenvalues left by the
/// subtraction are clamped relative to the scale of cov_vv.
Eigen::MatrixXd conditional_cov(const JointMoments& joint);

}  // namespace cfred
