// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cfred Authors

#include "cfred/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "cfred/error.hpp"

namespace cfred {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kPsdRelativeTolerance = 1e-8;

double divisor_for(std::size_t n, CovarianceDivisor divisor) {
  return divisor == CovarianceDivisor::kUnbiased ? static_cast<double>(n - 1)
                                                 : static_cast<double>(n);
}

Eigen::VectorXd column_means(const FeatureMatrix& m) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      mean(static_cast<Eigen::Index>(c)) += row[c];
    }
  }
  return mean / static_cast<double>(m.rows());
}

// Centered copy in double precision.
Eigen::MatrixXd centered(const FeatureMatrix& m, const Eigen::VectorXd& mean) {
  Eigen::MatrixXd out = m.to_eigen();
  out.rowwise() -= mean.transpose();
  return out;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen_of(
    const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NotPsdError("symmetric eigendecomposition did not converge",
                      std::numeric_limits<double>::quiet_NaN());
  }
  return solver;
}

void require_psd_spectrum(const Eigen::VectorXd& eigenvalues, double tolerance,
                          const char* what) {
  const double worst = eigenvalues.minCoeff();
  if (worst < -tolerance) {
    throw NotPsdError(std::string(what) +
                          " is not positive semi-definite: eigenvalue " +
                          std::to_string(worst) + " below clamp threshold -" +
                          std::to_string(tolerance),
                      worst);
  }
}

Eigen::MatrixXd reconstruct(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& s,
                            const Eigen::VectorXd& values) {
  const Eigen::MatrixXd& v = s.eigenvectors();
  return symmetrized(v * values.asDiagonal() * v.transpose());
}

}  // namespace

GaussianMoments accumulate_moments(const FeatureMatrix& features,
                                   CovarianceDivisor divisor) {
  if (features.rows() < 2) {
    throw DegenerateInputError("moment estimation needs at least 2 rows, got " +
                               std::to_string(features.rows()));
  }
  GaussianMoments out;
  out.mean = column_means(features);
  const Eigen::MatrixXd c = centered(features, out.mean);
  out.cov = symmetrized(c.transpose() * c) /
            divisor_for(features.rows(), divisor);
  return out;
}

JointMoments accumulate_joint_moments(const FeatureMatrix& x,
                                      const FeatureMatrix& v,
                                      CovarianceDivisor divisor) {
  if (x.rows() != v.rows()) {
    throw PairingError("joint moments need paired rows: condition has " +
                       std::to_string(x.rows()) + " rows, features have " +
                       std::to_string(v.rows()));
  }
  if (x.rows() < 2) {
    throw DegenerateInputError("moment estimation needs at least 2 rows, got " +
                               std::to_string(x.rows()));
  }
  const double denom = divisor_for(x.rows(), divisor);
  JointMoments out;
  out.mean_x = column_means(x);
  out.mean_v = column_means(v);
  const Eigen::MatrixXd cx = centered(x, out.mean_x);
  const Eigen::MatrixXd cv = centered(v, out.mean_v);
  out.cov_xx = symmetrized(cx.transpose() * cx) / denom;
  out.cov_vv = symmetrized(cv.transpose() * cv) / denom;
  out.cov_vx = (cv.transpose() * cx) / denom;
  return out;
}

void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + " must be square, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  if (m.size() == 0) {
    throw DimensionError(std::string(what) + " is empty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTolerance * scale)) {
    throw DimensionError(std::string(what) + " is not symmetric (max |m - m^T| = " +
                         std::to_string(asym) + ")");
  }
}

double psd_tolerance(const Eigen::MatrixXd& m) {
  const auto d = static_cast<double>(m.rows());
  const double relative = kPsdRelativeTolerance * std::abs(m.trace()) / d;
  const double ulps = 64.0 * d * std::numeric_limits<double>::epsilon() *
                      m.cwiseAbs().maxCoeff();
  return std::max(relative, ulps);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  require_symmetric(m, "psd_sqrt input");
  const Eigen::MatrixXd sym = symmetrized(m);
  const auto solver = eigen_of(sym);
  require_psd_spectrum(solver.eigenvalues(), psd_tolerance(sym), "psd_sqrt input");
  const Eigen::VectorXd roots =
      solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return reconstruct(solver, roots);
}

Eigen::MatrixXd clamp_psd(const Eigen::MatrixXd& m) {
  require_symmetric(m, "clamp_psd input");
  const Eigen::MatrixXd sym = symmetrized(m);
  const auto solver = eigen_of(sym);
  require_psd_spectrum(solver.eigenvalues(), psd_tolerance(sym), "clamp_psd input");
  if (solver.eigenvalues().minCoeff() >= 0.0) {
    return sym;
  }
  return reconstruct(solver, solver.eigenvalues().cwiseMax(0.0));
}

PseudoInverse pseudo_inverse(const Eigen::MatrixXd& m, double rcond) {
  require_symmetric(m, "pseudo_inverse input");
  const auto n = m.rows();
  const auto solver = eigen_of(symmetrized(m));
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double lambda_max = values.maxCoeff();
  PseudoInverse out;
  if (!(lambda_max > 0.0)) {
    out.matrix = Eigen::MatrixXd::Zero(n, n);
    out.rank = 0;
    return out;
  }
  const double cutoff = rcond * lambda_max;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values(i) > cutoff) {
      inv(i) = 1.0 / values(i);
      ++out.rank;
    }
  }
  out.matrix = reconstruct(solver, inv);
  return out;
}

double trace_sqrt_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require_symmetric(a, "trace_sqrt_product lhs");
  require_symmetric(b, "trace_sqrt_product rhs");
  if (a.rows() != b.rows()) {
    throw DimensionError("trace_sqrt_product dimension mismatch: " +
                         std::to_string(a.rows()) + " vs " +
                         std::to_string(b.rows()));
  }
  const Eigen::MatrixXd b_sym = symmetrized(b);
  require_psd_spectrum(eigen_of(b_sym).eigenvalues(), psd_tolerance(b_sym),
                       "trace_sqrt_product rhs");
  const Eigen::MatrixXd root_a = psd_sqrt(a);
  const Eigen::MatrixXd inner = symmetrized(root_a * b_sym * root_a);
  const Eigen::VectorXd values = eigen_of(inner).eigenvalues();
  double total = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    total += std::sqrt(std::max(values(i), 0.0));
  }
  return total;
}

Eigen::MatrixXd conditional_cov(const JointMoments& joint) {
  if (joint.cov_vx.rows() != joint.dim_v() || joint.cov_vx.cols() != joint.dim_x()) {
    throw DimensionError("joint moments cross block has the wrong shape");
  }
  const PseudoInverse pinv = pseudo_inverse(joint.cov_xx);
  const Eigen::MatrixXd explained =
      joint.cov_vx * pinv.matrix * joint.cov_vx.transpose();
  const Eigen::MatrixXd residual = symmetrized(joint.cov_vv - explained);

  const auto solver = eigen_of(residual);
  const double tolerance =
      std::max(psd_tolerance(joint.cov_vv), psd_tolerance(residual));
  require_psd_spectrum(solver.eigenvalues(), tolerance, "conditional covariance");
  if (solver.eigenvalues().minCoeff() >= 0.0) {
    return residual;
  }
  return reconstruct(solver, solver.eigenvalues().cwiseMax(0.0));
}

}  // namespace cfred
