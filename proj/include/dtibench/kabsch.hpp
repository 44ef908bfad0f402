// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dtibench/error.hpp"

namespace dtibench {

template <typename Scalar>
using Points3 = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

/// Rigid transform x -> rotation * x + translation taking the first point set
/// onto the second.
template <typename Scalar>
struct Superposition {
  Eigen::Matrix<Scalar, 3, 3> rotation = Eigen::Matrix<Scalar, 3, 3>::Identity();
  Eigen::Matrix<Scalar, 3, 1> translation = Eigen::Matrix<Scalar, 3, 1>::Zero();
  Scalar rmsd = 0;
  bool degenerate = false;  // covariance rank < 2: rotation not unique
};

template <typename Scalar, typename Derived>
Points3<Scalar> apply(const Superposition<Scalar>& s, const Eigen::MatrixBase<Derived>& points) {
  return (points * s.rotation.transpose()).rowwise() + s.translation.transpose();
}

/// Root mean square of row-wise distances between two equally sized sets.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar rmsd(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() == 0) return Scalar(0);
  return std::sqrt((a - b).rowwise().squaredNorm().sum() / static_cast<Scalar>(a.rows()));
}

/// Least-squares proper rotation (Kabsch). Reflections are corrected through
/// the sign of the smallest singular direction, so det(rotation) = +1.
template <typename DerivedP, typename DerivedQ>
Superposition<typename DerivedP::Scalar> kabsch_superpose(const Eigen::MatrixBase<DerivedP>& P,
                                                           const Eigen::MatrixBase<DerivedQ>& Q) {
  using Scalar = typename DerivedP::Scalar;
  using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  static_assert(DerivedP::ColsAtCompileTime == 3 || DerivedP::ColsAtCompileTime == Eigen::Dynamic);

  if (P.cols() != 3 || Q.cols() != 3 || P.rows() != Q.rows()) {
    throw Error(ErrorKind::Shape, "kabsch: point sets must be n x 3 with equal n");
  }
  if (P.rows() < 3) throw Error(ErrorKind::Validation, "kabsch: need at least 3 point pairs");

  const Vec3 p_mean = P.colwise().mean().transpose();
  const Vec3 q_mean = Q.colwise().mean().transpose();
  const Points3<Scalar> pc = P.rowwise() - p_mean.transpose();
  const Points3<Scalar> qc = Q.rowwise() - q_mean.transpose();

  const Mat3 cov = pc.transpose() * qc;
  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  const Vec3 sv = svd.singularValues();

  Mat3 correction = Mat3::Identity();
  correction(2, 2) = (v * u.transpose()).determinant() < 0 ? Scalar(-1) : Scalar(1);

  Superposition<Scalar> out;
  out.rotation = v * correction * u.transpose();
  out.translation = q_mean - out.rotation * p_mean;
  const Scalar tol = std::numeric_limits<Scalar>::epsilon() * Scalar(1e3);
  out.degenerate = !(sv(0) > Scalar(0)) || sv(1) <= tol * sv(0);
  out.rmsd = rmsd(apply(out, P), Q);
  return out;
}

}  // namespace dtibench
