#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace conedex {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline Mat pauli1() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Mat pauli2() {
  Mat m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline Mat pauli3() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// The unit Clifford action on the line: A = i*sigma2, real antisymmetric,
/// A^* = -A, A^* A = I.
inline Mat cliffordSigma() {
  Mat m(2, 2);
  m << 0, 1, -1, 0;
  return m;
}

inline Mat blockDiag(const Mat& a, const Mat& b) {
  Mat m = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

inline bool isHermitian(const Mat& m, double tol = 1e-12) {
  return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

inline bool isSkewHermitian(const Mat& m, double tol = 1e-12) {
  return (m + m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

inline bool commutes(const Mat& a, const Mat& b, double tol = 1e-12) {
  return (a * b - b * a).norm() <= tol * std::max(1.0, a.norm() * b.norm());
}

inline int numericalRank(const Mat& m, double tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  double cut = tol * std::max(1.0, s(0));
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

/// Orthonormal basis of the (numerical) nullspace, as columns.
inline Mat nullspaceBasis(const Mat& m, double tol = 1e-10) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double cut = tol * std::max(1.0, s.size() > 0 ? s(0) : 1.0);
  int nullity = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) <= cut) ++nullity;
  // account for wide/tall shapes
  nullity += static_cast<int>(m.cols() - s.size());
  return svd.matrixV().rightCols(nullity);
}

inline Mat orthonormalize(const Mat& m) {
  if (m.cols() == 0) return m;
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ() * Mat::Identity(m.rows(), m.cols());
  return q;
}

}  // namespace conedex
