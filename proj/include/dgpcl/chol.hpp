#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dgpcl {

struct NotPositiveDefinite : std::runtime_error {
  int pivot;
  explicit NotPositiveDefinite(int pivot_index)
      : std::runtime_error("Cholesky failed: non-positive pivot at index " +
                           std::to_string(pivot_index)),
        pivot(pivot_index) {}
};

// Index of the first non-positive pivot a textbook Cholesky would hit.
inline int first_bad_pivot(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double d = a(k, k) - l.row(k).head(k).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) return static_cast<int>(k);
    l(k, k) = std::sqrt(d);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      l(i, k) = (a(i, k) - l.row(i).head(k).dot(l.row(k).head(k))) / l(k, k);
    }
  }
  return -1;
}

// Lower-triangular factor L with A = L L^T. Throws NotPositiveDefinite
// naming the offending pivot.
inline Eigen::MatrixXd chol_factor(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("chol_factor: matrix must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(first_bad_pivot(a));
  return llt.matrixL();
}

inline Eigen::VectorXd chol_solve(const Eigen::MatrixXd& l, const Eigen::VectorXd& b) {
  Eigen::VectorXd y = l.triangularView<Eigen::Lower>().solve(b);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

inline Eigen::MatrixXd chol_solve(const Eigen::MatrixXd& l, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd y = l.triangularView<Eigen::Lower>().solve(b);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

inline double chol_logdet(const Eigen::MatrixXd& l) {
  return 2.0 * l.diagonal().array().log().sum();
}

}  // namespace dgpcl
