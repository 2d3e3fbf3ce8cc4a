#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dgpcl/chol.hpp"
#include "dgpcl/warnings.hpp"

namespace dgpcl {

// Lengthscales act on squared distances: sum_h (x_h - x'_h)^2 / theta_h.
struct KernelHyper {
  Eigen::VectorXd theta;
  double tau2 = 1.0;
  double eta = 1e-6;

  void validate() const {
    if (theta.size() == 0) throw std::invalid_argument("KernelHyper: theta is empty");
    if ((theta.array() <= 0.0).any())
      throw std::invalid_argument("KernelHyper: lengthscales must be positive");
    if (!(tau2 > 0.0)) throw std::invalid_argument("KernelHyper: tau2 must be positive");
    if (!(eta > 0.0)) throw std::invalid_argument("KernelHyper: eta must be positive");
  }
};

inline double scaled_sq_dist(const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                             const Eigen::VectorXd& theta) {
  if (x.size() != x2.size() || x.size() != theta.size())
    throw std::invalid_argument("scaled_sq_dist: dimension mismatch");
  return ((x - x2).array().square() / theta.array()).sum();
}

// Matern-5/2 correlation as a function of the scaled squared distance.
inline double matern52(double r2) {
  if (r2 < 0.0) {
    if (r2 < -1e-12) throw std::invalid_argument("matern52: negative squared distance");
    r2 = 0.0;
  }
  const double r = std::sqrt(r2);
  const double sqrt5r = std::sqrt(5.0) * r;
  return (1.0 + sqrt5r + (5.0 / 3.0) * r2) * std::exp(-sqrt5r);
}

// Unit-scale correlation matrix K + eta*I over the rows of x.
inline Eigen::MatrixXd corr_matrix(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta,
                                   double eta) {
  const Eigen::Index n = x.rows();
  if (x.cols() != theta.size())
    throw std::invalid_argument("corr_matrix: theta size must match columns");
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0 + eta;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = matern52(((x.row(i) - x.row(j)).array().square() /
                                 theta.transpose().array()).sum());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

// Self-covariance tau2 * (K + eta*I).
inline Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const KernelHyper& hyp) {
  hyp.validate();
  return hyp.tau2 * corr_matrix(x, hyp.theta, hyp.eta);
}

// Cross-covariance tau2 * K(x1, x2). The nugget never appears off the
// self-covariance diagonal, even if rows of x1 and x2 coincide.
inline Eigen::MatrixXd cross_kernel_matrix(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2,
                                           const KernelHyper& hyp) {
  hyp.validate();
  if (x1.cols() != x2.cols()) throw std::invalid_argument("cross_kernel_matrix: column mismatch");
  Eigen::MatrixXd k(x1.rows(), x2.rows());
  for (Eigen::Index i = 0; i < x1.rows(); ++i) {
    for (Eigen::Index j = 0; j < x2.rows(); ++j) {
      k(i, j) = matern52(((x1.row(i) - x2.row(j)).array().square() /
                          hyp.theta.transpose().array()).sum());
    }
  }
  return hyp.tau2 * k;
}

struct CorrChol {
  Eigen::MatrixXd l;
  double eta_used;
};

// Factor K + eta*I, retrying once with eta*100 if the factorization hits a
// non-positive pivot. A second failure propagates.
inline CorrChol corr_chol(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta, double eta) {
  try {
    return {chol_factor(corr_matrix(x, theta, eta)), eta};
  } catch (const NotPositiveDefinite& e) {
    const double inflated = eta * 100.0;
    warn("correlation matrix not positive definite (pivot " + std::to_string(e.pivot) +
         "); retrying with nugget " + std::to_string(inflated));
    return {chol_factor(corr_matrix(x, theta, inflated)), inflated};
  }
}

}  // namespace dgpcl
