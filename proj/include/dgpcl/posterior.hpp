#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace dgpcl {

// Per-sample predictive moments: row t holds the moments under posterior
// sample t, columns index prediction points.
struct MomentSamples {
  Eigen::MatrixXd mu;
  Eigen::MatrixXd var;

  Eigen::Index n_samples() const { return mu.rows(); }
  Eigen::Index n_points() const { return mu.cols(); }
};

struct AggregatedPosterior {
  Eigen::VectorXd mu;
  Eigen::VectorXd var;
};

// Gaussian-mixture moments across posterior samples: the mean averages the
// per-sample means, the variance adds the population spread of those means
// to the average per-sample variance.
inline AggregatedPosterior aggregate(const MomentSamples& s) {
  const Eigen::Index t = s.n_samples();
  if (t == 0) throw std::invalid_argument("aggregate: no posterior samples");
  if (s.var.rows() != t || s.var.cols() != s.mu.cols())
    throw std::invalid_argument("aggregate: mu/var shape mismatch");
  AggregatedPosterior out;
  out.mu = s.mu.colwise().mean();
  const Eigen::MatrixXd centered = s.mu.rowwise() - out.mu.transpose();
  out.var = s.var.colwise().mean().transpose() +
            centered.array().square().colwise().sum().matrix().transpose() /
                static_cast<double>(t);
  return out;
}

}  // namespace dgpcl
