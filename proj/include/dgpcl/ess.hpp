#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dgpcl/rng.hpp"

namespace dgpcl {

namespace detail {
// Point on the ellipse through w (angle 0) and nu (angle pi/2).
inline Eigen::VectorXd ess_point(const Eigen::VectorXd& w, const Eigen::VectorXd& nu,
                                 double angle) {
  return w * std::cos(angle) + nu * std::sin(angle);
}
}  // namespace detail

// Draw nu ~ N(0, L L^T) from the prior factor.
inline Eigen::VectorXd sample_prior(const Eigen::MatrixXd& l, RngEngine& rng) {
  Eigen::VectorXd z(l.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rnorm(rng);
  return l.triangularView<Eigen::Lower>() * z;
}

// One elliptical slice update of w against log_lik, with N(0, L L^T) prior
// (Murray, Adams & MacKay 2010). The bracket shrinks toward angle 0 until a
// point clears the slice; collapse below min_bracket means the likelihood
// rejected everything, which indicates a broken target.
template <typename LogLik>
Eigen::VectorXd ess_step(const Eigen::VectorXd& w, const Eigen::MatrixXd& prior_chol_l,
                         LogLik&& log_lik, RngEngine& rng, double* cur_ll_inout = nullptr,
                         double min_bracket = 1e-12) {
  const Eigen::VectorXd nu = sample_prior(prior_chol_l, rng);

  const double ll_w = (cur_ll_inout && std::isfinite(*cur_ll_inout)) ? *cur_ll_inout : log_lik(w);
  const double log_threshold = std::log(runif01(rng)) + ll_w;

  double angle = runif(rng, 0.0, 2.0 * std::numbers::pi);
  double lo = angle - 2.0 * std::numbers::pi;
  double hi = angle;

  while (true) {
    const Eigen::VectorXd proposal = detail::ess_point(w, nu, angle);
    const double ll = log_lik(proposal);
    if (ll > log_threshold) {
      if (cur_ll_inout) *cur_ll_inout = ll;
      return proposal;
    }
    if (angle < 0.0) lo = angle;
    else hi = angle;
    if (hi - lo < min_bracket)
      throw std::runtime_error("ess_step: slice bracket collapsed below " +
                               std::to_string(min_bracket));
    angle = runif(rng, lo, hi);
  }
}

}  // namespace dgpcl
