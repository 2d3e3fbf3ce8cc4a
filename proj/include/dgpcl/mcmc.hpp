#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dgpcl/rng.hpp"

namespace dgpcl {

// Gamma(shape, rate) density truncated to [lo, hi]; normalization constants
// are dropped (only ratios matter inside Metropolis steps).
struct GammaPrior {
  double shape = 1.5;
  double rate = 2.6;
  double lo = 1e-4;
  double hi = 1e3;

  bool in_support(double x) const { return x >= lo && x <= hi; }

  double logpdf(double x) const {
    if (!in_support(x)) return -std::numeric_limits<double>::infinity();
    return (shape - 1.0) * std::log(x) - rate * x;
  }
};

struct MhOptions {
  double initial_step = 0.3;
  int adapt_window = 100;
  double target_lo = 0.30;
  double target_hi = 0.45;
  double shrink = 0.8;
  double grow = 1.2;
  double step_lo = 0.01;
  double step_hi = 5.0;
};

// Per-coordinate step sizes plus windowed counters (reset at each
// adaptation) and cumulative counters (never reset, for reporting).
struct MhAdaptState {
  Eigen::VectorXd step;
  std::vector<int> window_proposals;
  std::vector<int> window_accepts;
  std::vector<long> total_proposals;
  std::vector<long> total_accepts;

  MhAdaptState() = default;
  MhAdaptState(int dim, double step0)
      : step(Eigen::VectorXd::Constant(dim, step0)),
        window_proposals(static_cast<std::size_t>(dim), 0),
        window_accepts(static_cast<std::size_t>(dim), 0),
        total_proposals(static_cast<std::size_t>(dim), 0),
        total_accepts(static_cast<std::size_t>(dim), 0) {}

  Eigen::VectorXd accept_rate() const {
    Eigen::VectorXd r(step.size());
    for (Eigen::Index h = 0; h < step.size(); ++h) {
      const auto hs = static_cast<std::size_t>(h);
      r(h) = total_proposals[hs] == 0 ? 0.0
                                      : static_cast<double>(total_accepts[hs]) /
                                            static_cast<double>(total_proposals[hs]);
    }
    return r;
  }
};

// One Metropolis-within-Gibbs sweep over the coordinates of theta with
// lognormal random-walk proposals. log_lik sees the full vector; the
// q-ratio correction log(theta'/theta) accounts for the multiplicative walk.
// Step sizes adapt only while `adapting` is set (burn-in); adapting later
// would break stationarity. Returns the number of accepted moves.
template <typename LogLik>
int mh_sweep(Eigen::VectorXd& theta, double& cur_ll, LogLik&& log_lik, const GammaPrior& prior,
             MhAdaptState& adapt, const MhOptions& opt, bool adapting, RngEngine& rng) {
  const int dim = static_cast<int>(theta.size());
  int accepted = 0;
  for (int h = 0; h < dim; ++h) {
    const auto hs = static_cast<std::size_t>(h);
    const double old_h = theta(h);
    const double prop_h = old_h * std::exp(adapt.step(h) * rnorm(rng));
    const double log_u = std::log(runif01(rng));
    ++adapt.window_proposals[hs];
    ++adapt.total_proposals[hs];
    if (prior.in_support(prop_h)) {
      theta(h) = prop_h;
      const double prop_ll = log_lik(theta);
      const double log_alpha = prop_ll + prior.logpdf(prop_h) - cur_ll - prior.logpdf(old_h) +
                               std::log(prop_h / old_h);
      if (log_u < log_alpha) {
        cur_ll = prop_ll;
        ++accepted;
        ++adapt.window_accepts[hs];
        ++adapt.total_accepts[hs];
      } else {
        theta(h) = old_h;
      }
    }
    if (adapting && adapt.window_proposals[hs] >= opt.adapt_window) {
      const double rate =
          static_cast<double>(adapt.window_accepts[hs]) / adapt.window_proposals[hs];
      if (rate < opt.target_lo) adapt.step(h) *= opt.shrink;
      else if (rate > opt.target_hi) adapt.step(h) *= opt.grow;
      adapt.step(h) = std::clamp(adapt.step(h), opt.step_lo, opt.step_hi);
      adapt.window_proposals[hs] = 0;
      adapt.window_accepts[hs] = 0;
    }
  }
  return accepted;
}

}  // namespace dgpcl
