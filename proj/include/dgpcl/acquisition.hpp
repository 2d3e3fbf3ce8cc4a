#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dgpcl/normal.hpp"
#include "dgpcl/posterior.hpp"
#include "dgpcl/rng.hpp"
#include "dgpcl/testfns.hpp"

namespace dgpcl {

inline constexpr double kSdFloor = 1e-10;

// P(failure) under a Gaussian predictive; sd is floored to keep the
// probability defined at interpolated points.
inline double failure_prob(double mu, double sd, const Threshold& threshold) {
  const double s = std::max(sd, kSdFloor);
  const double z = (threshold.g - mu) / s;
  return threshold.fail_above ? 1.0 - std_normal_cdf(z) : std_normal_cdf(z);
}

// Binary entropy in nats with the 0*log(0) = 0 convention. Inputs within
// 1e-12 of [0,1] are clamped; anything further out is a caller bug.
inline double binary_entropy(double p) {
  if (p < -1e-12 || p > 1.0 + 1e-12)
    throw std::invalid_argument("binary_entropy: p outside [0,1]");
  p = std::clamp(p, 0.0, 1.0);
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

struct CandidateScores {
  Eigen::VectorXd entropy;
  Eigen::VectorXd sd;
};

// Entropy of the failure call under the aggregated (mixture) moments.
inline CandidateScores score_posthoc(const AggregatedPosterior& post,
                                     const Threshold& threshold) {
  const Eigen::Index m = post.mu.size();
  CandidateScores s;
  s.entropy.resize(m);
  s.sd = post.var.array().max(0.0).sqrt();
  for (Eigen::Index i = 0; i < m; ++i) {
    s.entropy(i) = binary_entropy(failure_prob(post.mu(i), s.sd(i), threshold));
  }
  return s;
}

// Entropy averaged over posterior samples before aggregation; the sd
// objective still comes from the mixture.
inline CandidateScores score_mcmc(const MomentSamples& samples, const Threshold& threshold) {
  const Eigen::Index t = samples.n_samples();
  const Eigen::Index m = samples.n_points();
  if (t == 0) throw std::invalid_argument("score_mcmc: no posterior samples");
  const AggregatedPosterior post = aggregate(samples);
  CandidateScores s;
  s.entropy = Eigen::VectorXd::Zero(m);
  s.sd = post.var.array().max(0.0).sqrt();
  for (Eigen::Index k = 0; k < t; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double sd_ki = std::sqrt(std::max(samples.var(k, i), 0.0));
      s.entropy(i) += binary_entropy(failure_prob(samples.mu(k, i), sd_ki, threshold));
    }
  }
  s.entropy /= static_cast<double>(t);
  return s;
}

// Indices (ascending) of points not weakly dominated in (entropy, sd):
// j dominates i when it is >= in both coordinates and > in at least one.
// Exact duplicates are all retained.
inline std::vector<int> pareto_front(const CandidateScores& scores) {
  const Eigen::Index m = scores.entropy.size();
  if (m == 0) throw std::invalid_argument("pareto_front: no candidates");
  if (scores.sd.size() != m) throw std::invalid_argument("pareto_front: score lengths differ");
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores.entropy(a) != scores.entropy(b)) return scores.entropy(a) > scores.entropy(b);
    return scores.sd(a) > scores.sd(b);
  });

  std::vector<int> front;
  double best_sd = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double group_max_sd = -std::numeric_limits<double>::infinity();
    while (j < order.size() && scores.entropy(order[j]) == scores.entropy(order[i])) {
      group_max_sd = std::max(group_max_sd, scores.sd(order[j]));
      ++j;
    }
    if (group_max_sd > best_sd) {
      for (std::size_t k = i; k < j; ++k) {
        if (scores.sd(order[k]) == group_max_sd) front.push_back(order[k]);
      }
      best_sd = group_max_sd;
    }
    i = j;
  }
  std::sort(front.begin(), front.end());
  return front;
}

inline int select_uniform(const std::vector<int>& front, RngEngine& rng) {
  if (front.empty()) throw std::invalid_argument("select_uniform: empty front");
  return front[runif_index(rng, front.size())];
}

// Highest entropy wins; ties resolve to the lowest index, no randomness.
inline int select_max_entropy(const CandidateScores& scores) {
  if (scores.entropy.size() == 0)
    throw std::invalid_argument("select_max_entropy: no candidates");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.entropy.size(); ++i) {
    if (scores.entropy(i) > scores.entropy(best)) best = i;
  }
  return static_cast<int>(best);
}

}  // namespace dgpcl
