#pragma once

#include <Eigen/Dense>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dgpcl/rng.hpp"

namespace dgpcl {

// Latin hypercube on [0,1]^d: per dimension, one point uniformly inside each
// of n equal strata, strata order permuted.
inline Eigen::MatrixXd lhs(int n, int d, RngEngine& rng) {
  if (n < 1) throw std::invalid_argument("lhs: n must be positive");
  if (d < 1) throw std::invalid_argument("lhs: d must be positive");
  Eigen::MatrixXd x(n, d);
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int h = 0; h < d; ++h) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const auto j = runif_index(rng, static_cast<std::size_t>(i) + 1);
      std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
    }
    for (int i = 0; i < n; ++i) {
      x(i, h) = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + runif01(rng)) /
                static_cast<double>(n);
    }
  }
  return x;
}

}  // namespace dgpcl
