#pragma once

#include <cmath>
#include <numbers>

namespace dgpcl {

inline double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Phi(z) via erfc for accuracy in both tails.
inline double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace dgpcl
