#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgpcl/normal.hpp"

namespace dgpcl {

// Failure set is {f > g} when fail_above, {f < g} otherwise.
struct Threshold {
  double g = 0.0;
  bool fail_above = true;
};

// Inputs live on the unit cube; functions stretch to their native domain
// internally via z = 4x - 2.

inline double plateau(const Eigen::VectorXd& x) {
  const double s = (4.0 * x.array() - 2.0).sum();
  return 2.0 * std_normal_cdf(std::numbers::sqrt2 * (-4.0 - 3.0 * s)) - 1.0;
}

inline double cross_in_tray(const Eigen::VectorXd& x) {
  if (x.size() != 2) throw std::invalid_argument("cross_in_tray: expects d=2");
  const double z1 = 4.0 * x(0) - 2.0;
  const double z2 = 4.0 * x(1) - 2.0;
  const double a = std::abs(100.0 - std::sqrt(z1 * z1 + z2 * z2) / std::numbers::pi);
  const double inner = std::abs(std::sin(z1) * std::sin(z2) * std::exp(a)) + 1.0;
  return -0.001 * std::pow(inner, 0.1);
}

struct TestFunction {
  std::string id;
  int d;
  Threshold threshold;
  double (*eval)(const Eigen::VectorXd&);
};

inline const std::vector<TestFunction>& test_function_registry() {
  static const std::vector<TestFunction> registry = {
      {"plateau2", 2, {0.0, true}, &plateau},
      {"plateau5", 5, {0.0, true}, &plateau},
      {"crossintray", 2, {-2.0, false}, &cross_in_tray},
  };
  return registry;
}

inline const TestFunction& find_test_function(const std::string& id) {
  for (const auto& f : test_function_registry()) {
    if (f.id == id) return f;
  }
  std::string known;
  for (const auto& f : test_function_registry()) {
    if (!known.empty()) known += ", ";
    known += f.id;
  }
  throw std::invalid_argument("unknown test function '" + id + "' (known: " + known + ")");
}

}  // namespace dgpcl
