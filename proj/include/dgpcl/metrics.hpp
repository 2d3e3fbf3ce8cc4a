#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dgpcl/normal.hpp"
#include "dgpcl/testfns.hpp"
#include "dgpcl/warnings.hpp"

namespace dgpcl {

struct Confusion {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
};

// Failure calls use the strict inequality on the failing side; values on the
// threshold itself count as non-failures.
inline Confusion classify(const Eigen::VectorXd& f_true, const Eigen::VectorXd& mu,
                          const Threshold& threshold) {
  if (f_true.size() != mu.size())
    throw std::invalid_argument("classify: f_true and mu differ in length");
  Confusion c;
  for (Eigen::Index i = 0; i < f_true.size(); ++i) {
    const bool true_fail = threshold.fail_above ? f_true(i) > threshold.g
                                                : f_true(i) < threshold.g;
    const bool pred_fail = threshold.fail_above ? mu(i) > threshold.g
                                                : mu(i) < threshold.g;
    if (true_fail && pred_fail) ++c.tp;
    else if (!true_fail && pred_fail) ++c.fp;
    else if (true_fail && !pred_fail) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace detail {
inline double safe_ratio(double num, double den, const char* name) {
  if (den == 0.0) {
    warn(std::string(name) + " undefined (empty denominator); reporting 1.0");
    return 1.0;
  }
  return num / den;
}
}  // namespace detail

inline double sensitivity(const Confusion& c) {
  return detail::safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn),
                            "sensitivity");
}

inline double specificity(const Confusion& c) {
  return detail::safe_ratio(static_cast<double>(c.tn), static_cast<double>(c.tn + c.fp),
                            "specificity");
}

inline double f1_score(const Confusion& c) {
  return detail::safe_ratio(2.0 * static_cast<double>(c.tp),
                            static_cast<double>(2 * c.tp + c.fp + c.fn), "f1");
}

inline double rmse(const Eigen::VectorXd& f_true, const Eigen::VectorXd& mu) {
  if (f_true.size() != mu.size())
    throw std::invalid_argument("rmse: f_true and mu differ in length");
  if (f_true.size() == 0) throw std::invalid_argument("rmse: empty input");
  return std::sqrt((f_true - mu).squaredNorm() / static_cast<double>(f_true.size()));
}

// CRPS for a Gaussian predictive N(mu_i, sd_i^2), averaged over points:
//   sd * [ 2*phi(z) + z*(2*Phi(z) - 1) - 1/sqrt(pi) ],  z = (f - mu)/sd.
inline double crps_gaussian(const Eigen::VectorXd& f_true, const Eigen::VectorXd& mu,
                            const Eigen::VectorXd& sd) {
  if (f_true.size() != mu.size() || f_true.size() != sd.size())
    throw std::invalid_argument("crps_gaussian: input lengths differ");
  if (f_true.size() == 0) throw std::invalid_argument("crps_gaussian: empty input");
  double total = 0.0;
  for (Eigen::Index i = 0; i < f_true.size(); ++i) {
    if (!(sd(i) > 0.0)) throw std::invalid_argument("crps_gaussian: sd must be positive");
    const double z = (f_true(i) - mu(i)) / sd(i);
    total += sd(i) * (2.0 * std_normal_pdf(z) + z * (2.0 * std_normal_cdf(z) - 1.0) -
                      1.0 / std::sqrt(std::numbers::pi));
  }
  return total / static_cast<double>(f_true.size());
}

}  // namespace dgpcl
