#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dgpcl/chol.hpp"
#include "dgpcl/kernel.hpp"
#include "dgpcl/mcmc.hpp"
#include "dgpcl/posterior.hpp"
#include "dgpcl/rng.hpp"

namespace dgpcl {

struct GpData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  // Duplicate rows break interpolation with a tiny nugget, so they are
  // rejected outright instead of jittered.
  void validate() const {
    if (x.rows() == 0) throw std::invalid_argument("GpData: empty design");
    if (x.rows() != y.size()) throw std::invalid_argument("GpData: x rows and y length differ");
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
        if ((x.row(i) - x.row(j)).cwiseAbs().maxCoeff() <= 1e-12)
          throw std::invalid_argument("GpData: duplicate design rows " + std::to_string(i) +
                                      " and " + std::to_string(j));
      }
    }
  }

  void append(const Eigen::RowVectorXd& xnew, double ynew) {
    x.conservativeResize(x.rows() + 1, x.cols() == 0 ? xnew.size() : x.cols());
    x.row(x.rows() - 1) = xnew;
    y.conservativeResize(y.size() + 1);
    y(y.size() - 1) = ynew;
  }

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }
};

// Zero-mean Gaussian log density of y under tau2 * (K_theta + eta*I).
inline double log_marginal_likelihood(const GpData& data, const KernelHyper& hyp) {
  const Eigen::Index n = data.n();
  if (n == 0) throw std::invalid_argument("log_marginal_likelihood: empty design");
  const CorrChol c = corr_chol(data.x, hyp.theta, hyp.eta);
  const Eigen::VectorXd alpha = chol_solve(c.l, data.y);
  const double quad = data.y.dot(alpha) / hyp.tau2;
  const double logdet = chol_logdet(c.l) + static_cast<double>(n) * std::log(hyp.tau2);
  return -0.5 * quad - 0.5 * logdet -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

// Amplitude profiled out under a scale-invariant prior: chains sample only
// theta, and tau2_hat = y^T C^-1 y / n plugs back in wherever a scale is
// needed. Additive constants are dropped.
struct ProfileLik {
  double value;
  double tau2_hat;
};

inline ProfileLik profile_log_marginal(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& theta, double eta) {
  const Eigen::Index n = x.rows();
  const CorrChol c = corr_chol(x, theta, eta);
  const Eigen::VectorXd alpha = chol_solve(c.l, y);
  const double s2 = y.dot(alpha) / static_cast<double>(n);
  if (!(s2 > 0.0)) throw std::runtime_error("profile_log_marginal: y^T C^-1 y must be positive");
  const double value = -0.5 * chol_logdet(c.l) - 0.5 * static_cast<double>(n) * std::log(s2);
  return {value, s2};
}

struct GpPosterior {
  Eigen::VectorXd mu;
  Eigen::VectorXd var;
};

// Conditional moments at xstar given exact observations. The nugget rides on
// every self-covariance diagonal (training and prediction blocks) but never
// on the cross block.
inline GpPosterior gp_predict(const GpData& data, const KernelHyper& hyp,
                              const Eigen::MatrixXd& xstar) {
  hyp.validate();
  if (xstar.cols() != data.d()) throw std::invalid_argument("gp_predict: dimension mismatch");
  const CorrChol c = corr_chol(data.x, hyp.theta, hyp.eta);
  const Eigen::VectorXd alpha = chol_solve(c.l, data.y);
  GpPosterior post;
  post.mu.resize(xstar.rows());
  post.var.resize(xstar.rows());
  Eigen::VectorXd kstar(data.n());
  for (Eigen::Index i = 0; i < xstar.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.n(); ++j) {
      kstar(j) = matern52(scaled_sq_dist(xstar.row(i), data.x.row(j), hyp.theta));
    }
    post.mu(i) = kstar.dot(alpha);
    const Eigen::VectorXd v = c.l.triangularView<Eigen::Lower>().solve(kstar);
    post.var(i) = std::max(0.0, hyp.tau2 * (1.0 + c.eta_used - v.squaredNorm()));
  }
  return post;
}

// Full predictive covariance, for sampling latent layers jointly.
inline Eigen::MatrixXd gp_predict_cov(const GpData& data, const KernelHyper& hyp,
                                      const Eigen::MatrixXd& xstar, Eigen::VectorXd* mu_out) {
  hyp.validate();
  const CorrChol c = corr_chol(data.x, hyp.theta, hyp.eta);
  const Eigen::MatrixXd kcross = cross_kernel_matrix(xstar, data.x, {hyp.theta, 1.0, hyp.eta});
  if (mu_out) *mu_out = kcross * chol_solve(c.l, data.y);
  const Eigen::MatrixXd kself = corr_matrix(xstar, hyp.theta, c.eta_used);
  const Eigen::MatrixXd v = c.l.triangularView<Eigen::Lower>().solve(kcross.transpose());
  Eigen::MatrixXd cov = hyp.tau2 * (kself - v.transpose() * v);
  cov = 0.5 * (cov + cov.transpose()).eval();
  return cov;
}

struct HyperChain {
  std::vector<KernelHyper> samples;
  Eigen::VectorXd accept_rate;

  std::size_t size() const { return samples.size(); }
};

inline void check_retention(int n_iter, int burn, int thin) {
  if (n_iter <= 0) throw std::invalid_argument("mcmc: n_iter must be positive");
  if (burn < 0) throw std::invalid_argument("mcmc: burn must be nonnegative");
  if (thin < 1) throw std::invalid_argument("mcmc: thin must be at least 1");
  if (burn >= n_iter || (n_iter - burn) / thin == 0)
    throw std::invalid_argument("mcmc: empty chain, retention keeps no samples (n_iter " +
                                std::to_string(n_iter) + ", burn " + std::to_string(burn) +
                                ", thin " + std::to_string(thin) + ")");
}

namespace detail {

// Shared chain driver over lengthscales with the profile likelihood.
// Retains states with iter > burn and (iter - burn) % thin == 0; adaptation
// runs only while iter <= burn (so never when burn = 0).
inline HyperChain run_theta_chain(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  Eigen::VectorXd& theta, MhAdaptState& adapt, int n_iter,
                                  int burn, int thin, double eta, const GammaPrior& prior,
                                  const MhOptions& opt, RngEngine& rng) {
  check_retention(n_iter, burn, thin);
  HyperChain chain;
  chain.samples.reserve(static_cast<std::size_t>((n_iter - burn) / thin));
  double cur_ll = profile_log_marginal(x, y, theta, eta).value;
  for (int iter = 1; iter <= n_iter; ++iter) {
    mh_sweep(
        theta, cur_ll,
        [&](const Eigen::VectorXd& th) { return profile_log_marginal(x, y, th, eta).value; },
        prior, adapt, opt, iter <= burn, rng);
    if (iter > burn && (iter - burn) % thin == 0) {
      chain.samples.push_back({theta, profile_log_marginal(x, y, theta, eta).tau2_hat, eta});
    }
  }
  chain.accept_rate = adapt.accept_rate();
  return chain;
}

}  // namespace detail

// Metropolis-within-Gibbs over theta; every state is stored, callers apply
// their own burn/thin. No burn-in phase here, so steps never adapt.
inline HyperChain sample_hypers(const GpData& data, const KernelHyper& init, int n_iter,
                                RngEngine& rng, const GammaPrior& prior = {},
                                const MhOptions& opt = {}) {
  data.validate();
  init.validate();
  Eigen::VectorXd theta = init.theta;
  MhAdaptState adapt(static_cast<int>(theta.size()), opt.initial_step);
  return detail::run_theta_chain(data.x, data.y, theta, adapt, n_iter, 0, 1, init.eta, prior,
                                 opt, rng);
}

struct ChainSchedule {
  int n_iter_initial = 10000;
  int burn_initial = 8000;
  int n_iter_update = 1000;
  int thin = 4;
};

struct GpMcmcOptions {
  ChainSchedule schedule;
  double eta = 1e-6;
  double theta_init = 0.5;
  GammaPrior prior;
  MhOptions mh;
};

// Single-layer surrogate: design, lengthscale chain, and the walk position
// updates resume from. Each fit/update replaces the retained set.
class GpMcmcSurrogate {
 public:
  GpMcmcSurrogate(GpData data, const GpMcmcOptions& opt, RngEngine& rng)
      : data_(std::move(data)),
        opt_(opt),
        theta_(Eigen::VectorXd::Constant(data_.d(), opt.theta_init)),
        adapt_(static_cast<int>(data_.d()), opt.mh.initial_step) {
    data_.validate();
    if (data_.n() < 2) throw std::invalid_argument("GpMcmcSurrogate: need at least 2 points");
    chain_ = detail::run_theta_chain(data_.x, data_.y, theta_, adapt_, opt_.schedule.n_iter_initial,
                                     opt_.schedule.burn_initial, opt_.schedule.thin, opt_.eta,
                                     opt_.prior, opt_.mh, rng);
  }

  void augment(const Eigen::RowVectorXd& xnew, double ynew, RngEngine& rng) {
    data_.append(xnew, ynew);
    data_.validate();
    chain_ = detail::run_theta_chain(data_.x, data_.y, theta_, adapt_,
                                     opt_.schedule.n_iter_update, 0, opt_.schedule.thin,
                                     opt_.eta, opt_.prior, opt_.mh, rng);
  }

  MomentSamples predict_moments(const Eigen::MatrixXd& xstar) const {
    const Eigen::Index t = static_cast<Eigen::Index>(chain_.size());
    if (t == 0) throw std::runtime_error("GpMcmcSurrogate: empty chain");
    MomentSamples out;
    out.mu.resize(t, xstar.rows());
    out.var.resize(t, xstar.rows());
    for (Eigen::Index k = 0; k < t; ++k) {
      const GpPosterior post = gp_predict(data_, chain_.samples[static_cast<std::size_t>(k)],
                                          xstar);
      out.mu.row(k) = post.mu.transpose();
      out.var.row(k) = post.var.transpose();
    }
    return out;
  }

  const GpData& data() const { return data_; }
  const HyperChain& chain() const { return chain_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  const MhAdaptState& adapt_state() const { return adapt_; }
  const GpMcmcOptions& options() const { return opt_; }

  static GpMcmcSurrogate restored(const GpMcmcOptions& opt, GpData data, Eigen::VectorXd theta,
                                  MhAdaptState adapt, HyperChain chain) {
    GpMcmcSurrogate s;
    s.opt_ = opt;
    s.data_ = std::move(data);
    s.theta_ = std::move(theta);
    s.adapt_ = std::move(adapt);
    s.chain_ = std::move(chain);
    return s;
  }

 private:
  GpMcmcSurrogate() = default;

  GpData data_;
  GpMcmcOptions opt_;
  Eigen::VectorXd theta_;
  MhAdaptState adapt_;
  HyperChain chain_;
};

}  // namespace dgpcl
