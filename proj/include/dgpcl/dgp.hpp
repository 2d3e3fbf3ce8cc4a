#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dgpcl/chol.hpp"
#include "dgpcl/ess.hpp"
#include "dgpcl/gp.hpp"
#include "dgpcl/kernel.hpp"
#include "dgpcl/mcmc.hpp"
#include "dgpcl/posterior.hpp"
#include "dgpcl/rng.hpp"

namespace dgpcl {

// One retained posterior state: latent layer plus both layers' kernels.
// Latent nodes are modeled at unit scale (tau2 = 1); the outer kernel
// carries the profiled amplitude.
struct DgpSample {
  Eigen::MatrixXd w;
  std::vector<KernelHyper> inner_hyp;
  KernelHyper outer_hyp;
};

struct DgpOptions {
  double eta = 1e-6;
  double theta_init = 0.5;
  GammaPrior prior;
  MhOptions mh;
};

// Sampler state for the two-layer model: current design, the Gibbs walker
// (latent matrix, per-node inner lengthscales, outer lengthscales), and the
// retained chain. p = d latent nodes.
struct DgpFit {
  GpData data;
  int p = 0;
  DgpOptions opt;
  int thin = 1;

  Eigen::MatrixXd w;
  std::vector<Eigen::VectorXd> inner_theta;
  Eigen::VectorXd outer_theta;
  std::vector<MhAdaptState> inner_adapt;
  MhAdaptState outer_adapt;

  std::vector<DgpSample> chain;
};

namespace detail {

inline double inner_log_density(const Eigen::MatrixXd& x, const Eigen::VectorXd& w_col,
                                const Eigen::VectorXd& theta, double eta) {
  const CorrChol c = corr_chol(x, theta, eta);
  const Eigen::VectorXd alpha = chol_solve(c.l, w_col);
  return -0.5 * w_col.dot(alpha) - 0.5 * chol_logdet(c.l);
}

// One Gibbs sweep: ESS per latent node against the outer likelihood, then
// Metropolis on each node's inner lengthscales, then on the outer
// lengthscales. cur_outer_ll tracks the profile likelihood of (w, y).
inline void dgp_sweep(DgpFit& fit, double& cur_outer_ll, bool adapting, RngEngine& rng) {
  const Eigen::MatrixXd& x = fit.data.x;
  const Eigen::VectorXd& y = fit.data.y;
  const double eta = fit.opt.eta;

  for (int i = 0; i < fit.p; ++i) {
    const CorrChol prior_c = corr_chol(x, fit.inner_theta[static_cast<std::size_t>(i)], eta);
    const Eigen::VectorXd w_cur = fit.w.col(i);
    auto loglik = [&](const Eigen::VectorXd& w_col) {
      fit.w.col(i) = w_col;
      return profile_log_marginal(fit.w, y, fit.outer_theta, eta).value;
    };
    double ll = cur_outer_ll;
    const Eigen::VectorXd w_new = ess_step(w_cur, prior_c.l, loglik, rng, &ll);
    fit.w.col(i) = w_new;
    cur_outer_ll = ll;
  }

  for (int i = 0; i < fit.p; ++i) {
    const auto is = static_cast<std::size_t>(i);
    double inner_ll = inner_log_density(x, fit.w.col(i), fit.inner_theta[is], eta);
    mh_sweep(
        fit.inner_theta[is], inner_ll,
        [&](const Eigen::VectorXd& th) { return inner_log_density(x, fit.w.col(i), th, eta); },
        fit.opt.prior, fit.inner_adapt[is], fit.opt.mh, adapting, rng);
  }

  mh_sweep(
      fit.outer_theta, cur_outer_ll,
      [&](const Eigen::VectorXd& th) { return profile_log_marginal(fit.w, y, th, eta).value; },
      fit.opt.prior, fit.outer_adapt, fit.opt.mh, adapting, rng);
}

inline void run_dgp_chain(DgpFit& fit, int n_iter, int burn, int thin, RngEngine& rng) {
  check_retention(n_iter, burn, thin);
  fit.thin = thin;
  fit.chain.clear();
  fit.chain.reserve(static_cast<std::size_t>((n_iter - burn) / thin));
  double cur_outer_ll =
      profile_log_marginal(fit.w, fit.data.y, fit.outer_theta, fit.opt.eta).value;
  for (int iter = 1; iter <= n_iter; ++iter) {
    dgp_sweep(fit, cur_outer_ll, iter <= burn, rng);
    if (iter > burn && (iter - burn) % thin == 0) {
      DgpSample s;
      s.w = fit.w;
      s.inner_hyp.reserve(static_cast<std::size_t>(fit.p));
      for (int i = 0; i < fit.p; ++i) {
        s.inner_hyp.push_back({fit.inner_theta[static_cast<std::size_t>(i)], 1.0, fit.opt.eta});
      }
      const double tau2 =
          profile_log_marginal(fit.w, fit.data.y, fit.outer_theta, fit.opt.eta).tau2_hat;
      s.outer_hyp = {fit.outer_theta, tau2, fit.opt.eta};
      fit.chain.push_back(std::move(s));
    }
  }
}

}  // namespace detail

// Initial fit: latent nodes start at the identity map W = X and lengthscales
// at their default, then the Gibbs chain burns in with step adaptation.
inline DgpFit fit_dgp(const GpData& data, int n_iter, int burn, int thin, RngEngine& rng,
                      const DgpOptions& opt = {}) {
  data.validate();
  if (data.n() < 2) throw std::invalid_argument("fit_dgp: need at least 2 points");
  DgpFit fit;
  fit.data = data;
  fit.p = static_cast<int>(data.d());
  fit.opt = opt;
  fit.w = data.x;
  fit.inner_theta.assign(static_cast<std::size_t>(fit.p),
                         Eigen::VectorXd::Constant(data.d(), opt.theta_init));
  fit.outer_theta = Eigen::VectorXd::Constant(fit.p, opt.theta_init);
  fit.inner_adapt.assign(static_cast<std::size_t>(fit.p),
                         MhAdaptState(static_cast<int>(data.d()), opt.mh.initial_step));
  fit.outer_adapt = MhAdaptState(fit.p, opt.mh.initial_step);
  detail::run_dgp_chain(fit, n_iter, burn, thin, rng);
  return fit;
}

// Append one observation and continue the chain from the current walker
// state, seeding the new latent row with each node's predictive mean at
// xnew. The fresh thinned batch replaces the retained chain (older samples
// have the wrong latent row count).
inline void update_dgp(DgpFit& fit, const Eigen::RowVectorXd& xnew, double ynew, int n_update,
                       RngEngine& rng) {
  const Eigen::Index n = fit.data.n();
  Eigen::RowVectorXd wnew(fit.p);
  for (int i = 0; i < fit.p; ++i) {
    const CorrChol c = corr_chol(fit.data.x, fit.inner_theta[static_cast<std::size_t>(i)],
                                 fit.opt.eta);
    Eigen::VectorXd kstar(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      kstar(j) = matern52(scaled_sq_dist(xnew.transpose(), fit.data.x.row(j).transpose(),
                                         fit.inner_theta[static_cast<std::size_t>(i)]));
    }
    wnew(i) = kstar.dot(chol_solve(c.l, Eigen::VectorXd(fit.w.col(i))));
  }
  fit.data.append(xnew, ynew);
  fit.data.validate();
  fit.w.conservativeResize(n + 1, Eigen::NoChange);
  fit.w.row(n) = wnew;
  detail::run_dgp_chain(fit, n_update, 0, fit.thin, rng);
}

// Mean map through a retained sample's inner layer: column i of the result
// is the conditional mean of node i at xnew. No noise is sampled.
inline Eigen::MatrixXd warp(const DgpFit& fit, std::size_t t, const Eigen::MatrixXd& xnew) {
  if (t >= fit.chain.size()) throw std::out_of_range("warp: sample index out of range");
  const DgpSample& s = fit.chain[t];
  Eigen::MatrixXd wnew(xnew.rows(), fit.p);
  for (int i = 0; i < fit.p; ++i) {
    const KernelHyper& hyp = s.inner_hyp[static_cast<std::size_t>(i)];
    const CorrChol c = corr_chol(fit.data.x, hyp.theta, hyp.eta);
    const Eigen::MatrixXd kcross = cross_kernel_matrix(xnew, fit.data.x, {hyp.theta, 1.0, hyp.eta});
    wnew.col(i) = kcross * chol_solve(c.l, Eigen::VectorXd(s.w.col(i)));
  }
  return wnew;
}

// Per-sample predictive moments: warp xnew through sample t's inner layer,
// then condition the outer layer on (W^(t), y) in latent space.
inline MomentSamples predict_moments(const DgpFit& fit, const Eigen::MatrixXd& xnew) {
  const std::size_t t_count = fit.chain.size();
  if (t_count == 0) throw std::runtime_error("predict_moments: empty chain");
  MomentSamples out;
  out.mu.resize(static_cast<Eigen::Index>(t_count), xnew.rows());
  out.var.resize(static_cast<Eigen::Index>(t_count), xnew.rows());
  for (std::size_t t = 0; t < t_count; ++t) {
    const DgpSample& s = fit.chain[t];
    const Eigen::MatrixXd wnew = warp(fit, t, xnew);
    GpData latent;
    latent.x = s.w;
    latent.y = fit.data.y;
    const GpPosterior post = gp_predict(latent, s.outer_hyp, wnew);
    out.mu.row(static_cast<Eigen::Index>(t)) = post.mu.transpose();
    out.var.row(static_cast<Eigen::Index>(t)) = post.var.transpose();
  }
  return out;
}

}  // namespace dgpcl
