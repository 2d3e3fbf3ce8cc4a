#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dgpcl/acquisition.hpp"
#include "dgpcl/checkpoint.hpp"
#include "dgpcl/dgp.hpp"
#include "dgpcl/gp.hpp"
#include "dgpcl/lhs.hpp"
#include "dgpcl/metrics.hpp"
#include "dgpcl/posterior.hpp"
#include "dgpcl/rng.hpp"
#include "dgpcl/testfns.hpp"
#include "dgpcl/tricands.hpp"

namespace dgpcl {

enum class SurrogateKind { dgp_ess, gp_mcmc };
enum class AcquisitionKind { pareto, entropy_only, random_candidate };
enum class EntropyKind { posthoc, mcmc };

inline std::string to_string(SurrogateKind k) {
  return k == SurrogateKind::dgp_ess ? "dgp-ess" : "gp-mcmc";
}

inline std::string to_string(AcquisitionKind k) {
  switch (k) {
    case AcquisitionKind::pareto: return "pareto";
    case AcquisitionKind::entropy_only: return "entropy-only";
    default: return "random-candidate";
  }
}

inline std::string to_string(EntropyKind k) {
  return k == EntropyKind::posthoc ? "posthoc" : "mcmc";
}

inline SurrogateKind parse_surrogate(const std::string& s) {
  if (s == "dgp-ess") return SurrogateKind::dgp_ess;
  if (s == "gp-mcmc") return SurrogateKind::gp_mcmc;
  throw std::invalid_argument("unknown surrogate '" + s + "' (expected dgp-ess or gp-mcmc)");
}

inline AcquisitionKind parse_acquisition(const std::string& s) {
  if (s == "pareto") return AcquisitionKind::pareto;
  if (s == "entropy-only") return AcquisitionKind::entropy_only;
  if (s == "random-candidate") return AcquisitionKind::random_candidate;
  throw std::invalid_argument("unknown acquisition '" + s +
                              "' (expected pareto, entropy-only, or random-candidate)");
}

inline EntropyKind parse_entropy(const std::string& s) {
  if (s == "posthoc") return EntropyKind::posthoc;
  if (s == "mcmc") return EntropyKind::mcmc;
  throw std::invalid_argument("unknown entropy mode '" + s + "' (expected posthoc or mcmc)");
}

struct McmcCounts {
  int n_iter_initial = 10000;
  int burn_initial = 8000;
  int n_iter_update = 1000;
  int thin = 4;
};

struct ExperimentConfig {
  std::string function;
  std::optional<double> threshold_g;
  std::optional<bool> threshold_fail_above;
  int n0 = 0;
  int budget = 0;
  SurrogateKind surrogate = SurrogateKind::dgp_ess;
  AcquisitionKind acquisition = AcquisitionKind::pareto;
  EntropyKind entropy = EntropyKind::posthoc;
  double alpha = 0.9;
  int n_max = 0;  // 0 -> 100*d
  McmcCounts mcmc;
  int n_test = 0;  // 0 -> round(4500*d/7), capped at 5000
  int reps = 1;
  std::uint64_t seed = 0;
  bool emit_timings = true;

  int resolved_n_max(int d) const { return n_max > 0 ? n_max : 100 * d; }

  int resolved_n_test(int d) const {
    if (n_test > 0) return n_test;
    const int by_dim = static_cast<int>(std::llround(4500.0 * d / 7.0));
    return std::min(5000, by_dim);
  }

  Threshold resolved_threshold(const TestFunction& fn) const {
    Threshold thr = fn.threshold;
    if (threshold_g) thr.g = *threshold_g;
    if (threshold_fail_above) thr.fail_above = *threshold_fail_above;
    return thr;
  }

  void validate(const TestFunction& fn) const {
    if (n0 < fn.d + 1)
      throw std::invalid_argument("config: n0 must be at least d+1 = " +
                                  std::to_string(fn.d + 1) + " (triangulation needs a simplex)");
    if (budget < n0) throw std::invalid_argument("config: budget must be at least n0");
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::invalid_argument("config: alpha must lie in [0,1]");
    if (reps < 1) throw std::invalid_argument("config: reps must be positive");
    if (n_max < 0) throw std::invalid_argument("config: n_max must be positive");
    if (n_test < 0) throw std::invalid_argument("config: n_test must be positive");
    if (mcmc.n_iter_initial < 1 || mcmc.n_iter_update < 1 || mcmc.thin < 1 ||
        mcmc.burn_initial < 0)
      throw std::invalid_argument("config: mcmc counts must be positive (burn nonnegative)");
    if (mcmc.burn_initial >= mcmc.n_iter_initial)
      throw std::invalid_argument("config: mcmc burn must be below the initial iteration count");
  }

  // Stable digest of everything that shapes a repetition's trajectory; used
  // to refuse resuming from a checkpoint written under a different setup.
  std::string fingerprint(const TestFunction& fn) const {
    std::ostringstream os;
    const Threshold thr = resolved_threshold(fn);
    os << function << '|' << fn.d << '|' << thr.g << '|' << thr.fail_above << '|' << n0 << '|'
       << budget << '|' << to_string(surrogate) << '|' << to_string(acquisition) << '|'
       << to_string(entropy) << '|' << alpha << '|' << resolved_n_max(fn.d) << '|'
       << mcmc.n_iter_initial << '|' << mcmc.burn_initial << '|' << mcmc.n_iter_update << '|'
       << mcmc.thin << '|' << resolved_n_test(fn.d) << '|' << seed;
    const std::string s = os.str();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
  }
};

struct RunRecord {
  int iter = 0;
  int n = 0;
  bool has_acquisition = false;
  Eigen::RowVectorXd acquired;
  CandidateOrigin acq_origin = CandidateOrigin::internal;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  double rmse = 0.0;
  double crps = 0.0;
  double fit_time_s = 0.0;
  double acq_time_s = 0.0;
};

struct AcquisitionTrace {
  int iter;
  int n;
  const CandidateSet* candidates;
  const CandidateScores* scores;
  const std::vector<int>* front;  // null unless pareto selection ran
  int chosen;
};

using Observer = std::function<void(const AcquisitionTrace&)>;

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Test sets come from a salted stream so every method sharing (seed, rep)
// scores against the same points regardless of how the main stream advances.
inline RngEngine test_stream(std::uint64_t seed, std::uint64_t rep) {
  return RngEngine(mix64(stream_seed(seed, rep) ^ 0x7e57da7aULL));
}

struct SurrogateState {
  SurrogateKind kind;
  std::optional<DgpFit> dgp;
  std::optional<GpMcmcSurrogate> gp;

  const GpData& data() const { return kind == SurrogateKind::dgp_ess ? dgp->data : gp->data(); }

  MomentSamples moments(const Eigen::MatrixXd& xstar) const {
    return kind == SurrogateKind::dgp_ess ? predict_moments(*dgp, xstar)
                                          : gp->predict_moments(xstar);
  }
};

inline SurrogateState fit_surrogate(const ExperimentConfig& cfg, GpData data, RngEngine& rng) {
  SurrogateState s;
  s.kind = cfg.surrogate;
  if (cfg.surrogate == SurrogateKind::dgp_ess) {
    s.dgp = fit_dgp(data, cfg.mcmc.n_iter_initial, cfg.mcmc.burn_initial, cfg.mcmc.thin, rng);
  } else {
    GpMcmcOptions opt;
    opt.schedule = {cfg.mcmc.n_iter_initial, cfg.mcmc.burn_initial, cfg.mcmc.n_iter_update,
                    cfg.mcmc.thin};
    s.gp.emplace(std::move(data), opt, rng);
  }
  return s;
}

inline void augment_surrogate(const ExperimentConfig& cfg, SurrogateState& s,
                              const Eigen::RowVectorXd& xnew, double ynew, RngEngine& rng) {
  if (s.kind == SurrogateKind::dgp_ess) {
    update_dgp(*s.dgp, xnew, ynew, cfg.mcmc.n_iter_update, rng);
  } else {
    s.gp->augment(xnew, ynew, rng);
  }
}

inline bool duplicates_design_row(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& row) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if ((x.row(i) - row).cwiseAbs().maxCoeff() <= 1e-12) return true;
  }
  return false;
}

// Selection honoring the acquisition strategy; duplicates of existing design
// rows are redrawn, with a highest-sd fallback if a whole pool collapses.
inline int select_candidate(AcquisitionKind kind, const CandidateScores& scores,
                            const CandidateSet& cands, const Eigen::MatrixXd& x, RngEngine& rng,
                            std::vector<int>* front_out) {
  const auto non_duplicate = [&](int idx) {
    return !duplicates_design_row(x, cands.x.row(idx));
  };

  if (kind == AcquisitionKind::entropy_only) {
    std::vector<int> order(static_cast<std::size_t>(scores.entropy.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (scores.entropy(a) != scores.entropy(b)) return scores.entropy(a) > scores.entropy(b);
      return a < b;
    });
    for (int idx : order) {
      if (non_duplicate(idx)) return idx;
    }
    throw std::runtime_error("acquisition: every candidate duplicates a design row");
  }

  std::vector<int> pool;
  if (kind == AcquisitionKind::pareto) {
    pool = pareto_front(scores);
    if (front_out) *front_out = pool;
  } else {
    pool.resize(static_cast<std::size_t>(scores.entropy.size()));
    std::iota(pool.begin(), pool.end(), 0);
  }
  while (!pool.empty()) {
    const std::size_t at = runif_index(rng, pool.size());
    const int idx = pool[at];
    if (non_duplicate(idx)) return idx;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
  }

  int best = -1;
  for (Eigen::Index i = 0; i < cands.size(); ++i) {
    if (!non_duplicate(static_cast<int>(i))) continue;
    if (best < 0 || scores.sd(i) > scores.sd(best)) best = static_cast<int>(i);
  }
  if (best < 0) throw std::runtime_error("acquisition: every candidate duplicates a design row");
  return best;
}

struct TestSet {
  Eigen::MatrixXd x;
  Eigen::VectorXd f;
};

inline TestSet make_test_set(const ExperimentConfig& cfg, const TestFunction& fn,
                             std::uint64_t rep) {
  RngEngine rng = test_stream(cfg.seed, rep);
  TestSet ts;
  ts.x = lhs(cfg.resolved_n_test(fn.d), fn.d, rng);
  ts.f.resize(ts.x.rows());
  for (Eigen::Index i = 0; i < ts.x.rows(); ++i) ts.f(i) = fn.eval(ts.x.row(i).transpose());
  return ts;
}

inline void fill_metrics(RunRecord& rec, const SurrogateState& s, const TestSet& ts,
                         const Threshold& thr) {
  const AggregatedPosterior post = aggregate(s.moments(ts.x));
  const Confusion c = classify(ts.f, post.mu, thr);
  rec.sensitivity = sensitivity(c);
  rec.specificity = specificity(c);
  rec.f1 = f1_score(c);
  rec.rmse = rmse(ts.f, post.mu);
  const Eigen::VectorXd sd = post.var.array().max(0.0).sqrt().max(1e-12).matrix();
  rec.crps = crps_gaussian(ts.f, post.mu, sd);
}

inline void save_record(std::ostream& os, const RunRecord& r) {
  bin::write_i64(os, r.iter);
  bin::write_i64(os, r.n);
  bin::write_u64(os, r.has_acquisition ? 1 : 0);
  bin::write_matrix(os, r.acquired);
  bin::write_u64(os, r.acq_origin == CandidateOrigin::internal ? 0 : 1);
  bin::write_double(os, r.sensitivity);
  bin::write_double(os, r.specificity);
  bin::write_double(os, r.f1);
  bin::write_double(os, r.rmse);
  bin::write_double(os, r.crps);
  bin::write_double(os, r.fit_time_s);
  bin::write_double(os, r.acq_time_s);
}

inline RunRecord load_record(std::istream& is) {
  RunRecord r;
  r.iter = static_cast<int>(bin::read_i64(is));
  r.n = static_cast<int>(bin::read_i64(is));
  r.has_acquisition = bin::read_u64(is) != 0;
  const Eigen::MatrixXd acq = bin::read_matrix(is);
  if (acq.rows() > 0) r.acquired = acq.row(0);
  r.acq_origin = bin::read_u64(is) == 0 ? CandidateOrigin::internal : CandidateOrigin::fringe;
  r.sensitivity = bin::read_double(is);
  r.specificity = bin::read_double(is);
  r.f1 = bin::read_double(is);
  r.rmse = bin::read_double(is);
  r.crps = bin::read_double(is);
  r.fit_time_s = bin::read_double(is);
  r.acq_time_s = bin::read_double(is);
  return r;
}

struct LoopSnapshot {
  int next_iter = 0;
  double pending_fit_time = 0.0;
  RngEngine rng;
  SurrogateState surrogate;
  std::vector<RunRecord> records;
};

inline std::string checkpoint_path(const std::string& dir, std::uint64_t rep) {
  return (std::filesystem::path(dir) / ("rep" + std::to_string(rep) + ".ckpt")).string();
}

inline void save_snapshot(const std::string& dir, std::uint64_t rep, const std::string& fpr,
                          const LoopSnapshot& snap) {
  std::filesystem::create_directories(dir);
  const std::string path = checkpoint_path(dir, rep);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + tmp + " for writing");
    bin::write_string(os, "LOOPCKPT");
    bin::write_u64(os, 1);
    bin::write_string(os, fpr);
    bin::write_u64(os, rep);
    bin::write_i64(os, snap.next_iter);
    bin::write_double(os, snap.pending_fit_time);
    bin::write_string(os, rng_to_string(snap.rng));
    bin::write_u64(os, snap.surrogate.kind == SurrogateKind::dgp_ess ? 0 : 1);
    if (snap.surrogate.kind == SurrogateKind::dgp_ess) {
      save_dgp_fit(os, *snap.surrogate.dgp);
    } else {
      save_gp_surrogate(os, *snap.surrogate.gp);
    }
    bin::write_u64(os, snap.records.size());
    for (const RunRecord& r : snap.records) save_record(os, r);
    if (!os) throw std::runtime_error("checkpoint: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline std::optional<LoopSnapshot> load_snapshot(const std::string& dir, std::uint64_t rep,
                                                 const std::string& fpr,
                                                 const ExperimentConfig& cfg) {
  const std::string path = checkpoint_path(dir, rep);
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  bin::expect_magic(is, "LOOPCKPT", 1);
  const std::string stored_fpr = bin::read_string(is);
  if (stored_fpr != fpr)
    throw std::runtime_error("checkpoint: " + path +
                             " was written under a different configuration");
  const std::uint64_t stored_rep = bin::read_u64(is);
  if (stored_rep != rep) throw std::runtime_error("checkpoint: repetition index mismatch");
  LoopSnapshot snap;
  snap.next_iter = static_cast<int>(bin::read_i64(is));
  snap.pending_fit_time = bin::read_double(is);
  snap.rng = rng_from_string(bin::read_string(is));
  const std::uint64_t kind = bin::read_u64(is);
  if (kind == 0) {
    snap.surrogate.kind = SurrogateKind::dgp_ess;
    snap.surrogate.dgp = load_dgp_fit(is);
  } else {
    snap.surrogate.kind = SurrogateKind::gp_mcmc;
    GpMcmcOptions opt;
    opt.schedule = {cfg.mcmc.n_iter_initial, cfg.mcmc.burn_initial, cfg.mcmc.n_iter_update,
                    cfg.mcmc.thin};
    snap.surrogate.gp = load_gp_surrogate(is, opt);
  }
  const std::uint64_t n_rec = bin::read_u64(is);
  snap.records.clear();
  for (std::uint64_t i = 0; i < n_rec; ++i) snap.records.push_back(load_record(is));
  return snap;
}

}  // namespace detail

// Sequential contour-location loop: LHS initialization, then acquire one
// point per iteration from triangulation candidates scored by (entropy, sd)
// until the budget is spent. Appends B - n0 + 1 records to `records` as it
// goes, so partial progress survives a thrown failure.
inline void run_sequential(const ExperimentConfig& cfg, const TestFunction& fn,
                           std::uint64_t rep, std::vector<RunRecord>& records,
                           const Observer* observer = nullptr,
                           const std::string& checkpoint_dir = "") {
  cfg.validate(fn);
  const Threshold thr = cfg.resolved_threshold(fn);
  const detail::TestSet ts = detail::make_test_set(cfg, fn, rep);
  const std::string fpr = cfg.fingerprint(fn);

  detail::LoopSnapshot snap;
  bool resumed = false;
  if (!checkpoint_dir.empty()) {
    if (auto loaded = detail::load_snapshot(checkpoint_dir, rep, fpr, cfg)) {
      snap = std::move(*loaded);
      resumed = true;
    }
  }

  if (!resumed) {
    snap.rng = make_stream(cfg.seed, rep);
    GpData data;
    data.x = lhs(cfg.n0, fn.d, snap.rng);
    data.y.resize(cfg.n0);
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) data.y(i) = fn.eval(data.x.row(i).transpose());
    const auto t0 = std::chrono::steady_clock::now();
    snap.surrogate = detail::fit_surrogate(cfg, std::move(data), snap.rng);
    snap.pending_fit_time = detail::seconds_since(t0);
    snap.next_iter = 0;
  }
  records = snap.records;

  for (int iter = snap.next_iter;; ++iter) {
    const int n = cfg.n0 + iter;
    RunRecord rec;
    rec.iter = iter;
    rec.n = n;
    rec.fit_time_s = cfg.emit_timings ? snap.pending_fit_time : 0.0;
    detail::fill_metrics(rec, snap.surrogate, ts, thr);

    if (n >= cfg.budget) {
      records.push_back(rec);
      break;
    }

    const GpData& data = snap.surrogate.data();
    const auto t_acq = std::chrono::steady_clock::now();
    const Triangulation tri = delaunay(data.x);
    CandidateSet cands = concat(internal_candidates(tri, data.x),
                                fringe_candidates(tri, data.x, cfg.alpha));
    cands = targeted_subsample(cands, tri, data.y, thr, cfg.resolved_n_max(fn.d), snap.rng);
    const MomentSamples cand_moments = snap.surrogate.moments(cands.x);
    const CandidateScores scores = cfg.entropy == EntropyKind::posthoc
                                       ? score_posthoc(aggregate(cand_moments), thr)
                                       : score_mcmc(cand_moments, thr);
    std::vector<int> front;
    const int chosen = detail::select_candidate(cfg.acquisition, scores, cands, data.x,
                                                snap.rng, &front);
    rec.acq_time_s = cfg.emit_timings ? detail::seconds_since(t_acq) : 0.0;
    rec.has_acquisition = true;
    rec.acquired = cands.x.row(chosen);
    rec.acq_origin = cands.origin[static_cast<std::size_t>(chosen)];
    records.push_back(rec);

    if (observer) {
      AcquisitionTrace trace{iter, n, &cands, &scores,
                             cfg.acquisition == AcquisitionKind::pareto ? &front : nullptr,
                             chosen};
      (*observer)(trace);
    }

    const double ynew = fn.eval(rec.acquired.transpose());
    const auto t_fit = std::chrono::steady_clock::now();
    detail::augment_surrogate(cfg, snap.surrogate, rec.acquired, ynew, snap.rng);
    snap.pending_fit_time = detail::seconds_since(t_fit);

    if (!checkpoint_dir.empty()) {
      snap.next_iter = iter + 1;
      snap.records = records;
      detail::save_snapshot(checkpoint_dir, rep, fpr, snap);
    }
  }
}

// Static comparator: one LHS of size budget, one fit, one record.
inline RunRecord run_static(const ExperimentConfig& cfg, const TestFunction& fn,
                            std::uint64_t rep) {
  cfg.validate(fn);
  const Threshold thr = cfg.resolved_threshold(fn);
  const detail::TestSet ts = detail::make_test_set(cfg, fn, rep);
  RngEngine rng = make_stream(cfg.seed, rep);
  GpData data;
  data.x = lhs(cfg.budget, fn.d, rng);
  data.y.resize(data.x.rows());
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) data.y(i) = fn.eval(data.x.row(i).transpose());
  const auto t0 = std::chrono::steady_clock::now();
  const detail::SurrogateState s = detail::fit_surrogate(cfg, std::move(data), rng);
  RunRecord rec;
  rec.iter = 0;
  rec.n = cfg.budget;
  rec.fit_time_s = cfg.emit_timings ? detail::seconds_since(t0) : 0.0;
  detail::fill_metrics(rec, s, ts, thr);
  return rec;
}

struct RepResult {
  std::uint64_t rep = 0;
  std::vector<RunRecord> records;
  bool failed = false;
  std::string error;
};

// Repetitions fan out over a bounded worker pool; each rep's stream depends
// only on (seed, rep), so results are identical for any pool width.
inline std::vector<RepResult> run_repetitions(const ExperimentConfig& cfg,
                                              const TestFunction& fn, bool sequential,
                                              int workers,
                                              const std::string& checkpoint_dir = "") {
  const int reps = cfg.reps;
  std::vector<RepResult> results(static_cast<std::size_t>(reps));
  const int width = std::max(1, std::min(workers, reps));
  if (width > 1) {
    static std::once_flag eigen_once;
    std::call_once(eigen_once, [] { Eigen::initParallel(); });
  }
  std::atomic<int> next{0};
  auto body = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= reps) return;
      RepResult& slot = results[static_cast<std::size_t>(k)];
      slot.rep = static_cast<std::uint64_t>(k);
      try {
        if (sequential) {
          run_sequential(cfg, fn, slot.rep, slot.records, nullptr, checkpoint_dir);
        } else {
          slot.records.push_back(run_static(cfg, fn, slot.rep));
        }
      } catch (const std::exception& e) {
        slot.failed = true;
        slot.error = e.what();
      }
    }
  };
  if (width == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(width));
    for (int w = 0; w < width; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  return results;
}

}  // namespace dgpcl
