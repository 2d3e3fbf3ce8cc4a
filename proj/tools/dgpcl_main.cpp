#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dgpcl/design.hpp"
#include "dgpcl/io.hpp"
#include "dgpcl/testfns.hpp"
#include "dgpcl/tricands.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw std::invalid_argument("config: unknown key '" + scope + it.key() + "'");
  }
}

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> required) {
  for (const char* k : required) {
    if (!j.contains(k))
      throw std::invalid_argument("config: missing required key '" + std::string(k) + "'");
  }
}

dgpcl::ExperimentConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  check_keys(j,
             {"function", "threshold", "n0", "budget", "surrogate", "acquisition", "entropy",
              "alpha", "n_max", "mcmc", "n_test", "reps", "seed", "emit_timings"},
             "");
  require_keys(j, {"function", "n0", "budget", "reps", "seed"});

  dgpcl::ExperimentConfig cfg;
  try {
    cfg.function = j.at("function").get<std::string>();
    cfg.n0 = j.at("n0").get<int>();
    cfg.budget = j.at("budget").get<int>();
    cfg.reps = j.at("reps").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("surrogate"))
      cfg.surrogate = dgpcl::parse_surrogate(j.at("surrogate").get<std::string>());
    if (j.contains("acquisition"))
      cfg.acquisition = dgpcl::parse_acquisition(j.at("acquisition").get<std::string>());
    if (j.contains("entropy"))
      cfg.entropy = dgpcl::parse_entropy(j.at("entropy").get<std::string>());
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("n_max")) cfg.n_max = j.at("n_max").get<int>();
    if (j.contains("n_test")) cfg.n_test = j.at("n_test").get<int>();
    if (j.contains("emit_timings")) cfg.emit_timings = j.at("emit_timings").get<bool>();
    if (j.contains("threshold")) {
      const nlohmann::json& t = j.at("threshold");
      if (!t.is_object()) throw std::invalid_argument("config: threshold must be an object");
      check_keys(t, {"g", "fail_above"}, "threshold.");
      if (t.contains("g")) cfg.threshold_g = t.at("g").get<double>();
      if (t.contains("fail_above")) cfg.threshold_fail_above = t.at("fail_above").get<bool>();
    }
    if (j.contains("mcmc")) {
      const nlohmann::json& m = j.at("mcmc");
      if (!m.is_object()) throw std::invalid_argument("config: mcmc must be an object");
      check_keys(m, {"n_iter_initial", "burn_initial", "n_iter_update", "thin"}, "mcmc.");
      if (m.contains("n_iter_initial"))
        cfg.mcmc.n_iter_initial = m.at("n_iter_initial").get<int>();
      if (m.contains("burn_initial")) cfg.mcmc.burn_initial = m.at("burn_initial").get<int>();
      if (m.contains("n_iter_update")) cfg.mcmc.n_iter_update = m.at("n_iter_update").get<int>();
      if (m.contains("thin")) cfg.mcmc.thin = m.at("thin").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  return cfg;
}

int resolve_workers(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw std::invalid_argument("--workers must be a positive integer");
    return *flag;
  }
  if (const char* env = std::getenv("DGPCL_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::invalid_argument("DGPCL_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  return 1;
}

int run_experiment(bool sequential, const std::string& config_path, const std::string& out_path,
                   std::optional<std::uint64_t> seed_override, const std::string& checkpoint_dir,
                   std::optional<int> workers_flag) {
  dgpcl::ExperimentConfig cfg;
  const dgpcl::TestFunction* fn = nullptr;
  int workers = 1;
  try {
    cfg = parse_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    fn = &dgpcl::find_test_function(cfg.function);
    cfg.validate(*fn);
    workers = resolve_workers(workers_flag);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const std::string method =
      dgpcl::to_string(cfg.surrogate) + "-" +
      (sequential ? dgpcl::to_string(cfg.acquisition) : std::string("static"));

  std::vector<dgpcl::RepResult> results;
  try {
    results = dgpcl::run_repetitions(cfg, *fn, sequential, workers, checkpoint_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::ofstream ofs;
  std::ostream* os = &std::cout;
  if (!out_path.empty()) {
    ofs.open(out_path, std::ios::trunc);
    if (!ofs) {
      std::cerr << "error: cannot open " << out_path << " for writing\n";
      return kExitRuntime;
    }
    os = &ofs;
  }
  *os << dgpcl::kCsvHeader << '\n';
  bool any_failed = false;
  for (const dgpcl::RepResult& r : results) {
    for (const dgpcl::RunRecord& rec : r.records) {
      *os << dgpcl::format_result_row(r.rep, rec, method, cfg.seed) << '\n';
    }
    if (r.failed) {
      any_failed = true;
      std::cerr << "error: repetition " << r.rep << " failed: " << r.error << '\n';
    }
  }
  os->flush();
  return any_failed ? kExitRuntime : kExitOk;
}

int run_tricands(const std::string& design_path, double alpha, int n_max, std::uint64_t seed,
                 const std::string& out_path, const std::string& simplices_path) {
  Eigen::MatrixXd x;
  try {
    std::ifstream is(design_path);
    if (!is) throw std::invalid_argument("cannot open " + design_path);
    x = dgpcl::read_points_csv(is);
    if (x.cols() > 8)
      throw std::invalid_argument("design has " + std::to_string(x.cols()) +
                                  " dimensions; the triangulation supports at most 8");
    if ((x.array() < 0.0).any() || (x.array() > 1.0).any())
      throw std::invalid_argument("design points must lie in the unit cube [0,1]^d");
    if (n_max < 0) throw std::invalid_argument("--n-max must be nonnegative");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const dgpcl::Triangulation tri = dgpcl::delaunay(x);
    dgpcl::CandidateSet cands = dgpcl::concat(dgpcl::internal_candidates(tri, x),
                                              dgpcl::fringe_candidates(tri, x, alpha));
    if (n_max > 0) {
      dgpcl::RngEngine rng(dgpcl::mix64(seed));
      const Eigen::VectorXd y = Eigen::VectorXd::Zero(x.rows());
      cands = dgpcl::targeted_subsample(cands, tri, y, dgpcl::Threshold{}, n_max, rng);
    }
    std::ofstream ofs;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
      ofs.open(out_path, std::ios::trunc);
      if (!ofs) throw std::runtime_error("cannot open " + out_path + " for writing");
      os = &ofs;
    }
    dgpcl::write_candidates_csv(*os, cands);
    os->flush();
    if (!simplices_path.empty()) {
      std::ofstream sfs(simplices_path, std::ios::trunc);
      if (!sfs) throw std::runtime_error("cannot open " + simplices_path + " for writing");
      dgpcl::write_simplices_csv(sfs, tri);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contour-location experiments with deep Gaussian process surrogates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string checkpoint_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> workers_flag;

  CLI::App* run = app.add_subcommand("run", "Sequential-design experiment from a JSON config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("-o,--out", out_path, "Write CSV here instead of stdout");
  run->add_option("--seed", seed_override, "Override the config seed");
  run->add_option("--checkpoint", checkpoint_dir,
                  "Directory for per-repetition resume checkpoints");
  run->add_option("--workers", workers_flag,
                  "Worker-pool width for repetitions (or env DGPCL_WORKERS)");

  CLI::App* stat = app.add_subcommand("static", "One-shot LHS fit per repetition");
  stat->add_option("config", config_path, "JSON config file")->required();
  stat->add_option("-o,--out", out_path, "Write CSV here instead of stdout");
  stat->add_option("--seed", seed_override, "Override the config seed");
  stat->add_option("--workers", workers_flag,
                   "Worker-pool width for repetitions (or env DGPCL_WORKERS)");

  std::string design_path;
  std::string simplices_path;
  double alpha = 0.9;
  int n_max = 0;
  std::uint64_t tri_seed = 0;

  CLI::App* tric = app.add_subcommand("tricands", "Dump triangulation candidates for a design");
  tric->add_option("design", design_path, "CSV of design points in [0,1]^d")->required();
  tric->add_option("--alpha", alpha, "Fringe placement fraction toward the boundary")
      ->capture_default_str();
  tric->add_option("--n-max", n_max,
                   "Sub-sample candidates down to this many (0 keeps all; neutral ranking)")
      ->capture_default_str();
  tric->add_option("--seed", tri_seed, "Seed for the sub-sampling stream")
      ->capture_default_str();
  tric->add_option("-o,--out", out_path, "Write candidate CSV here instead of stdout");
  tric->add_option("--simplices", simplices_path, "Also dump simplex vertex indices to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed())
    return run_experiment(true, config_path, out_path, seed_override, checkpoint_dir,
                          workers_flag);
  if (stat->parsed())
    return run_experiment(false, config_path, out_path, seed_override, "", workers_flag);
  return run_tricands(design_path, alpha, n_max, tri_seed, out_path, simplices_path);
}
