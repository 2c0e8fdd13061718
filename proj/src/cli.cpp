#include "asgd/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "asgd/assumptions.hpp"
#include "asgd/averaged_sgd.hpp"
#include "asgd/config.hpp"
#include "asgd/datagen.hpp"
#include "asgd/harness.hpp"
#include "asgd/io.hpp"
#include "asgd/oracle.hpp"

namespace asgd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t resolve_thread_flag(std::size_t flag) {
  if (const char* env = std::getenv("ASGD_THREADS")) {
    if (*env != '\0') return parse_uint(env);
  }
  return flag;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Manifest {
  explicit Manifest(std::string cmd) : command(std::move(cmd)) {}

  std::string command;
  std::string config_hash;
  std::string started_at = utc_timestamp();
  std::vector<std::string> outputs;

  void write(const fs::path& path) const {
    const json j = {
        {"command", command},
        {"config_hash", config_hash},
        {"started_at", started_at},
        {"finished_at", utc_timestamp()},
        {"tool_version", kToolVersion},
        {"outputs", outputs},
    };
    write_file_atomic(path, dump(j));
  }
};

fs::path manifest_for(const fs::path& out) {
  auto p = out;
  p += ".manifest.json";
  return p;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

int cmd_estimate(const std::string& config_path, std::optional<std::uint64_t> n_flag, std::uint64_t seed,
                 const fs::path& out) {
  Manifest manifest("estimate");
  const RunConfig cfg = load_config(config_path);
  manifest.config_hash = cfg.hash;
  const auto& exp = cfg.experiment;
  const std::uint64_t n = n_flag.value_or(cfg.estimate_n);
  if (n < 1) throw ConfigError("--n must be >= 1");

  Sampler sampler(exp.distribution, CounterRng(seed, kEstimateStream));
  const SampleSource source = [&sampler](Sample& s) { sampler.draw(s); };
  const auto trajectory = run_stream(exp.objective, exp.schedule, source, n, {n}, exp.stream);
  const Snapshot& final_state = trajectory.back();

  const json j = {
      {"config_hash", cfg.hash},
      {"seed", seed},
      {"n", final_state.n},
      {"z", final_state.z.coords()},
      {"z_bar", final_state.z_bar.coords()},
  };
  write_file_atomic(out, dump(j));
  manifest.outputs = {out.string()};
  manifest.write(manifest_for(out));
  return kOk;
}

int cmd_rates(const std::string& config_path, const fs::path& out_dir, std::size_t threads) {
  Manifest manifest("rates");
  RunConfig cfg = load_config(config_path);
  manifest.config_hash = cfg.hash;
  cfg.experiment.threads = threads;
  cfg.experiment.ground_truth.threads = threads;
  const RateReport report = rate_experiment(cfg.experiment);
  const fs::path csv = out_dir / "moments.csv";
  const fs::path report_path = out_dir / "report.json";
  write_file_atomic(csv, moments_csv(report));
  write_file_atomic(report_path, dump(to_json(report)));
  manifest.outputs = {csv.string(), report_path.string()};
  manifest.write(out_dir / "manifest.json");
  return kOk;
}

int cmd_oracle(const std::string& config_path, const fs::path& out, std::size_t threads) {
  Manifest manifest("oracle");
  const RunConfig cfg = load_config(config_path);
  manifest.config_hash = cfg.hash;
  const auto& exp = cfg.experiment;

  Dataset data;
  std::uint64_t seed = exp.seed;
  if (cfg.oracle_dataset) {
    auto loaded = dataset_from_csv(read_file(*cfg.oracle_dataset));
    if (loaded.spec.dim() != exp.objective.dim()) throw DimensionMismatch(loaded.spec.dim(), exp.objective.dim());
    data = std::move(loaded.data);
    seed = loaded.seed;
  } else {
    data = freeze(exp.distribution, exp.ground_truth.n_oracle, exp.seed, kOracleStream);
  }

  const auto* gq = std::get_if<GeometricQuantileObjective>(&exp.objective.variant());
  const bool use_weiszfeld =
      cfg.oracle_solver == OracleSolver::kWeiszfeld || (cfg.oracle_solver == OracleSolver::kAuto && gq != nullptr);
  const OracleResult result =
      use_weiszfeld ? weiszfeld(data, gq->direction, exp.ground_truth.tol, exp.ground_truth.max_iter)
                    : batch_gd(exp.objective, data, exp.ground_truth.tol, exp.ground_truth.max_iter, std::nullopt,
                               threads);
  json j = to_json(result);
  j["config_hash"] = cfg.hash;
  j["solver"] = use_weiszfeld ? "weiszfeld" : "batch_gd";
  j["n"] = data.size();
  j["seed"] = seed;
  j["tol"] = exp.ground_truth.tol;
  write_file_atomic(out, dump(j));
  manifest.outputs = {out.string()};
  manifest.write(manifest_for(out));
  return kOk;
}

int cmd_check(const std::string& config_path, const fs::path& out, std::size_t threads) {
  Manifest manifest("check");
  RunConfig cfg = load_config(config_path);
  manifest.config_hash = cfg.hash;
  auto& exp = cfg.experiment;
  exp.ground_truth.threads = threads;
  cfg.check.threads = threads;
  const GroundTruth truth = ground_truth(exp.objective, exp.distribution, exp.ground_truth);
  const ConvexityReport report = run_convexity_checks(exp.objective, exp.distribution, truth.m, cfg.check,
                                                      cfg.check_moments);
  json j = to_json(report);
  j["config_hash"] = cfg.hash;
  j["ground_truth"] = to_json(truth);
  write_file_atomic(out, dump(j));
  manifest.outputs = {out.string()};
  manifest.write(manifest_for(out));
  return kOk;
}

int cmd_gen(const std::string& config_path, std::uint64_t n, std::uint64_t seed, const fs::path& out) {
  Manifest manifest("gen");
  const RunConfig cfg = load_config(config_path);
  manifest.config_hash = cfg.hash;
  const Dataset data = freeze(cfg.experiment.distribution, n, seed);
  write_file_atomic(out, dataset_to_csv(cfg.experiment.distribution, seed, data));
  manifest.outputs = {out.string()};
  manifest.write(manifest_for(out));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Averaged stochastic gradient estimators and rate experiments", "asgd"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = machine parallelism; ASGD_THREADS overrides)");

  std::string config;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  std::string out;
  std::string out_dir;

  auto* estimate = app.add_subcommand("estimate", "stream n samples through the averaged estimator");
  estimate->add_option("config", config, "config file")->required();
  auto* estimate_n = estimate->add_option("--n", n, "number of samples");
  estimate->add_option("--seed", seed, "random seed");
  estimate->add_option("--out", out, "output JSON")->required();

  auto* rates = app.add_subcommand("rates", "run a Monte Carlo rate experiment");
  rates->add_option("config", config, "config file")->required();
  rates->add_option("--out-dir", out_dir, "output directory")->required();

  auto* oracle = app.add_subcommand("oracle", "solve the empirical problem on a frozen dataset");
  oracle->add_option("config", config, "config file")->required();
  oracle->add_option("--out", out, "output JSON")->required();

  auto* check = app.add_subcommand("check", "numerical convexity and moment checks");
  check->add_option("config", config, "config file")->required();
  check->add_option("--out", out, "output JSON")->required();

  auto* gen = app.add_subcommand("gen", "write a frozen dataset as CSV");
  gen->add_option("config", config, "config file")->required();
  gen->add_option("--n", n, "number of samples")->required();
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", out, "output CSV")->required();

  std::vector<std::string> argv_storage{"asgd"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    threads = resolve_thread_flag(threads);
    if (*estimate) {
      std::optional<std::uint64_t> n_flag;
      if (estimate_n->count() > 0) n_flag = n;
      return cmd_estimate(config, n_flag, seed, out);
    }
    if (*rates) return cmd_rates(config, out_dir, threads);
    if (*oracle) return cmd_oracle(config, out, threads);
    if (*check) return cmd_check(config, out, threads);
    if (*gen) return cmd_gen(config, n, seed, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionMismatch& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NonFiniteIterate& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kRuntimeAbort;
  } catch (const TooManyFailures& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kRuntimeAbort;
  } catch (const NoConvergence& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace asgd::cli
