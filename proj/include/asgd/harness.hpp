#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "asgd/averaged_sgd.hpp"
#include "asgd/datagen.hpp"
#include "asgd/objectives.hpp"
#include "asgd/oracle.hpp"

namespace asgd {

inline constexpr std::uint64_t kDefaultCheckpointStart = 1000;
inline constexpr int kDefaultPointsPerDecade = 12;
inline constexpr double kDefaultBurnIn = 0.5;
inline constexpr std::size_t kMinFitPoints = 8;

// round(start * 10^(k / per_decade)) for k = 0, 1, ... up to n_max, with
// duplicates dropped and n_max appended if the grid stops short of it.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t start, std::uint64_t n_max,
                                                 int per_decade = kDefaultPointsPerDecade);

struct ExperimentConfig {
  ExperimentConfig(Objective obj, DistributionSpec dist) : objective(std::move(obj)), distribution(std::move(dist)) {}

  Objective objective;
  DistributionSpec distribution;
  StepSchedule schedule;
  std::uint64_t n_max = 100000;
  std::vector<std::uint64_t> checkpoints;  // empty: geometric grid from kDefaultCheckpointStart
  int points_per_decade = kDefaultPointsPerDecade;
  std::size_t replicates = 100;
  std::vector<int> moments{1};
  std::uint64_t seed = 0;
  GroundTruthOptions ground_truth;
  double burn_in_fraction = kDefaultBurnIn;
  StreamOptions stream;
  // Every replicate reuses stream 0 (variance-free runs for testing).
  bool identical_replicates = false;
  std::size_t threads = 0;
  // Digest of the originating config text, copied into reports.
  std::string config_hash;

  std::vector<std::uint64_t> resolved_checkpoints() const;
  void validate() const;
};

enum class EstimatorKind { kRaw, kAveraged };
std::string to_string(EstimatorKind kind);

struct MomentPoint {
  std::uint64_t n = 0;
  double moment = 0.0;
  double std_error = 0.0;
};

struct MomentSeries {
  EstimatorKind estimator = EstimatorKind::kRaw;
  int p = 1;
  std::vector<MomentPoint> points;
};

// Replicate means of ||Z_n - m||^{2p} and ||Zbar_n - m||^{2p} at each
// checkpoint, with standard errors across replicates.
struct MomentTable {
  std::vector<MomentSeries> series;
  std::size_t replicates = 0;   // successful replicates
  std::size_t failures = 0;     // replicates aborted by NonFiniteIterate
  // Largest ||Z_{n_max} - m|| and ||Zbar_{n_max} - m|| over replicates.
  double final_error_max_raw = 0.0;
  double final_error_max_averaged = 0.0;

  const MomentSeries& get(EstimatorKind estimator, int p) const;
};

// Replicate r draws from stream r of the base seed (see stream_key) and runs
// run_stream. Reduction is in replicate order, so results do not depend on
// the thread count or scheduling. Throws TooManyFailures when more than 1%
// of replicates abort.
MomentTable run_replicates(const ExperimentConfig& config, const Vector& m);

struct LogLogFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::size_t points_used = 0;
};

// OLS of ln(moment) on ln(n) over the checkpoints in the final
// (1 - burn_in_fraction) of the log-range of n.
LogLogFit fit_loglog_slope(const std::vector<MomentPoint>& table, double burn_in_fraction = kDefaultBurnIn);

struct RateSeries {
  MomentSeries moments;
  LogLogFit fit;
};

struct RateReport {
  std::string config_hash;
  GroundTruth truth;
  std::vector<RateSeries> series;
  double burn_in_fraction = kDefaultBurnIn;
  std::size_t replicates = 0;
  std::size_t failures = 0;
  std::uint64_t n_max = 0;
  double final_error_max_raw = 0.0;
  double final_error_max_averaged = 0.0;

  const RateSeries& get(EstimatorKind estimator, int p) const;
};

// Ground truth + run_replicates + one fit per (estimator, p).
RateReport rate_experiment(const ExperimentConfig& config);

// Columns: estimator,p,n,moment,stderr,replicates
std::string moments_csv(const RateReport& report);
nlohmann::json to_json(const RateReport& report);

}  // namespace asgd
