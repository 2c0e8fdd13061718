#include "asgd/harness.hpp"

#include <cmath>
#include <optional>

#include "asgd/io.hpp"
#include "asgd/parallel.hpp"
#include "asgd/rng.hpp"

namespace asgd {

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t start, std::uint64_t n_max, int per_decade) {
  if (start < 1 || start > n_max) throw ConfigError("checkpoint start must lie in [1, n_max]");
  if (per_decade < 1) throw ConfigError("points per decade must be >= 1");
  std::vector<std::uint64_t> grid;
  for (int k = 0;; ++k) {
    const double value = static_cast<double>(start) * std::pow(10.0, static_cast<double>(k) / per_decade);
    const auto n = static_cast<std::uint64_t>(std::llround(value));
    if (n > n_max) break;
    if (grid.empty() || n > grid.back()) grid.push_back(n);
  }
  if (grid.back() < n_max) grid.push_back(n_max);
  return grid;
}

std::vector<std::uint64_t> ExperimentConfig::resolved_checkpoints() const {
  if (!checkpoints.empty()) return checkpoints;
  return geometric_checkpoints(std::min(kDefaultCheckpointStart, n_max), n_max, points_per_decade);
}

void ExperimentConfig::validate() const {
  schedule.validate();
  if (replicates < 2) throw ConfigError("replicates must be >= 2");
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  if (checkpoints.empty() && points_per_decade < 8) throw ConfigError("checkpoint grid needs >= 8 points per decade");
  if (moments.empty()) throw ConfigError("at least one moment order p is required");
  for (int p : moments) {
    if (p < 1) throw ConfigError("moment order p must be >= 1");
  }
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) throw ConfigError("burn_in must lie in [0, 1)");
  if (distribution.dim() != objective.dim()) throw DimensionMismatch(distribution.dim(), objective.dim());
  if (distribution.labeled() != objective.labeled()) {
    throw ConfigError("distribution labels do not match the objective");
  }
  const auto grid = resolved_checkpoints();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1 || grid[i] > n_max || (i > 0 && grid[i] <= grid[i - 1])) {
      throw ConfigError("checkpoints must be strictly increasing within [1, n_max]");
    }
  }
}

std::string to_string(EstimatorKind kind) { return kind == EstimatorKind::kRaw ? "raw" : "averaged"; }

const MomentSeries& MomentTable::get(EstimatorKind estimator, int p) const {
  for (const auto& s : series) {
    if (s.estimator == estimator && s.p == p) return s;
  }
  throw Error("no moment series for " + to_string(estimator) + " p=" + std::to_string(p));
}

const RateSeries& RateReport::get(EstimatorKind estimator, int p) const {
  for (const auto& s : series) {
    if (s.moments.estimator == estimator && s.moments.p == p) return s;
  }
  throw Error("no rate series for " + to_string(estimator) + " p=" + std::to_string(p));
}

namespace {

// Squared errors at each checkpoint of one replicate; empty when aborted.
struct ReplicateErrors {
  std::vector<double> raw;
  std::vector<double> averaged;
  bool failed = false;
};

}  // namespace

MomentTable run_replicates(const ExperimentConfig& config, const Vector& m) {
  config.validate();
  check_same_dim(m, Vector(config.objective.dim()));
  const auto checkpoints = config.resolved_checkpoints();
  const std::size_t k_count = checkpoints.size();

  std::vector<ReplicateErrors> errors(config.replicates);
  parallel_for(config.replicates, config.threads, [&](std::size_t r) {
    const std::uint64_t stream = config.identical_replicates ? 0 : r;
    Sampler sampler(config.distribution, CounterRng(config.seed, stream));
    const SampleSource source = [&sampler](Sample& s) { sampler.draw(s); };
    ReplicateErrors& out = errors[r];
    try {
      const auto trajectory =
          run_stream(config.objective, config.schedule, source, config.n_max, checkpoints, config.stream);
      out.raw.reserve(k_count);
      out.averaged.reserve(k_count);
      for (const auto& snap : trajectory) {
        out.raw.push_back(squared_distance(snap.z, m));
        out.averaged.push_back(squared_distance(snap.z_bar, m));
      }
    } catch (const NonFiniteIterate&) {
      out.failed = true;
    }
  });

  MomentTable table;
  for (const auto& e : errors) {
    if (e.failed) {
      ++table.failures;
      continue;
    }
    ++table.replicates;
    table.final_error_max_raw = std::max(table.final_error_max_raw, std::sqrt(e.raw.back()));
    table.final_error_max_averaged = std::max(table.final_error_max_averaged, std::sqrt(e.averaged.back()));
  }
  if (static_cast<double>(table.failures) > 0.01 * static_cast<double>(config.replicates)) {
    throw TooManyFailures(std::to_string(table.failures) + " of " + std::to_string(config.replicates) +
                          " replicates produced non-finite iterates");
  }
  if (table.replicates < 2) throw TooManyFailures("fewer than two successful replicates");

  const double count = static_cast<double>(table.replicates);
  for (EstimatorKind kind : {EstimatorKind::kRaw, EstimatorKind::kAveraged}) {
    for (int p : config.moments) {
      MomentSeries series{kind, p, {}};
      for (std::size_t k = 0; k < k_count; ++k) {
        double sum = 0.0;
        double sq_sum = 0.0;
        for (const auto& e : errors) {
          if (e.failed) continue;
          const double sq = kind == EstimatorKind::kRaw ? e.raw[k] : e.averaged[k];
          const double value = std::pow(sq, p);
          sum += value;
          sq_sum += value * value;
        }
        const double mean = sum / count;
        const double var = std::max(0.0, (sq_sum - count * mean * mean) / (count - 1.0));
        series.points.push_back({checkpoints[k], mean, std::sqrt(var / count)});
      }
      table.series.push_back(std::move(series));
    }
  }
  return table;
}

LogLogFit fit_loglog_slope(const std::vector<MomentPoint>& table, double burn_in_fraction) {
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) throw ConfigError("burn_in must lie in [0, 1)");
  if (table.empty()) throw InsufficientPoints("empty moment table");
  const double lo = std::log(static_cast<double>(table.front().n));
  const double hi = std::log(static_cast<double>(table.back().n));
  const double cutoff = lo + burn_in_fraction * (hi - lo);

  std::vector<double> xs, ys;
  for (const auto& pt : table) {
    // n + 0.5 absorbs rounding of the checkpoint grid to integers.
    if (std::log(static_cast<double>(pt.n) + 0.5) < cutoff) continue;
    if (!(pt.moment > 0.0)) throw NonPositiveMoment("moment at n=" + std::to_string(pt.n) + " is not positive");
    xs.push_back(std::log(static_cast<double>(pt.n)));
    ys.push_back(std::log(pt.moment));
  }
  if (xs.size() < kMinFitPoints) {
    throw InsufficientPoints("slope fit needs >= " + std::to_string(kMinFitPoints) + " points after burn-in, got " +
                             std::to_string(xs.size()));
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientPoints("checkpoints do not span a range of n");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += r * r;
  }
  fit.std_error = std::sqrt(ssr / (k - 2.0) / sxx);
  fit.points_used = xs.size();
  return fit;
}

RateReport rate_experiment(const ExperimentConfig& config) {
  config.validate();
  RateReport report;
  report.config_hash = config.config_hash;
  report.truth = ground_truth(config.objective, config.distribution, config.ground_truth);
  const MomentTable table = run_replicates(config, report.truth.m);
  report.burn_in_fraction = config.burn_in_fraction;
  report.replicates = table.replicates;
  report.failures = table.failures;
  report.n_max = config.n_max;
  report.final_error_max_raw = table.final_error_max_raw;
  report.final_error_max_averaged = table.final_error_max_averaged;
  for (const auto& series : table.series) {
    report.series.push_back({series, fit_loglog_slope(series.points, config.burn_in_fraction)});
  }
  return report;
}

std::string moments_csv(const RateReport& report) {
  std::string out = "estimator,p,n,moment,stderr,replicates\n";
  for (const auto& s : report.series) {
    for (const auto& pt : s.moments.points) {
      out += to_string(s.moments.estimator) + "," + std::to_string(s.moments.p) + "," + std::to_string(pt.n) + "," +
             format_double(pt.moment) + "," + format_double(pt.std_error) + "," + std::to_string(report.replicates) +
             "\n";
    }
  }
  return out;
}

nlohmann::json to_json(const RateReport& report) {
  nlohmann::json series = nlohmann::json::array();
  for (const auto& s : report.series) {
    series.push_back({
        {"estimator", to_string(s.moments.estimator)},
        {"p", s.moments.p},
        {"slope", s.fit.slope},
        {"slope_stderr", s.fit.std_error},
        {"intercept", s.fit.intercept},
        {"constant", std::exp(s.fit.intercept)},
        {"points_used", s.fit.points_used},
    });
  }
  return {
      {"config_hash", report.config_hash},
      {"ground_truth", to_json(report.truth)},
      {"burn_in_fraction", report.burn_in_fraction},
      {"replicates", report.replicates},
      {"failures", report.failures},
      {"n_max", report.n_max},
      {"final_error_max", {{"raw", report.final_error_max_raw}, {"averaged", report.final_error_max_averaged}}},
      {"series", series},
  };
}

}  // namespace asgd
