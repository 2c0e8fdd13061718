// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "asgd/assumptions.hpp"
#include "asgd/cli.hpp"
#include "asgd/config.hpp"
#include "asgd/harness.hpp"
#include "asgd/io.hpp"
#include "asgd/oracle.hpp"

using namespace asgd;
namespace fs = std::filesystem;

namespace {

fs::path config_dir() {
  const char* dir = std::getenv("ASGD_CONFIG_DIR");
  return dir ? fs::path(dir) : fs::path(ASGD_SOURCE_DIR) / "configs";
}

RunConfig load(const std::string& name) { return parse_config(read_file(config_dir() / name)); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Criterion 1: quadratic moments against the exact second-moment recursion.
Outcome exact_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = load("quadratic.conf");
  auto& exp = cfg.experiment;
  const auto& quad = std::get<QuadraticObjective>(exp.objective.variant());
  const std::size_t d = quad.dim();
  const double sigma2 = quad.sigma * quad.sigma;
  const bool setup = d == 2 && quad.sigma == 1.0 && exp.schedule.c_gamma == 1.0 &&
                     std::abs(exp.schedule.alpha - 2.0 / 3.0) < 1e-15 && exp.replicates == 1000 &&
                     exp.n_max == 10000;

  const MomentTable table = run_replicates(exp, quad.m_true);
  std::vector<double> a(exp.n_max + 1);
  a[1] = sigma2 * d;
  for (std::uint64_t n = 1; n < exp.n_max; ++n) {
    const double g = exp.schedule.c_gamma * std::pow(static_cast<double>(n), -exp.schedule.alpha);
    a[n + 1] = (1 - g) * (1 - g) * a[n] + g * g * sigma2 * d;
  }
  double worst_z = 0.0;
  const auto& points = table.get(EstimatorKind::kRaw, 1).points;
  for (const auto& pt : points) worst_z = std::max(worst_z, std::abs(pt.moment - a[pt.n]) / pt.std_error);
  const double secs = seconds_since(t0);
  return {setup && worst_z <= 3.0 && secs < 30.0,
          fmt("%zu checkpoints, max |mc - exact|/stderr = %.3f (limit 3), %.1fs (limit 30s)", points.size(), worst_z,
              secs)};
}

struct MedianRun {
  RateReport report;
  double secs = 0.0;
};

MedianRun median_rates(std::size_t replicates, std::vector<int> moments) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = load("geometric_median.conf");
  cfg.experiment.replicates = replicates;
  cfg.experiment.moments = std::move(moments);
  MedianRun run{rate_experiment(cfg.experiment), 0.0};
  run.secs = seconds_since(t0);
  return run;
}

bool median_setup_ok(const RunConfig& cfg) {
  const auto& exp = cfg.experiment;
  const auto* gq = std::get_if<GeometricQuantileObjective>(&exp.objective.variant());
  return gq && norm(gq->direction) == 0.0 && exp.distribution.family == Family::kGaussian &&
         exp.distribution.center == Vector(5, 1.0) && exp.distribution.scale == 1.0 &&
         std::abs(exp.schedule.alpha - 2.0 / 3.0) < 1e-15 && exp.n_max == 100000 &&
         exp.resolved_checkpoints().front() == 1000 && exp.burn_in_fraction == 0.5 &&
         exp.ground_truth.mode == GroundTruthMode::kAnalytic;
}

// Criterion 5: robust regression rate against an empirical oracle.
Outcome cosh_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = load("cosh_logistic.conf");
  const auto& exp = cfg.experiment;
  const bool setup = exp.objective.kind() == ObjectiveKind::kCoshLogistic && exp.objective.dim() == 3 &&
                     exp.distribution.label_noise == 0.1 && exp.ground_truth.mode == GroundTruthMode::kEmpirical &&
                     exp.ground_truth.n_oracle == 1000000 && exp.ground_truth.tol == 1e-10 &&
                     exp.ground_truth.n_oracle >= 100 * exp.n_max;
  const RateReport report = rate_experiment(exp);
  const auto& avg = report.get(EstimatorKind::kAveraged, 1);
  const double slope = avg.fit.slope;
  const double bound = 5.0 * std::sqrt(avg.moments.points.back().moment);
  const bool oracle_ok = report.truth.oracle && report.truth.oracle->converged &&
                         report.truth.oracle->final_gradient_norm <= 1e-10;
  const double secs = seconds_since(t0);
  return {setup && oracle_ok && slope >= -1.15 && slope <= -0.85 && report.final_error_max_averaged <= bound &&
              secs < 300.0,
          fmt("averaged p=1 slope %.4f (+-%.4f) in [-1.15, -0.85]; max ||Zbar - m_hat|| = %.4g <= %.4g; "
              "oracle gradient norm %.2g; %.1fs",
              slope, avg.fit.std_error, report.final_error_max_averaged, bound,
              report.truth.oracle ? report.truth.oracle->final_gradient_norm : NAN, secs)};
}

// Criterion 6: Weiszfeld and gradient descent agree on random clouds.
Outcome oracle_cross_validation() {
  std::mt19937_64 gen(606);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  bool converged = true;
  for (int c = 0; c < 20; ++c) {
    std::vector<Vector> pts(100, Vector(3));
    Dataset data;
    for (auto& p : pts) {
      for (auto& x : p) x = normal(gen);
      data.push_back(Sample{p});
    }
    const auto w = weiszfeld(pts, Vector(3));
    const auto g = batch_gd(Objective(GeometricQuantileObjective(Vector(3))), data);
    converged = converged && w.converged && g.converged;
    worst = std::max(worst, distance(w.m_hat, g.m_hat));
  }
  const auto line = weiszfeld(std::vector<Vector>{{0}, {1}, {10}}, Vector{0.0});
  const double line_err = std::abs(line.m_hat[0] - 1.0);
  return {converged && worst <= 1e-8 && line_err <= 1e-10,
          fmt("max ||weiszfeld - batch_gd|| over 20 clouds = %.3g (limit 1e-8); {0,1,10} -> %.17g", worst,
              line.m_hat[0])};
}

// Criterion 7: assumption checks.
Outcome assumption_suite() {
  std::string detail;
  bool pass = true;

  RunConfig quad = load("quadratic.conf");
  const auto& qobj = std::get<QuadraticObjective>(quad.experiment.objective.variant());
  const auto qrep = run_convexity_checks(quad.experiment.objective, quad.experiment.distribution, qobj.m_true,
                                         quad.check, {1});
  pass = pass && std::abs(qrep.ratio_min - 1.0) <= 1e-10 && std::abs(qrep.remainder_max) <= 1e-10;
  detail += fmt("quadratic ratio_min %.17g, remainder_max %.3g; ", qrep.ratio_min, qrep.remainder_max);

  RunConfig sphere = load("sphere_median.conf");
  const double r = sphere.experiment.distribution.radius;
  const auto truth = ground_truth(sphere.experiment.objective, sphere.experiment.distribution,
                                  sphere.experiment.ground_truth);
  const auto srep =
      run_convexity_checks(sphere.experiment.objective, sphere.experiment.distribution, truth.m, sphere.check, {});
  const double target = 2.0 / (3.0 * r);
  const double rel = std::abs(srep.lambda_min_hat - target) / target;
  pass = pass && sphere.check.n_mc == 1000000 && rel <= 0.10;
  detail += fmt("sphere lambda_min_hat %.5f vs 2/(3r) = %.5f (%.2f%%); ", srep.lambda_min_hat, target, 100 * rel);

  double worst_ratio = 0.0;
  RunConfig median = load("geometric_median.conf");
  const auto& spec = median.experiment.distribution;
  for (const Vector& v : {Vector(5), Vector{0.5, 0, 0, 0, 0}, Vector{0.3, -0.3, 0.3, -0.3, 0.3}}) {
    const Objective obj{GeometricQuantileObjective(v)};
    ProbeOptions probes = median.check;
    probes.radius = 10.0;
    const auto points = probe_points(spec.center, probes);
    for (int q : {1, 2, 3}) {
      const auto res = check_gradient_moments(obj, spec, q, spec.center, points, 20000, median.experiment.seed);
      for (const auto& p : res.probes) worst_ratio = std::max(worst_ratio, p.moment / std::pow(2.0, 2 * q));
    }
  }
  pass = pass && worst_ratio <= 1.0;
  detail += fmt("max moment / 2^{2q} over q in {1,2,3} = %.4f", worst_ratio);
  return {pass, detail};
}

// Losses written out directly so the check does not share code with the library.
double mean_loss(int kind, const Vector& v, const Dataset& data, const Vector& h) {
  long double total = 0.0L;
  for (const auto& s : data) {
    double dot = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) dot += s.x[i] * h[i];
    if (kind == 0) {
      double dist2 = 0.0, along = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        dist2 += (s.x[i] - h[i]) * (s.x[i] - h[i]);
        along += (s.x[i] - h[i]) * v[i];
      }
      total += std::sqrt(dist2) + along;
    } else if (kind == 1) {
      total += std::log(std::cosh(s.label - dot));
    } else {
      total += std::log1p(std::exp(-s.label * dot));
    }
  }
  return static_cast<double>(total / data.size());
}

// Criterion 8: finite differences.
Outcome finite_differences() {
  std::mt19937_64 gen(808);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> dims(1, 10);
  std::bernoulli_distribution coin(0.5);
  double worst[3] = {0, 0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = dims(gen);
    Vector v(d);
    for (auto& x : v) x = normal(gen);
    v *= 0.9 * std::uniform_real_distribution<double>(0, 1)(gen) / norm(v);
    const Objective objectives[] = {Objective(GeometricQuantileObjective(v)), Objective(CoshLogisticObjective{d}),
                                    Objective(LogisticObjective{d})};
    for (int kind = 0; kind < 3; ++kind) {
      Dataset data(50);
      for (auto& s : data) {
        s.x = Vector(d);
        for (auto& x : s.x) x = 2.0 * normal(gen);
        s.label = coin(gen) ? 1.0 : -1.0;
      }
      Vector h(d);
      for (auto& x : h) x = normal(gen);
      const Vector g = empirical_batch_gradient(objectives[kind], h, data);
      const double step = 1e-6 * (1.0 + norm(h));
      Vector fd(d);
      for (std::size_t i = 0; i < d; ++i) {
        Vector up = h, down = h;
        up[i] += step;
        down[i] -= step;
        fd[i] = (mean_loss(kind, v, data, up) - mean_loss(kind, v, data, down)) / (2 * step);
      }
      worst[kind] = std::max(worst[kind], distance(g, fd) / std::max(norm(g), 1e-12));
    }
  }
  const double all = std::max({worst[0], worst[1], worst[2]});
  return {all <= 1e-5, fmt("max relative error: geometric quantile %.2g, cosh-logistic %.2g, logistic %.2g (limit 1e-5)",
                           worst[0], worst[1], worst[2])};
}

// Criterion 9: rates twice through the command line.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "asgd_acceptance_determinism";
  fs::remove_all(dir);
  const std::string config = (config_dir() / "geometric_median.conf").string();
  const int rc1 = cli::run({"--threads", "1", "rates", config, "--out-dir", (dir / "a").string()});
  const int rc2 = cli::run({"--threads", "3", "rates", config, "--out-dir", (dir / "b").string()});
  bool same = rc1 == 0 && rc2 == 0;
  std::size_t bytes = 0;
  for (const char* f : {"moments.csv", "report.json"}) {
    if (!same) break;
    const std::string a = read_file(dir / "a" / f);
    same = same && a == read_file(dir / "b" / f);
    bytes += a.size();
  }
  fs::remove_all(dir);
  return {same, fmt("exit codes %d/%d, %zu bytes of CSV+JSON compared", rc1, rc2, bytes)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %d %s: %s (%s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "quadratic moments match the exact recursion", exact_oracle);

  // criteria 2 and 3 share one run
  MedianRun p1;
  std::string p1_error;
  try {
    p1 = median_rates(200, {1});
  } catch (const std::exception& e) {
    p1_error = e.what();
  }
  const bool p1_setup = median_setup_ok(load("geometric_median.conf"));
  report(2, "raw iterate p=1 slope", [&]() -> Outcome {
    if (!p1_error.empty()) return {false, "threw: " + p1_error};
    const auto& fit = p1.report.get(EstimatorKind::kRaw, 1).fit;
    return {p1_setup && fit.slope >= -0.76 && fit.slope <= -0.56 && p1.secs < 300.0,
            fmt("slope %.4f (+-%.4f) in [-0.76, -0.56], %zu points, R=%zu, %.1fs", fit.slope, fit.std_error,
                fit.points_used, p1.report.replicates, p1.secs)};
  });
  report(3, "averaged p=1 slope", [&]() -> Outcome {
    if (!p1_error.empty()) return {false, "threw: " + p1_error};
    const auto& fit = p1.report.get(EstimatorKind::kAveraged, 1).fit;
    return {p1_setup && fit.slope >= -1.15 && fit.slope <= -0.85,
            fmt("slope %.4f (+-%.4f) in [-1.15, -0.85], %zu points", fit.slope, fit.std_error, fit.points_used)};
  });
  report(4, "p=2 slopes", [&]() -> Outcome {
    const MedianRun p2 = median_rates(500, {2});
    const auto& raw = p2.report.get(EstimatorKind::kRaw, 2).fit;
    const auto& avg = p2.report.get(EstimatorKind::kAveraged, 2).fit;
    return {p1_setup && std::abs(raw.slope + 4.0 / 3.0) <= 0.25 && std::abs(avg.slope + 2.0) <= 0.25 &&
                p2.report.replicates >= 500 && p2.secs < 600.0,
            fmt("raw %.4f (target -4/3 +- 0.25), averaged %.4f (target -2 +- 0.25), R=%zu, %.1fs", raw.slope,
                avg.slope, p2.report.replicates, p2.secs)};
  });
  report(5, "cosh-logistic averaged rate", cosh_rate);
  report(6, "oracle cross-validation", oracle_cross_validation);
  report(7, "assumption suite", assumption_suite);
  report(8, "finite-difference gradients", finite_differences);
  report(9, "rates determinism", determinism);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
