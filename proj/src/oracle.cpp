#include "asgd/oracle.hpp"

#include <cmath>

#include "asgd/io.hpp"
#include "asgd/parallel.hpp"

namespace asgd {

namespace {

struct WeiszfeldSums {
  double inv_dist = 0.0;   // sum 1/d_i over non-coincident points
  Vector weighted;         // sum x_i/d_i
  Vector pull;             // sum (x_i - h)/d_i
  std::size_t coincident = 0;
  double loss = 0.0;       // sum ||x_i - h|| + <x_i - h, v>
};

WeiszfeldSums weiszfeld_sums(const std::vector<Vector>& points, const Vector& v, const Vector& h) {
  const std::size_t d = h.size();
  return reduce_blocks<WeiszfeldSums>(
      points.size(), 1,
      [&](std::size_t begin, std::size_t end) {
        WeiszfeldSums acc{0.0, Vector(d), Vector(d), 0, 0.0};
        for (std::size_t k = begin; k < end; ++k) {
          const Vector& x = points[k];
          const double dist = distance(x, h);
          double lin = 0.0;
          for (std::size_t i = 0; i < d; ++i) lin += (x[i] - h[i]) * v[i];
          acc.loss += dist + lin;
          if (dist < kDegeneracyThreshold) {
            ++acc.coincident;
            continue;
          }
          const double w = 1.0 / dist;
          acc.inv_dist += w;
          for (std::size_t i = 0; i < d; ++i) {
            acc.weighted[i] += w * x[i];
            acc.pull[i] += w * (x[i] - h[i]);
          }
        }
        return acc;
      },
      [](WeiszfeldSums& a, const WeiszfeldSums& b) {
        a.inv_dist += b.inv_dist;
        a.weighted += b.weighted;
        a.pull += b.pull;
        a.coincident += b.coincident;
        a.loss += b.loss;
      });
}

}  // namespace

OracleResult weiszfeld(const std::vector<Vector>& points, const Vector& v, double tol, int max_iter,
                       bool record_trace) {
  if (!(tol > 0.0)) throw ConfigError("oracle tolerance must be positive");
  if (!(norm(v) < 1.0)) throw ConfigError("direction must have norm < 1");
  if (points.empty()) throw ConfigError("empty dataset");
  const std::size_t d = v.size();
  for (const auto& x : points) check_same_dim(x, v);
  bool distinct = false;
  for (const auto& x : points) {
    if (squared_distance(x, points.front()) > 0.0) {
      distinct = true;
      break;
    }
  }
  if (!distinct) throw DegenerateDataset("all points are identical");

  const double n = static_cast<double>(points.size());
  Vector h(d);
  for (const auto& x : points) h += x;
  h *= 1.0 / n;

  OracleResult result;
  for (int it = 0; it <= max_iter; ++it) {
    const WeiszfeldSums s = weiszfeld_sums(points, v, h);
    if (record_trace) result.objective_trace.push_back(s.loss / n);
    // Minimum-norm subgradient of the mean loss: the coincident points
    // contribute a ball of radius (#coincident)/N.
    Vector descent = s.pull;
    axpy_inplace(n, v, descent);
    const double descent_norm = norm(descent);
    result.final_gradient_norm =
        std::max(0.0, descent_norm - static_cast<double>(s.coincident)) / n;
    result.iterations = it;
    result.m_hat = h;
    if (result.final_gradient_norm <= tol) {
      result.converged = true;
      return result;
    }
    if (it == max_iter) break;
    if (s.coincident > 0) {
      axpy_inplace(1e-9 * (1.0 + norm(h)) / descent_norm, descent, h);
      continue;
    }
    const double n_eff = n - static_cast<double>(s.coincident);
    Vector next = s.weighted;
    axpy_inplace(n_eff, v, next);
    next *= 1.0 / s.inv_dist;
    h = std::move(next);
  }
  throw NoConvergence("weiszfeld did not reach tol " + format_double(tol) + " in " +
                      std::to_string(max_iter) + " iterations (gradient norm " +
                      format_double(result.final_gradient_norm) + ")");
}

OracleResult weiszfeld(const Dataset& dataset, const Vector& v, double tol, int max_iter, bool record_trace) {
  std::vector<Vector> points;
  points.reserve(dataset.size());
  for (const auto& s : dataset) points.push_back(s.x);
  return weiszfeld(points, v, tol, max_iter, record_trace);
}

OracleResult batch_gd(const Objective& objective, const Dataset& dataset, double tol, int max_iter,
                      std::optional<Vector> start, std::size_t threads) {
  if (!(tol > 0.0)) throw ConfigError("oracle tolerance must be positive");
  if (dataset.empty()) throw ConfigError("empty dataset");
  const std::size_t d = objective.dim();

  Vector h(d);
  if (start) {
    check_same_dim(*start, h);
    h = *start;
  } else if (!objective.labeled()) {
    for (const auto& s : dataset) h += s.x;
    h *= 1.0 / static_cast<double>(dataset.size());
  }

  constexpr double kArmijo = 1e-4;
  OracleResult result;
  double f = empirical_loss(objective, h, dataset, threads);
  Vector g = empirical_batch_gradient(objective, h, dataset, threads);
  double t = 1.0;
  for (int it = 0; it <= max_iter; ++it) {
    const double g2 = inner(g, g);
    result.m_hat = h;
    result.iterations = it;
    result.final_gradient_norm = std::sqrt(g2);
    result.objective_trace.push_back(f);
    if (result.final_gradient_norm <= tol) {
      result.converged = true;
      return result;
    }
    if (it == max_iter) break;

    bool accepted = false;
    for (int backtrack = 0; backtrack < 200 && !accepted; ++backtrack, t *= 0.5) {
      Vector trial = axpy(-t, g, h);
      const double f_trial = empirical_loss(objective, trial, dataset, threads);
      if (f_trial <= f - kArmijo * t * g2) {
        h = std::move(trial);
        f = f_trial;
        g = empirical_batch_gradient(objective, h, dataset, threads);
        accepted = true;
      } else if (std::abs(f_trial - f) <= 1e-13 * std::max(1.0, std::abs(f))) {
        // Loss differences are below rounding: accept while the step has not
        // overshot the minimum along -g.
        Vector g_trial = empirical_batch_gradient(objective, trial, dataset, threads);
        if (inner(g_trial, g) >= 0.0) {
          h = std::move(trial);
          f = f_trial;
          g = std::move(g_trial);
          accepted = true;
        }
      }
      if (accepted) break;
    }
    if (!accepted) break;
    t *= 2.0;
  }
  throw NoConvergence("batch_gd did not reach tol " + format_double(tol) + " (gradient norm " +
                      format_double(result.final_gradient_norm) + " after " +
                      std::to_string(result.iterations) + " iterations)");
}

std::string to_string(GroundTruthMode mode) {
  return mode == GroundTruthMode::kAnalytic ? "analytic" : "empirical";
}

GroundTruthMode parse_ground_truth_mode(const std::string& name) {
  if (name == "analytic") return GroundTruthMode::kAnalytic;
  if (name == "empirical") return GroundTruthMode::kEmpirical;
  throw ConfigError("unknown ground-truth mode '" + name + "'");
}

GroundTruth ground_truth(const Objective& objective, const DistributionSpec& spec,
                         const GroundTruthOptions& options) {
  if (spec.dim() != objective.dim()) throw DimensionMismatch(spec.dim(), objective.dim());
  if (spec.labeled() != objective.labeled()) {
    throw ConfigError("distribution labels do not match the objective");
  }
  GroundTruth truth;
  truth.mode = options.mode;
  if (options.mode == GroundTruthMode::kAnalytic) {
    if (const auto* q = std::get_if<QuadraticObjective>(&objective.variant())) {
      truth.m = q->m_true;
      return truth;
    }
    if (const auto* gq = std::get_if<GeometricQuantileObjective>(&objective.variant())) {
      if (norm(gq->direction) == 0.0 && spec.centrally_symmetric()) {
        truth.m = spec.center;
        return truth;
      }
    }
    throw ConfigError("analytic ground truth is unavailable for " + to_string(objective.kind()) + " on " +
                      to_string(spec.family) + "; use ground_truth.mode = empirical");
  }

  const Dataset data = freeze(spec, options.n_oracle, options.seed, kOracleStream);
  truth.n_oracle = options.n_oracle;
  truth.tol = options.tol;
  if (const auto* gq = std::get_if<GeometricQuantileObjective>(&objective.variant())) {
    truth.oracle = weiszfeld(data, gq->direction, options.tol, options.max_iter);
  } else {
    truth.oracle = batch_gd(objective, data, options.tol, options.max_iter, std::nullopt, options.threads);
  }
  truth.m = truth.oracle->m_hat;
  return truth;
}

nlohmann::json to_json(const OracleResult& result) {
  return {
      {"m_hat", result.m_hat.coords()},
      {"iterations", result.iterations},
      {"final_gradient_norm", result.final_gradient_norm},
      {"converged", result.converged},
  };
}

nlohmann::json to_json(const GroundTruth& truth) {
  nlohmann::json j = {{"mode", to_string(truth.mode)}, {"m", truth.m.coords()}};
  if (truth.oracle) {
    j["oracle"] = to_json(*truth.oracle);
    j["n_oracle"] = truth.n_oracle;
    j["tol"] = truth.tol;
  }
  return j;
}

}  // namespace asgd
