#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asgd/datagen.hpp"
#include "asgd/linalg.hpp"
#include "asgd/objectives.hpp"
#include "asgd/sample.hpp"

namespace asgd {

inline constexpr double kOracleTol = 1e-10;
inline constexpr int kOracleMaxIter = 100000;

struct OracleResult {
  Vector m_hat;
  int iterations = 0;
  // Norm of the minimum-norm (sub)gradient of the mean empirical loss.
  double final_gradient_norm = 0.0;
  bool converged = false;
  // Mean empirical loss after each iterate, when requested.
  std::vector<double> objective_trace;
};

// Weiszfeld fixed-point iteration for the empirical geometric quantile in
// direction v:
//   h <- (sum_i x_i / ||x_i - h|| + N v) / (sum_i 1 / ||x_i - h||).
// An iterate landing on a data point stops if that point satisfies the
// subgradient optimality condition and is otherwise nudged by
// 1e-9 (1 + ||h||) along the descent direction.
OracleResult weiszfeld(const std::vector<Vector>& points, const Vector& v, double tol = kOracleTol,
                       int max_iter = kOracleMaxIter, bool record_trace = false);
OracleResult weiszfeld(const Dataset& dataset, const Vector& v, double tol = kOracleTol,
                       int max_iter = kOracleMaxIter, bool record_trace = false);

// Full-gradient descent on the mean empirical loss with Armijo backtracking
// (halving, slope parameter 1e-4). Starts from `start`, or from the sample
// mean (unlabeled objectives) / zero (regressions).
OracleResult batch_gd(const Objective& objective, const Dataset& dataset, double tol = kOracleTol,
                      int max_iter = kOracleMaxIter, std::optional<Vector> start = std::nullopt,
                      std::size_t threads = 1);

enum class GroundTruthMode { kAnalytic, kEmpirical };
std::string to_string(GroundTruthMode mode);
GroundTruthMode parse_ground_truth_mode(const std::string& name);

struct GroundTruthOptions {
  GroundTruthMode mode = GroundTruthMode::kAnalytic;
  std::uint64_t n_oracle = 1000000;
  std::uint64_t seed = 0;
  double tol = kOracleTol;
  int max_iter = kOracleMaxIter;
  std::size_t threads = 1;
};

struct GroundTruth {
  Vector m;
  GroundTruthMode mode = GroundTruthMode::kAnalytic;
  std::optional<OracleResult> oracle;
  std::uint64_t n_oracle = 0;
  double tol = 0.0;
};

// Analytic mode: m_true for the quadratic, the center for a geometric median
// of a centrally symmetric law; ConfigError otherwise. Empirical mode:
// freezes n_oracle draws from the oracle stream and solves the empirical
// problem (Weiszfeld for geometric quantiles, batch_gd otherwise).
GroundTruth ground_truth(const Objective& objective, const DistributionSpec& spec,
                         const GroundTruthOptions& options);

nlohmann::json to_json(const OracleResult& result);
nlohmann::json to_json(const GroundTruth& truth);

}  // namespace asgd
