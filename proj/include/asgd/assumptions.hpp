#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "asgd/datagen.hpp"
#include "asgd/linalg.hpp"
#include "asgd/objectives.hpp"

namespace asgd {

// Probes h = m + r u with radii r log-spaced in [1e-3 A, A]; the first
// dim() probes point along the coordinate axes, the rest along uniformly
// random directions from the assumption stream of `seed`.
struct ProbeOptions {
  double radius = 1.0;
  std::size_t n_probes = 12;
  std::size_t n_mc = 100000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

std::vector<Vector> probe_points(const Vector& m, const ProbeOptions& options);

struct RatioProbe {
  double distance = 0.0;
  double ratio = 0.0;
  double std_error = 0.0;
};

struct StrongConvexityResult {
  double ratio_min = 0.0;
  double ratio_min_stderr = 0.0;
  std::vector<RatioProbe> probes;
};

// min over probes of <grad G(h), h - m> / ||h - m||^2. grad G(h) is exact
// where available, otherwise the MC mean of g(X, h) - g(X, m) over a frozen
// sample (the second term has mean grad G(m) = 0 and removes most of the
// noise at small ||h - m||).
StrongConvexityResult check_strong_convexity(const Objective& objective, const DistributionSpec& spec,
                                             const Vector& m, const ProbeOptions& options);

struct RemainderProbe {
  double distance = 0.0;
  double remainder = 0.0;
};

struct TaylorRemainderResult {
  double remainder_max = 0.0;
  std::vector<RemainderProbe> probes;
};

// max over probes of ||grad G(h) - Gamma_m (h - m)|| / ||h - m||^2 with
// Gamma_m estimated once on the same frozen sample (exact for the quadratic).
TaylorRemainderResult check_taylor_remainder(const Objective& objective, const DistributionSpec& spec,
                                             const Vector& m, const ProbeOptions& options);

struct MomentProbe {
  Vector h;
  double distance = 0.0;
  double moment = 0.0;
  double std_error = 0.0;
};

struct GradientMomentResult {
  int q = 1;
  std::vector<MomentProbe> probes;
  // Slope of log(moment) against log ||h - m|| over the farther half of the
  // probes; absent with fewer than two usable probes.
  std::optional<double> growth_exponent;
};

// MC estimate of E ||grad_h g(X, h)||^{2q} at each probe (degenerate samples skipped).
GradientMomentResult check_gradient_moments(const Objective& objective, const DistributionSpec& spec,
                                            int q, const Vector& m, const std::vector<Vector>& probes,
                                            std::size_t n_mc, std::uint64_t seed, std::size_t threads = 1);

struct ConvexityReport {
  double lambda_min_hat = 0.0;
  double lambda_max_hat = 0.0;
  double ratio_min = 0.0;
  double ratio_min_stderr = 0.0;
  double remainder_max = 0.0;
  std::size_t n_probes = 0;
  std::size_t n_mc = 0;
  double radius = 0.0;
  std::vector<RatioProbe> ratio_profile;
  std::vector<RemainderProbe> remainder_profile;
  std::vector<GradientMomentResult> moments;
};

ConvexityReport run_convexity_checks(const Objective& objective, const DistributionSpec& spec,
                                     const Vector& m, const ProbeOptions& options,
                                     const std::vector<int>& moment_orders);

nlohmann::json to_json(const ConvexityReport& report);

}  // namespace asgd
