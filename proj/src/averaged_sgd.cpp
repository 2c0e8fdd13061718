#include "asgd/averaged_sgd.hpp"

#include <cmath>
#include <iostream>

namespace asgd {

void StepSchedule::validate() const {
  if (!(c_gamma > 0.0) || !std::isfinite(c_gamma)) throw ConfigError("c_gamma must be finite and > 0");
  if (alpha == 1.0) {
    if (!allow_alpha_one) throw ConfigError("alpha = 1 requires allow_alpha_one");
    std::cerr << "warning: alpha = 1 is outside (1/2, 1); rates need c_gamma > 1/lambda_min\n";
    return;
  }
  if (!(alpha > 0.5 && alpha < 1.0)) throw ConfigError("alpha must lie in (1/2, 1)");
}

double step_size(const StepSchedule& sched, std::uint64_t n) {
  return sched.c_gamma * std::pow(static_cast<double>(n), -sched.alpha);
}

namespace {

// Shared update: z -= gamma * grad (unless degenerate), then the average.
bool advance(EstimatorState& state, const StepSchedule& sched, const Objective& objective,
             const Sample& sample, Vector& grad) {
  if (sample.x.size() != state.z.size()) throw DimensionMismatch(sample.x.size(), state.z.size());
  const bool moved = objective.gradient(sample, state.z, grad);
  const std::size_t d = state.z.size();
  if (moved) {
    const double gamma = step_size(sched, state.n);
    for (std::size_t i = 0; i < d; ++i) state.z[i] -= gamma * grad[i];
  }
  const double weight = 1.0 / static_cast<double>(state.n + 1);
  bool finite = true;
  for (std::size_t i = 0; i < d; ++i) {
    state.z_bar[i] += weight * (state.z[i] - state.z_bar[i]);
    finite = finite && std::isfinite(state.z[i]) && std::isfinite(state.z_bar[i]);
  }
  ++state.n;
  if (!finite) throw NonFiniteIterate(state.n);
  return moved;
}

}  // namespace

EstimatorState init(const Objective& objective, const Sample& first_sample, double clip_radius) {
  EstimatorState state;
  state.n = 1;
  state.z = objective.initial_point(first_sample, clip_radius);
  state.z_bar = state.z;
  return state;
}

EstimatorState step(EstimatorState state, const StepSchedule& sched, const Objective& objective,
                    const Sample& sample) {
  Vector grad(state.z.size());
  advance(state, sched, objective, sample, grad);
  return state;
}

AveragedSgd::AveragedSgd(Objective objective, StepSchedule sched, double clip_radius, bool zero_init)
    : objective_(std::move(objective)),
      sched_(sched),
      clip_radius_(clip_radius),
      zero_init_(zero_init),
      grad_(objective_.dim()) {
  sched_.validate();
  if (!(clip_radius_ > 0.0)) throw ConfigError("clip radius must be positive");
}

void AveragedSgd::init(const Sample& first_sample) {
  if (zero_init_) {
    state_ = EstimatorState{1, Vector(objective_.dim()), Vector(objective_.dim())};
  } else {
    state_ = asgd::init(objective_, first_sample, clip_radius_);
  }
}

bool AveragedSgd::step(const Sample& sample) {
  if (state_.n == 0) throw Error("estimator stepped before init");
  return advance(state_, sched_, objective_, sample, grad_);
}

std::vector<Snapshot> run_stream(const Objective& objective, const StepSchedule& sched,
                                 const SampleSource& source, std::uint64_t n_max,
                                 const std::vector<std::uint64_t>& checkpoints,
                                 const StreamOptions& options) {
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > n_max) throw ConfigError("checkpoint outside [1, n_max]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) throw ConfigError("checkpoints must be strictly increasing");
  }

  AveragedSgd estimator(objective, sched, options.clip_radius, options.zero_init);
  std::vector<Snapshot> trajectory;
  trajectory.reserve(checkpoints.size());
  auto next_checkpoint = checkpoints.begin();
  auto record = [&] {
    const auto& s = estimator.state();
    if (next_checkpoint != checkpoints.end() && *next_checkpoint == s.n) {
      trajectory.push_back(Snapshot{s.n, s.z, s.z_bar});
      ++next_checkpoint;
    }
  };

  Sample sample{Vector(objective.dim()), 0.0};
  source(sample);
  estimator.init(sample);
  record();
  for (std::uint64_t n = 1; n < n_max; ++n) {
    source(sample);
    estimator.step(sample);
    record();
  }
  return trajectory;
}

}  // namespace asgd
