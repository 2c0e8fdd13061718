#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "asgd/linalg.hpp"
#include "asgd/objectives.hpp"
#include "asgd/sample.hpp"

namespace asgd {

inline constexpr double kDefaultCGamma = 1.0;
inline constexpr double kDefaultAlpha = 2.0 / 3.0;
inline constexpr double kDefaultClipRadius = 1e4;

// gamma_n = c_gamma * n^(-alpha), alpha in (1/2, 1). alpha = 1 needs
// allow_alpha_one and emits a warning on stderr at validation.
struct StepSchedule {
  double c_gamma = kDefaultCGamma;
  double alpha = kDefaultAlpha;
  bool allow_alpha_one = false;

  void validate() const;
};

double step_size(const StepSchedule& sched, std::uint64_t n);

// (n, Z_n, Zbar_n) of the coupled recursions.
struct EstimatorState {
  std::uint64_t n = 0;
  Vector z;
  Vector z_bar;
};

EstimatorState init(const Objective& objective, const Sample& first_sample,
                    double clip_radius = kDefaultClipRadius);

// Z_{n+1} = Z_n - gamma_n grad g(sample, Z_n)
// Zbar_{n+1} = Zbar_n + (Z_{n+1} - Zbar_n)/(n+1)
// A degenerate gradient leaves Z unchanged; n and the average still advance.
EstimatorState step(EstimatorState state, const StepSchedule& sched, const Objective& objective,
                    const Sample& sample);

// Streaming form of init/step with a reusable gradient buffer.
class AveragedSgd {
 public:
  AveragedSgd(Objective objective, StepSchedule sched, double clip_radius = kDefaultClipRadius,
              bool zero_init = false);

  void init(const Sample& first_sample);
  // Returns false when the gradient was degenerate and the iterate held.
  bool step(const Sample& sample);

  const EstimatorState& state() const { return state_; }
  const Objective& objective() const { return objective_; }
  const StepSchedule& schedule() const { return sched_; }

 private:
  Objective objective_;
  StepSchedule sched_;
  double clip_radius_;
  bool zero_init_;
  EstimatorState state_;
  Vector grad_;
};

struct Snapshot {
  std::uint64_t n = 0;
  Vector z;
  Vector z_bar;
};

using SampleSource = std::function<void(Sample&)>;

struct StreamOptions {
  double clip_radius = kDefaultClipRadius;
  bool zero_init = false;
};

// Draws exactly n_max samples from `source` (the first initializes Z_1) and
// records the state at each checkpoint. Throws NonFiniteIterate carrying the
// failing n.
std::vector<Snapshot> run_stream(const Objective& objective, const StepSchedule& sched,
                                 const SampleSource& source, std::uint64_t n_max,
                                 const std::vector<std::uint64_t>& checkpoints,
                                 const StreamOptions& options = {});

}  // namespace asgd
