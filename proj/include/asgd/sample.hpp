#pragma once

#include <vector>

#include "asgd/linalg.hpp"

namespace asgd {

// One draw of X, or of (X, Y) for the regression objectives. `label` is 0
// for unlabeled samples and +1/-1 otherwise.
struct Sample {
  Vector x;
  double label = 0.0;
};

using Dataset = std::vector<Sample>;

}  // namespace asgd
