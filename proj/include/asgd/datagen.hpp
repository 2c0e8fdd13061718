#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "asgd/linalg.hpp"
#include "asgd/rng.hpp"
#include "asgd/sample.hpp"

namespace asgd {

enum class Family {
  kGaussian,
  kStudentT,
  kMixture,
  kSphereUniform,
  kKlBrownian,
  kTeacherLogistic,
  kTeacherCosh,
};

std::string to_string(Family family);
Family parse_family(const std::string& name);

struct MixtureComponent {
  double weight = 1.0;
  Vector center;
  double scale = 1.0;
};

// Parameters used per family:
//   gaussian        center + scale * N(0, I)
//   student_t       center + scale * multivariate t with `dof` > 2
//   mixture         Gaussian components (weights sum to 1)
//   sphere_uniform  center + radius * uniform direction
//   kl_brownian     center + (xi_k / ((k - 1/2) pi))_{k=1..terms}
//   teacher_*       x = center + scale * N(0, I) in dim(teacher),
//                   y = sign(<x, teacher>) flipped with prob. label_noise
struct DistributionSpec {
  Family family = Family::kGaussian;
  Vector center;
  double scale = 1.0;
  double dof = 0.0;
  double radius = 1.0;
  std::vector<MixtureComponent> components;
  std::size_t terms = 0;
  Vector teacher;
  double label_noise = 0.0;

  // Throws ConfigError on violated invariants. Fills center with zeros
  // where it is optional and omitted.
  void validate();
  std::size_t dim() const;
  bool labeled() const;
  // True when X is symmetric about `center` (so every geometric median is the center).
  bool centrally_symmetric() const;
};

// Parses keys family, center, scale, dof, radius, weights, centers, scales,
// terms, teacher, label_noise. Unknown keys are errors. Lists are
// comma-separated; mixture centers are separated by '|'.
DistributionSpec parse_distribution(const std::map<std::string, std::string>& params);
// Canonical key/value form accepted by parse_distribution.
std::map<std::string, std::string> distribution_params(const DistributionSpec& spec);

// Single-owner stream of i.i.d. draws from a distribution.
class Sampler {
 public:
  Sampler(DistributionSpec spec, CounterRng rng);

  void draw(Sample& out);
  Sample operator()();

  const DistributionSpec& spec() const { return spec_; }

 private:
  double normal() { return normal_(rng_); }

  DistributionSpec spec_;
  CounterRng rng_;
  std::normal_distribution<double> normal_;
  std::vector<double> cumulative_weights_;
};

// n draws from the dataset stream of `seed`. Requires 1 <= n <= 1e8 / dim.
Dataset freeze(const DistributionSpec& spec, std::uint64_t n, std::uint64_t seed,
               std::uint64_t stream = kDatasetStream);

// CSV with a one-line '#' header holding family, parameters, seed and n,
// then one row per sample: x_1..x_d[,y].
std::string dataset_to_csv(const DistributionSpec& spec, std::uint64_t seed, const Dataset& data);

struct LoadedDataset {
  DistributionSpec spec;
  std::uint64_t seed = 0;
  Dataset data;
};
LoadedDataset dataset_from_csv(const std::string& text);

}  // namespace asgd
