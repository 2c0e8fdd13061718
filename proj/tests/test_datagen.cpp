#include <doctest.h>

#include <cmath>
#include <numbers>

#include "asgd/datagen.hpp"
#include "asgd/io.hpp"

using namespace asgd;

namespace {

DistributionSpec parse(std::map<std::string, std::string> params) { return parse_distribution(params); }

struct Moments {
  Vector mean;
  Vector var;
};

Moments moments(const Dataset& data) {
  const std::size_t d = data.front().x.size();
  Moments m{Vector(d), Vector(d)};
  for (const auto& s : data) m.mean += s.x;
  m.mean *= 1.0 / data.size();
  for (const auto& s : data)
    for (std::size_t i = 0; i < d; ++i) m.var[i] += (s.x[i] - m.mean[i]) * (s.x[i] - m.mean[i]);
  m.var *= 1.0 / (data.size() - 1);
  return m;
}

}  // namespace

TEST_CASE("gaussian draws have the right mean and variance") {
  const auto spec = parse({{"family", "gaussian"}, {"center", "1,-2,0.5"}, {"scale", "2"}});
  const std::size_t n = 1000000;
  const auto m = moments(freeze(spec, n, 1));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(m.mean[i] - spec.center[i]) <= 4.0 * 2.0 / std::sqrt(double(n)));
    // Var of the sample variance of N(0, s^2) is 2 s^4 / n
    CHECK(std::abs(m.var[i] - 4.0) <= 4.0 * std::sqrt(2.0 * 16.0 / n));
  }
}

TEST_CASE("student t second moments") {
  const auto spec = parse({{"family", "student_t"}, {"center", "0,3"}, {"scale", "1"}, {"dof", "7"}});
  const auto m = moments(freeze(spec, 1000000, 2));
  const double var = 7.0 / 5.0;
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(m.mean[i] - spec.center[i]) <= 4.0 * std::sqrt(var / 1e6));
    CHECK(m.var[i] == doctest::Approx(var).epsilon(0.02));
  }
  CHECK_THROWS_AS(parse({{"family", "student_t"}, {"center", "0"}, {"dof", "2"}}), ConfigError);
}

TEST_CASE("mixture moments") {
  const auto spec = parse({{"family", "mixture"},
                           {"weights", "0.25,0.75"},
                           {"centers", "-2,0|2,1"},
                           {"scales", "1,0.5"}});
  CHECK(spec.dim() == 2);
  const auto m = moments(freeze(spec, 1000000, 3));
  // mean = sum w c, variance = sum w (s^2 + c^2) - mean^2
  const double mean0 = 0.25 * -2 + 0.75 * 2;
  const double var0 = 0.25 * (1 + 4) + 0.75 * (0.25 + 4) - mean0 * mean0;
  CHECK(std::abs(m.mean[0] - mean0) <= 4.0 * std::sqrt(var0 / 1e6));
  CHECK(m.var[0] == doctest::Approx(var0).epsilon(0.01));
  CHECK_THROWS_AS(parse({{"family", "mixture"}, {"weights", "0.5,0.6"}, {"centers", "0|1"}, {"scales", "1,1"}}),
                  ConfigError);
}

TEST_CASE("sphere draws lie on the sphere") {
  const auto spec = parse({{"family", "sphere_uniform"}, {"center", "1,1,1,1"}, {"radius", "2.5"}});
  const auto data = freeze(spec, 10000, 4);
  for (const auto& s : data) REQUIRE(std::abs(distance(s.x, spec.center) - 2.5) <= 1e-12);
  const auto m = moments(data);
  for (std::size_t i = 0; i < 4; ++i) CHECK(m.var[i] == doctest::Approx(2.5 * 2.5 / 4).epsilon(0.05));
}

TEST_CASE("Karhunen-Loeve coefficient variances") {
  const auto spec = parse({{"family", "kl_brownian"}, {"terms", "6"}});
  CHECK(spec.dim() == 6);
  const auto m = moments(freeze(spec, 1000000, 5));
  for (std::size_t k = 1; k <= 6; ++k) {
    const double lambda = 1.0 / ((k - 0.5) * std::numbers::pi * (k - 0.5) * std::numbers::pi);
    CHECK(m.var[k - 1] == doctest::Approx(lambda).epsilon(0.05));
  }
  // E ||X||^2 = sum of eigenvalues, 1/2 in the untruncated limit
  double total = 0.0;
  for (std::size_t k = 0; k < 6; ++k) total += m.var[k];
  CHECK(total < 0.5);
  CHECK(total > 0.45);
}

TEST_CASE("teacher labels") {
  const auto clean = parse({{"family", "teacher_logistic"}, {"teacher", "1,-2,0.5"}});
  CHECK(clean.labeled());
  for (const auto& s : freeze(clean, 5000, 6)) {
    const double score = inner(s.x, clean.teacher);
    REQUIRE(s.label == (score >= 0 ? 1.0 : -1.0));
  }
  const auto noisy =
      parse({{"family", "teacher_cosh"}, {"teacher", "1,-2,0.5"}, {"label_noise", "0.2"}});
  std::size_t flipped = 0;
  const auto data = freeze(noisy, 100000, 6);
  for (const auto& s : data) flipped += s.label != (inner(s.x, noisy.teacher) >= 0 ? 1.0 : -1.0);
  CHECK(std::abs(flipped / 1e5 - 0.2) <= 4.0 * std::sqrt(0.16 / 1e5));
  CHECK_THROWS_AS(parse({{"family", "teacher_cosh"}, {"teacher", "1"}, {"label_noise", "0.5"}}), ConfigError);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(parse({{"family", "gaussian"}, {"center", "1,2"}, {"scale", "0"}}), ConfigError);
  CHECK_THROWS_AS(parse({{"family", "gaussian"}, {"center", "1,2"}, {"bogus", "1"}}), ConfigError);
  CHECK_THROWS_AS(parse({{"family", "cauchy"}}), ConfigError);
  CHECK_THROWS_AS(parse({{"family", "sphere_uniform"}, {"center", "0,0"}, {"radius", "-1"}}), ConfigError);
  CHECK(parse({{"family", "gaussian"}, {"center", "0,0"}}).centrally_symmetric());
  CHECK_FALSE(parse({{"family", "teacher_logistic"}, {"teacher", "1"}}).centrally_symmetric());
}

TEST_CASE("freeze is deterministic and equals the stream") {
  const auto spec = parse({{"family", "gaussian"}, {"center", "0,0,0"}});
  const auto a = freeze(spec, 5, 9), b = freeze(spec, 5, 9);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(a[i].x == b[i].x);
  CHECK_THROWS_AS(freeze(spec, 0, 9), ConfigError);
  CHECK_THROWS_AS(freeze(spec, 100000000, 9), ConfigError);

  Sampler stream(spec, CounterRng(9, kDatasetStream));
  const auto frozen = freeze(spec, 1000, 9);
  Vector frozen_mean(3), stream_mean(3);
  for (const auto& s : frozen) frozen_mean += s.x;
  for (std::size_t i = 0; i < 1000; ++i) stream_mean += stream().x;
  CHECK(frozen_mean == stream_mean);
}

TEST_CASE("CSV round trip") {
  for (const auto& spec :
       {parse({{"family", "student_t"}, {"center", "0.1,-3"}, {"dof", "4.5"}, {"scale", "0.3"}}),
        parse({{"family", "teacher_logistic"}, {"teacher", "1,2"}, {"label_noise", "0.1"}}),
        parse({{"family", "mixture"}, {"weights", "0.5,0.5"}, {"centers", "0|1"}, {"scales", "1,2"}})}) {
    const auto data = freeze(spec, 50, 31);
    const auto loaded = dataset_from_csv(dataset_to_csv(spec, 31, data));
    CHECK(loaded.seed == 31);
    CHECK(distribution_params(loaded.spec) == distribution_params(spec));
    REQUIRE(loaded.data.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      CHECK(loaded.data[i].x == data[i].x);
      CHECK(loaded.data[i].label == data[i].label);
    }
  }
  CHECK_THROWS_AS(dataset_from_csv("1,2\n3,4\n"), ConfigError);
}
