#include <doctest.h>

#include <cmath>

#include "asgd/assumptions.hpp"
#include "asgd/datagen.hpp"

using namespace asgd;

namespace {

DistributionSpec gaussian(Vector center, double scale = 1.0) {
  DistributionSpec spec;
  spec.family = Family::kGaussian;
  spec.center = std::move(center);
  spec.scale = scale;
  spec.validate();
  return spec;
}

DistributionSpec sphere(double r) {
  DistributionSpec spec;
  spec.family = Family::kSphereUniform;
  spec.center = Vector{0, 0, 0};
  spec.radius = r;
  spec.validate();
  return spec;
}

}  // namespace

TEST_CASE("probe geometry") {
  ProbeOptions opts;
  opts.radius = 2.0;
  opts.n_probes = 7;
  const Vector m{1, -1, 0};
  const auto probes = probe_points(m, opts);
  REQUIRE(probes.size() == 7);
  CHECK(distance(probes.front(), m) == doctest::Approx(2e-3));
  CHECK(distance(probes.back(), m) == doctest::Approx(2.0));
  for (std::size_t k = 1; k < probes.size(); ++k) CHECK(distance(probes[k], m) > distance(probes[k - 1], m));
  // first probes run along the axes
  const Vector first = probes[0] - m;
  CHECK(first[1] == 0.0);
  CHECK(first[2] == 0.0);
  CHECK(probe_points(m, opts) == probes);
}

TEST_CASE("quadratic checks are exact") {
  const Vector m{0.5, -1};
  const Objective quad(QuadraticObjective(m, 1.0));
  const auto spec = gaussian(m);
  ProbeOptions opts;
  opts.radius = 3.0;
  opts.n_mc = 1000;
  const auto sc = check_strong_convexity(quad, spec, m, opts);
  for (const auto& p : sc.probes) CHECK(std::abs(p.ratio - 1.0) <= 1e-10);
  CHECK(std::abs(sc.ratio_min - 1.0) <= 1e-10);
  CHECK(check_taylor_remainder(quad, spec, m, opts).remainder_max <= 1e-10);
}

TEST_CASE("quadratic gradient moments") {
  const Vector m{0, 0, 0};
  const double sigma = 1.5;
  const Objective quad(QuadraticObjective(m, sigma));
  const auto spec = gaussian(m, sigma);

  const auto at_m = check_gradient_moments(quad, spec, 1, m, {m}, 200000, 3);
  REQUIRE(at_m.probes.size() == 1);
  const double target = sigma * sigma * 3;
  CHECK(std::abs(at_m.probes[0].moment - target) <= 3.0 * at_m.probes[0].std_error);

  // far from m the moment grows like ||h - m||^{2q}
  ProbeOptions far;
  far.radius = 1000.0;
  far.n_probes = 12;
  const auto probes = probe_points(m, far);
  for (int q : {1, 2}) {
    const auto res = check_gradient_moments(quad, spec, q, m, probes, 20000, 3);
    REQUIRE(res.growth_exponent.has_value());
    CHECK(*res.growth_exponent == doctest::Approx(2.0 * q).epsilon(0.02));
  }
  // q = 1: sigma^2 d + ||h - m||^2
  const auto mid = check_gradient_moments(quad, spec, 1, m, {Vector{2, 0, 0}}, 200000, 4);
  CHECK(std::abs(mid.probes[0].moment - (target + 4.0)) <= 3.0 * mid.probes[0].std_error);
}

TEST_CASE("geometric quantile moments stay below 2^{2q}") {
  const auto spec = gaussian({1, 1, 1, 1});
  const Objective quantile(GeometricQuantileObjective(Vector{0.4, 0, -0.3, 0.5}));
  ProbeOptions opts;
  opts.radius = 5.0;
  const auto probes = probe_points(spec.center, opts);
  for (int q : {1, 2, 3}) {
    const auto res = check_gradient_moments(quantile, spec, q, spec.center, probes, 20000, 5);
    for (const auto& p : res.probes) CHECK(p.moment <= std::pow(2.0, 2 * q));
  }
}

TEST_CASE("sphere median strong convexity near m") {
  const double r = 2.0;
  const auto spec = sphere(r);
  const Objective median(GeometricQuantileObjective(Vector(3)));
  ProbeOptions opts;
  opts.radius = 0.2;
  opts.n_probes = 4;
  opts.n_mc = 400000;
  const auto sc = check_strong_convexity(median, spec, spec.center, opts);
  // the closest probe sits at 2e-4 from m
  CHECK(sc.probes.front().ratio == doctest::Approx(2.0 / (3.0 * r)).epsilon(0.1));
  CHECK(sc.ratio_min > 0.0);

  // bounded gradients: the ratio decays at large radius
  ProbeOptions wide = opts;
  wide.radius = 100.0 * r;
  wide.n_probes = 1;
  ProbeOptions narrow = opts;
  narrow.radius = r;
  narrow.n_probes = 1;
  CHECK(check_strong_convexity(median, spec, spec.center, wide).ratio_min <=
        check_strong_convexity(median, spec, spec.center, narrow).ratio_min);
}

TEST_CASE("Taylor remainder is stable under MC refinement") {
  const auto spec = gaussian({0, 0, 0});
  const Objective median(GeometricQuantileObjective(Vector(3)));
  ProbeOptions opts;
  opts.radius = 1.0;
  opts.n_probes = 6;
  opts.n_mc = 200000;
  const double a = check_taylor_remainder(median, spec, spec.center, opts).remainder_max;
  opts.n_mc *= 2;
  const double b = check_taylor_remainder(median, spec, spec.center, opts).remainder_max;
  CHECK(std::isfinite(a));
  CHECK(b == doctest::Approx(a).epsilon(0.2));
}

TEST_CASE("full report") {
  const auto spec = gaussian({1, 2});
  const Objective median(GeometricQuantileObjective(Vector(2)));
  ProbeOptions opts;
  opts.n_mc = 20000;
  opts.n_probes = 5;
  opts.seed = 3;
  const auto report = run_convexity_checks(median, spec, spec.center, opts, {1, 2});
  CHECK(report.lambda_min_hat > 0.0);
  CHECK(report.lambda_max_hat >= report.lambda_min_hat);
  CHECK(report.ratio_min > 0.0);
  CHECK(std::isfinite(report.remainder_max));
  CHECK(report.n_probes == 5);
  CHECK(report.moments.size() == 2);
  const auto j = to_json(report);
  CHECK(j["ratio_profile"].size() == 5);
  CHECK(j["gradient_moments"].size() == 2);

  opts.threads = 3;
  const auto threaded = run_convexity_checks(median, spec, spec.center, opts, {1, 2});
  CHECK(to_json(threaded) == j);
}
