#include "asgd/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "asgd/parallel.hpp"
#include "asgd/rng.hpp"

namespace asgd {

namespace {

Dataset mc_sample(const DistributionSpec& spec, std::size_t n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw ConfigError("n_mc must be >= 1");
  return freeze(spec, n_mc, seed, kAssumptionStream);
}

void check_inputs(const Objective& objective, const DistributionSpec& spec, const Vector& m) {
  if (spec.dim() != objective.dim()) throw DimensionMismatch(spec.dim(), objective.dim());
  check_same_dim(m, Vector(objective.dim()));
  if (spec.labeled() != objective.labeled()) throw ConfigError("distribution labels do not match the objective");
}

// MC mean of g(X, h) - g(X, m) together with the mean and second moment of
// the projected ratio <g(X,h) - g(X,m), h - m> / ||h - m||^2.
struct DifferenceSums {
  Vector sum;
  double ratio_sum = 0.0;
  double ratio_sq_sum = 0.0;
  std::size_t used = 0;
};

DifferenceSums difference_sums(const Objective& objective, const Dataset& data, const Vector& h,
                               const Vector& m, std::size_t threads) {
  const std::size_t d = h.size();
  const Vector delta = h - m;
  const double delta2 = inner(delta, delta);
  return reduce_blocks<DifferenceSums>(
      data.size(), threads,
      [&](std::size_t begin, std::size_t end) {
        DifferenceSums acc{Vector(d), 0.0, 0.0, 0};
        Vector gh(d), gm(d);
        for (std::size_t k = begin; k < end; ++k) {
          if (!objective.gradient(data[k], h, gh) || !objective.gradient(data[k], m, gm)) continue;
          double proj = 0.0;
          for (std::size_t i = 0; i < d; ++i) {
            const double diff = gh[i] - gm[i];
            acc.sum[i] += diff;
            proj += diff * delta[i];
          }
          const double r = proj / delta2;
          acc.ratio_sum += r;
          acc.ratio_sq_sum += r * r;
          ++acc.used;
        }
        return acc;
      },
      [](DifferenceSums& a, const DifferenceSums& b) {
        a.sum += b.sum;
        a.ratio_sum += b.ratio_sum;
        a.ratio_sq_sum += b.ratio_sq_sum;
        a.used += b.used;
      });
}

double mean_stderr(double sum, double sq_sum, std::size_t n) {
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, (sq_sum - nn * mean * mean) / (nn - 1.0));
  return std::sqrt(var / nn);
}

}  // namespace

std::vector<Vector> probe_points(const Vector& m, const ProbeOptions& options) {
  if (!(options.radius > 0.0)) throw ConfigError("probe radius must be positive");
  if (options.n_probes < 1) throw ConfigError("need at least one probe");
  const std::size_t d = m.size();
  CounterRng rng(options.seed, kAssumptionStream + 1);
  std::normal_distribution<double> normal;
  std::vector<Vector> probes;
  probes.reserve(options.n_probes);
  for (std::size_t i = 0; i < options.n_probes; ++i) {
    const double exponent =
        options.n_probes == 1 ? 0.0 : -3.0 + 3.0 * static_cast<double>(i) / static_cast<double>(options.n_probes - 1);
    const double r = options.radius * std::pow(10.0, exponent);
    Vector u(d);
    if (i < d) {
      u[i] = 1.0;
    } else {
      double n2 = 0.0;
      while (n2 == 0.0) {
        for (auto& c : u) c = normal(rng);
        n2 = inner(u, u);
      }
      u *= 1.0 / std::sqrt(n2);
    }
    probes.push_back(axpy(r, u, m));
  }
  return probes;
}

StrongConvexityResult check_strong_convexity(const Objective& objective, const DistributionSpec& spec,
                                             const Vector& m, const ProbeOptions& options) {
  check_inputs(objective, spec, m);
  const auto probes = probe_points(m, options);
  const bool exact = objective.exact_population_gradient(m).has_value();
  const Dataset data = exact ? Dataset{} : mc_sample(spec, options.n_mc, options.seed);

  StrongConvexityResult out;
  out.ratio_min = std::numeric_limits<double>::infinity();
  for (const auto& h : probes) {
    const Vector delta = h - m;
    const double delta2 = inner(delta, delta);
    RatioProbe p;
    p.distance = std::sqrt(delta2);
    if (exact) {
      p.ratio = inner(*objective.exact_population_gradient(h), delta) / delta2;
    } else {
      const auto s = difference_sums(objective, data, h, m, options.threads);
      if (s.used == 0) throw AllDegenerate("no usable MC sample at probe");
      p.ratio = s.ratio_sum / static_cast<double>(s.used);
      p.std_error = mean_stderr(s.ratio_sum, s.ratio_sq_sum, s.used);
    }
    if (p.ratio < out.ratio_min) {
      out.ratio_min = p.ratio;
      out.ratio_min_stderr = p.std_error;
    }
    out.probes.push_back(p);
  }
  return out;
}

TaylorRemainderResult check_taylor_remainder(const Objective& objective, const DistributionSpec& spec,
                                             const Vector& m, const ProbeOptions& options) {
  check_inputs(objective, spec, m);
  const auto probes = probe_points(m, options);
  const bool exact = objective.exact_population_gradient(m).has_value();
  const Dataset data = exact ? Dataset{} : mc_sample(spec, options.n_mc, options.seed);
  const SymOperator hessian = exact ? *objective.exact_hessian() : empirical_hessian(objective, m, data, options.threads);

  TaylorRemainderResult out;
  for (const auto& h : probes) {
    const Vector delta = h - m;
    const double delta2 = inner(delta, delta);
    Vector grad;
    if (exact) {
      grad = *objective.exact_population_gradient(h);
    } else {
      auto s = difference_sums(objective, data, h, m, options.threads);
      if (s.used == 0) throw AllDegenerate("no usable MC sample at probe");
      grad = (1.0 / static_cast<double>(s.used)) * std::move(s.sum);
    }
    RemainderProbe p;
    p.distance = std::sqrt(delta2);
    p.remainder = norm(grad - hessian.apply(delta)) / delta2;
    out.remainder_max = std::max(out.remainder_max, p.remainder);
    out.probes.push_back(p);
  }
  return out;
}

GradientMomentResult check_gradient_moments(const Objective& objective, const DistributionSpec& spec,
                                            int q, const Vector& m, const std::vector<Vector>& probes,
                                            std::size_t n_mc, std::uint64_t seed, std::size_t threads) {
  if (q < 1) throw ConfigError("moment order q must be >= 1");
  check_inputs(objective, spec, m);
  const Dataset data = mc_sample(spec, n_mc, seed);
  const std::size_t d = m.size();

  GradientMomentResult out;
  out.q = q;
  for (const auto& h : probes) {
    check_same_dim(h, m);
    struct Acc {
      double sum = 0.0;
      double sq_sum = 0.0;
      std::size_t used = 0;
    };
    const Acc acc = reduce_blocks<Acc>(
        data.size(), threads,
        [&](std::size_t begin, std::size_t end) {
          Acc a;
          Vector g(d);
          for (std::size_t k = begin; k < end; ++k) {
            if (!objective.gradient(data[k], h, g)) continue;
            const double value = std::pow(inner(g, g), q);
            a.sum += value;
            a.sq_sum += value * value;
            ++a.used;
          }
          return a;
        },
        [](Acc& a, const Acc& b) {
          a.sum += b.sum;
          a.sq_sum += b.sq_sum;
          a.used += b.used;
        });
    if (acc.used == 0) throw AllDegenerate("no usable MC sample at probe");
    MomentProbe p;
    p.h = h;
    p.distance = distance(h, m);
    p.moment = acc.sum / static_cast<double>(acc.used);
    p.std_error = mean_stderr(acc.sum, acc.sq_sum, acc.used);
    out.probes.push_back(std::move(p));
  }

  std::vector<const MomentProbe*> usable;
  for (const auto& p : out.probes) {
    if (p.distance > 0.0 && p.moment > 0.0) usable.push_back(&p);
  }
  std::sort(usable.begin(), usable.end(), [](auto* a, auto* b) { return a->distance < b->distance; });
  usable.erase(usable.begin(), usable.begin() + static_cast<std::ptrdiff_t>(usable.size() / 2));
  if (usable.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (auto* p : usable) {
      mx += std::log(p->distance);
      my += std::log(p->moment);
    }
    mx /= static_cast<double>(usable.size());
    my /= static_cast<double>(usable.size());
    double sxx = 0.0, sxy = 0.0;
    for (auto* p : usable) {
      const double dx = std::log(p->distance) - mx;
      sxx += dx * dx;
      sxy += dx * (std::log(p->moment) - my);
    }
    if (sxx > 0.0) out.growth_exponent = sxy / sxx;
  }
  return out;
}

ConvexityReport run_convexity_checks(const Objective& objective, const DistributionSpec& spec,
                                     const Vector& m, const ProbeOptions& options,
                                     const std::vector<int>& moment_orders) {
  check_inputs(objective, spec, m);
  ConvexityReport report;
  report.n_probes = options.n_probes;
  report.n_mc = options.n_mc;
  report.radius = options.radius;

  SymOperator hessian;
  if (auto exact = objective.exact_hessian()) {
    hessian = *exact;
  } else {
    hessian = empirical_hessian(objective, m, mc_sample(spec, options.n_mc, options.seed), options.threads);
  }
  const auto eig = extreme_eigenvalues(hessian, 1e-10);
  report.lambda_min_hat = eig.lambda_min;
  report.lambda_max_hat = eig.lambda_max;

  const auto convexity = check_strong_convexity(objective, spec, m, options);
  report.ratio_min = convexity.ratio_min;
  report.ratio_min_stderr = convexity.ratio_min_stderr;
  report.ratio_profile = convexity.probes;

  const auto remainder = check_taylor_remainder(objective, spec, m, options);
  report.remainder_max = remainder.remainder_max;
  report.remainder_profile = remainder.probes;

  const auto probes = probe_points(m, options);
  for (int q : moment_orders) {
    report.moments.push_back(
        check_gradient_moments(objective, spec, q, m, probes, options.n_mc, options.seed, options.threads));
  }
  return report;
}

nlohmann::json to_json(const ConvexityReport& report) {
  nlohmann::json ratio = nlohmann::json::array();
  for (const auto& p : report.ratio_profile) {
    ratio.push_back({{"distance", p.distance}, {"ratio", p.ratio}, {"stderr", p.std_error}});
  }
  nlohmann::json remainder = nlohmann::json::array();
  for (const auto& p : report.remainder_profile) {
    remainder.push_back({{"distance", p.distance}, {"remainder", p.remainder}});
  }
  nlohmann::json moments = nlohmann::json::array();
  for (const auto& m : report.moments) {
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& p : m.probes) {
      probes.push_back({{"h", p.h.coords()}, {"distance", p.distance}, {"moment", p.moment}, {"stderr", p.std_error}});
    }
    nlohmann::json entry = {{"q", m.q}, {"probes", probes}};
    entry["growth_exponent"] = m.growth_exponent ? nlohmann::json(*m.growth_exponent) : nlohmann::json(nullptr);
    moments.push_back(entry);
  }
  return {
      {"lambda_min_hat", report.lambda_min_hat},
      {"lambda_max_hat", report.lambda_max_hat},
      {"ratio_min", report.ratio_min},
      {"ratio_min_stderr", report.ratio_min_stderr},
      {"remainder_max", report.remainder_max},
      {"n_probes", report.n_probes},
      {"n_mc", report.n_mc},
      {"radius", report.radius},
      {"ratio_profile", ratio},
      {"remainder_profile", remainder},
      {"gradient_moments", moments},
  };
}

}  // namespace asgd
