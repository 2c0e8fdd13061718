#include "asgd/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "asgd/parallel.hpp"

namespace asgd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_label(double y) {
  if (y != 1.0 && y != -1.0) throw ConfigError("label must be -1 or +1");
}

void require_dim(std::size_t expected, const Vector& v) {
  if (v.size() != expected) throw DimensionMismatch(v.size(), expected);
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GeometricQuantileObjective::GeometricQuantileObjective(Vector v) : direction(std::move(v)) {
  if (direction.empty()) throw ConfigError("geometric quantile direction must have dimension >= 1");
  if (!(norm(direction) < 1.0)) throw ConfigError("geometric quantile direction must have norm < 1");
}

QuadraticObjective::QuadraticObjective(Vector m, double s) : m_true(std::move(m)), sigma(s) {
  if (m_true.empty()) throw ConfigError("quadratic objective needs dimension >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("quadratic sigma must be finite and > 0");
}

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kQuadratic: return "quadratic";
    case ObjectiveKind::kGeometricQuantile: return "geometric_quantile";
    case ObjectiveKind::kCoshLogistic: return "cosh_logistic";
    case ObjectiveKind::kLogistic: return "logistic";
  }
  return "unknown";
}

ObjectiveKind parse_objective_kind(const std::string& name) {
  if (name == "quadratic") return ObjectiveKind::kQuadratic;
  if (name == "geometric_quantile" || name == "geometric_median") return ObjectiveKind::kGeometricQuantile;
  if (name == "cosh_logistic") return ObjectiveKind::kCoshLogistic;
  if (name == "logistic") return ObjectiveKind::kLogistic;
  throw ConfigError("unknown objective kind '" + name + "'");
}

ObjectiveKind Objective::kind() const {
  return std::visit(Overloaded{
                        [](const QuadraticObjective&) { return ObjectiveKind::kQuadratic; },
                        [](const GeometricQuantileObjective&) { return ObjectiveKind::kGeometricQuantile; },
                        [](const CoshLogisticObjective&) { return ObjectiveKind::kCoshLogistic; },
                        [](const LogisticObjective&) { return ObjectiveKind::kLogistic; },
                    },
                    impl_);
}

std::size_t Objective::dim() const {
  return std::visit(Overloaded{
                        [](const QuadraticObjective& o) { return o.dim(); },
                        [](const GeometricQuantileObjective& o) { return o.dim(); },
                        [](const CoshLogisticObjective& o) { return o.dim; },
                        [](const LogisticObjective& o) { return o.dim; },
                    },
                    impl_);
}

bool Objective::labeled() const {
  const auto k = kind();
  return k == ObjectiveKind::kCoshLogistic || k == ObjectiveKind::kLogistic;
}

bool Objective::gradient(const Sample& sample, const Vector& h, Vector& out) const {
  const Vector& x = sample.x;
  check_same_dim(x, h);
  if (out.size() != h.size()) out = Vector(h.size());
  const std::size_t d = h.size();
  return std::visit(
      Overloaded{
          [&](const QuadraticObjective&) {
            for (std::size_t i = 0; i < d; ++i) out[i] = h[i] - x[i];
            return true;
          },
          [&](const GeometricQuantileObjective& o) {
            const double dist = distance(x, h);
            if (dist < kDegeneracyThreshold) return false;
            const double inv = 1.0 / dist;
            for (std::size_t i = 0; i < d; ++i) out[i] = -(x[i] - h[i]) * inv - o.direction[i];
            return true;
          },
          [&](const CoshLogisticObjective&) {
            require_label(sample.label);
            const double factor = -stable_tanh(sample.label - dot(x, h));
            for (std::size_t i = 0; i < d; ++i) out[i] = factor * x[i];
            return true;
          },
          [&](const LogisticObjective&) {
            require_label(sample.label);
            const double y = sample.label;
            const double factor = -stable_sigmoid(-y * dot(x, h)) * y;
            for (std::size_t i = 0; i < d; ++i) out[i] = factor * x[i];
            return true;
          },
      },
      impl_);
}

std::optional<Vector> Objective::gradient(const Sample& sample, const Vector& h) const {
  Vector out(h.size());
  if (!gradient(sample, h, out)) return std::nullopt;
  return out;
}

double Objective::loss(const Sample& sample, const Vector& h) const {
  const Vector& x = sample.x;
  check_same_dim(x, h);
  return std::visit(Overloaded{
                        [&](const QuadraticObjective&) { return 0.5 * squared_distance(h, x); },
                        [&](const GeometricQuantileObjective& o) {
                          return distance(x, h) + inner(x - h, o.direction);
                        },
                        [&](const CoshLogisticObjective&) {
                          require_label(sample.label);
                          return log_cosh(sample.label - dot(x, h));
                        },
                        [&](const LogisticObjective&) {
                          require_label(sample.label);
                          return softplus(-sample.label * dot(x, h));
                        },
                    },
                    impl_);
}

Vector Objective::initial_point(const Sample& first, double clip_radius) const {
  if (!(clip_radius > 0.0)) throw ConfigError("clip radius must be positive");
  const std::size_t d = dim();
  if (labeled()) return Vector(d);
  require_dim(d, first.x);
  if (norm(first.x) <= clip_radius) return first.x;
  return Vector(d);
}

std::optional<Vector> Objective::exact_population_gradient(const Vector& h) const {
  if (const auto* q = std::get_if<QuadraticObjective>(&impl_)) return h - q->m_true;
  return std::nullopt;
}

std::optional<SymOperator> Objective::exact_hessian() const {
  if (const auto* q = std::get_if<QuadraticObjective>(&impl_)) return SymOperator::identity(q->dim());
  return std::nullopt;
}

std::optional<Vector> gq_stochastic_gradient(const GeometricQuantileObjective& obj, const Vector& x,
                                             const Vector& h) {
  require_dim(obj.dim(), h);
  return Objective(obj).gradient(Sample{x, 0.0}, h);
}

McGradient gq_population_gradient_mc(const GeometricQuantileObjective& obj, const Vector& h,
                                     const Dataset& samples) {
  require_dim(obj.dim(), h);
  if (samples.empty()) throw ConfigError("empty sample set");
  const std::size_t d = h.size();
  struct Acc {
    Vector sum;
    std::size_t used = 0;
  };
  Acc total = reduce_blocks<Acc>(
      samples.size(), 1,
      [&](std::size_t begin, std::size_t end) {
        Acc acc{Vector(d), 0};
        for (std::size_t k = begin; k < end; ++k) {
          const Vector& x = samples[k].x;
          check_same_dim(x, h);
          const double dist = distance(x, h);
          if (dist < kDegeneracyThreshold) continue;
          for (std::size_t i = 0; i < d; ++i) acc.sum[i] -= (x[i] - h[i]) / dist;
          ++acc.used;
        }
        return acc;
      },
      [](Acc& a, const Acc& b) {
        a.sum += b.sum;
        a.used += b.used;
      });
  if (total.used == 0) throw AllDegenerate("every sample coincides with h");
  McGradient out;
  out.mean = (1.0 / static_cast<double>(total.used)) * std::move(total.sum);
  out.mean -= obj.direction;
  out.used = total.used;
  out.degenerate = samples.size() - total.used;
  return out;
}

SymOperator gq_hessian_mc(const GeometricQuantileObjective& obj, const Vector& h, const Dataset& samples) {
  require_dim(obj.dim(), h);
  if (samples.empty()) throw ConfigError("empty sample set");
  const std::size_t d = h.size();
  struct Acc {
    SymOperator sum;
    std::size_t used = 0;
  };
  Acc total = reduce_blocks<Acc>(
      samples.size(), 1,
      [&](std::size_t begin, std::size_t end) {
        Acc acc{SymOperator(d), 0};
        Vector u(d);
        for (std::size_t k = begin; k < end; ++k) {
          const Vector& x = samples[k].x;
          check_same_dim(x, h);
          const double dist = distance(x, h);
          if (dist < kDegeneracyThreshold) continue;
          for (std::size_t i = 0; i < d; ++i) u[i] = (x[i] - h[i]) / dist;
          acc.sum.add_identity(1.0 / dist);
          acc.sum.add_rank_one(-1.0 / dist, u);
          ++acc.used;
        }
        return acc;
      },
      [](Acc& a, const Acc& b) {
        a.sum += b.sum;
        a.used += b.used;
      });
  if (total.used == 0) throw AllDegenerate("every sample coincides with h");
  total.sum *= 1.0 / static_cast<double>(total.used);
  return total.sum;
}

Vector cosh_stochastic_gradient(const CoshLogisticObjective& obj, const Vector& x, double y,
                                const Vector& h) {
  require_dim(obj.dim, h);
  return *Objective(obj).gradient(Sample{x, y}, h);
}

Vector logistic_stochastic_gradient(const LogisticObjective& obj, const Vector& x, double y,
                                    const Vector& h) {
  require_dim(obj.dim, h);
  return *Objective(obj).gradient(Sample{x, y}, h);
}

Vector quadratic_stochastic_gradient(const QuadraticObjective& obj, const Vector& x, const Vector& h) {
  require_dim(obj.dim(), h);
  return *Objective(obj).gradient(Sample{x, 0.0}, h);
}

double stable_tanh(double t) { return std::tanh(std::clamp(t, -kSaturation, kSaturation)); }

double stable_sigmoid(double t) {
  t = std::clamp(t, -kSaturation, kSaturation);
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_cosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

Vector empirical_batch_gradient(const Objective& objective, const Vector& h, const Dataset& dataset,
                                std::size_t threads) {
  if (dataset.empty()) throw ConfigError("empty dataset");
  require_dim(objective.dim(), h);
  const std::size_t d = h.size();
  struct Acc {
    Vector sum;
    std::size_t used = 0;
  };
  Acc total = reduce_blocks<Acc>(
      dataset.size(), threads,
      [&](std::size_t begin, std::size_t end) {
        Acc acc{Vector(d), 0};
        Vector g(d);
        for (std::size_t k = begin; k < end; ++k) {
          if (!objective.gradient(dataset[k], h, g)) continue;
          acc.sum += g;
          ++acc.used;
        }
        return acc;
      },
      [](Acc& a, const Acc& b) {
        a.sum += b.sum;
        a.used += b.used;
      });
  if (total.used == 0) throw AllDegenerate("every sample coincides with h");
  total.sum *= 1.0 / static_cast<double>(total.used);
  return total.sum;
}

SymOperator empirical_hessian(const Objective& objective, const Vector& h, const Dataset& dataset,
                              std::size_t threads) {
  if (dataset.empty()) throw ConfigError("empty dataset");
  require_dim(objective.dim(), h);
  if (auto exact = objective.exact_hessian()) return *exact;
  if (const auto* gq = std::get_if<GeometricQuantileObjective>(&objective.variant())) {
    return gq_hessian_mc(*gq, h, dataset);
  }
  const bool cosh = objective.kind() == ObjectiveKind::kCoshLogistic;
  const std::size_t d = h.size();
  SymOperator total = reduce_blocks<SymOperator>(
      dataset.size(), threads,
      [&](std::size_t begin, std::size_t end) {
        SymOperator acc(d);
        for (std::size_t k = begin; k < end; ++k) {
          const Sample& s = dataset[k];
          require_label(s.label);
          double weight;
          if (cosh) {
            const double th = stable_tanh(s.label - dot(s.x, h));
            weight = 1.0 - th * th;
          } else {
            const double sg = stable_sigmoid(s.label * dot(s.x, h));
            weight = sg * (1.0 - sg);
          }
          acc.add_rank_one(weight, s.x);
        }
        return acc;
      },
      [](SymOperator& a, const SymOperator& b) { a += b; });
  total *= 1.0 / static_cast<double>(dataset.size());
  return total;
}

double empirical_loss(const Objective& objective, const Vector& h, const Dataset& dataset,
                      std::size_t threads) {
  if (dataset.empty()) throw ConfigError("empty dataset");
  const double sum = reduce_blocks<double>(
      dataset.size(), threads,
      [&](std::size_t begin, std::size_t end) {
        double s = 0.0;
        for (std::size_t k = begin; k < end; ++k) s += objective.loss(dataset[k], h);
        return s;
      },
      [](double& a, const double& b) { a += b; });
  return sum / static_cast<double>(dataset.size());
}

}  // namespace asgd
