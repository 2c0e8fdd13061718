#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "asgd/linalg.hpp"
#include "asgd/sample.hpp"

namespace asgd {

// Samples closer than this to h make the geometric-quantile gradient undefined.
inline constexpr double kDegeneracyThreshold = 1e-12;
// |argument| clamp for tanh and the sigmoid.
inline constexpr double kSaturation = 40.0;

// g(x, h) = ||x - h|| + <x - h, v>; the minimizer of E g is the geometric
// quantile in direction v (the geometric median for v = 0).
struct GeometricQuantileObjective {
  Vector direction;

  explicit GeometricQuantileObjective(Vector v);
  std::size_t dim() const { return direction.size(); }
};

// g((x, y), h) = log cosh(y - <x, h>).
struct CoshLogisticObjective {
  std::size_t dim = 0;
};

// g((x, y), h) = log(1 + exp(-y <x, h>)).
struct LogisticObjective {
  std::size_t dim = 0;
};

// Validation objective g(x, h) = ||h - x||^2 / 2 with X = m_true + sigma * noise,
// so the population gradient is h - m_true and the Hessian is the identity.
struct QuadraticObjective {
  Vector m_true;
  double sigma = 1.0;

  QuadraticObjective(Vector m, double s);
  std::size_t dim() const { return m_true.size(); }
};

enum class ObjectiveKind { kQuadratic, kGeometricQuantile, kCoshLogistic, kLogistic };

std::string to_string(ObjectiveKind kind);
ObjectiveKind parse_objective_kind(const std::string& name);

// Closed set of supported objectives behind one gradient-oracle interface.
class Objective {
 public:
  using Variant = std::variant<QuadraticObjective, GeometricQuantileObjective,
                               CoshLogisticObjective, LogisticObjective>;

  Objective(QuadraticObjective o) : impl_(std::move(o)) {}
  Objective(GeometricQuantileObjective o) : impl_(std::move(o)) {}
  Objective(CoshLogisticObjective o) : impl_(o) {}
  Objective(LogisticObjective o) : impl_(o) {}

  ObjectiveKind kind() const;
  std::size_t dim() const;
  bool labeled() const;
  const Variant& variant() const { return impl_; }

  // Writes grad_h g(sample, h) into out. Returns false when the gradient is
  // undefined at this sample (out is then unspecified).
  bool gradient(const Sample& sample, const Vector& h, Vector& out) const;
  std::optional<Vector> gradient(const Sample& sample, const Vector& h) const;

  double loss(const Sample& sample, const Vector& h) const;

  // Z_1 from the first sample: the sample itself if it lies in the ball of
  // radius clip_radius and 0 otherwise (geometric quantile, quadratic), or
  // the zero vector (regressions).
  Vector initial_point(const Sample& first, double clip_radius) const;

  // Exact population gradient and Hessian where they are available in
  // closed form (quadratic only).
  std::optional<Vector> exact_population_gradient(const Vector& h) const;
  std::optional<SymOperator> exact_hessian() const;

 private:
  Variant impl_;
};

// -(x - h)/||x - h|| - v, or nullopt when ||x - h|| < kDegeneracyThreshold.
std::optional<Vector> gq_stochastic_gradient(const GeometricQuantileObjective& obj, const Vector& x,
                                             const Vector& h);

struct McGradient {
  Vector mean;
  std::size_t used = 0;
  std::size_t degenerate = 0;
};

// Mean of the geometric-quantile stochastic gradient over a sample set,
// skipping degenerate samples. Throws AllDegenerate if none is usable.
McGradient gq_population_gradient_mc(const GeometricQuantileObjective& obj, const Vector& h,
                                     const Dataset& samples);

// Mean of (1/||x - h||)(I - u u^T), u = (x - h)/||x - h||.
SymOperator gq_hessian_mc(const GeometricQuantileObjective& obj, const Vector& h,
                          const Dataset& samples);

// -tanh(y - <x, h>) x
Vector cosh_stochastic_gradient(const CoshLogisticObjective& obj, const Vector& x, double y,
                                const Vector& h);

// -sigmoid(-y <x, h>) y x
Vector logistic_stochastic_gradient(const LogisticObjective& obj, const Vector& x, double y,
                                    const Vector& h);

// h - x
Vector quadratic_stochastic_gradient(const QuadraticObjective& obj, const Vector& x,
                                     const Vector& h);

double stable_tanh(double t);
double stable_sigmoid(double t);
// log cosh(t) without overflow.
double log_cosh(double t);
// log(1 + exp(t)) without overflow.
double softplus(double t);

// Mean stochastic gradient over a dataset (degenerate samples skipped).
// Uses the order-independent block reduction.
Vector empirical_batch_gradient(const Objective& objective, const Vector& h, const Dataset& dataset,
                                std::size_t threads = 1);

// Mean Hessian of g(., h) over a dataset: (1/||x-h||)(I - u u^T) for
// geometric quantiles, sech^2(y - <x,h>) x x^T for cosh-logistic,
// s(1-s) x x^T with s = sigmoid(y<x,h>) for logistic, I for the quadratic.
SymOperator empirical_hessian(const Objective& objective, const Vector& h, const Dataset& dataset,
                              std::size_t threads = 1);

// Mean loss over a dataset.
double empirical_loss(const Objective& objective, const Vector& h, const Dataset& dataset,
                      std::size_t threads = 1);

}  // namespace asgd
