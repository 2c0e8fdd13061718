#include "asgd/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "asgd/rng.hpp"

namespace asgd {

void Vector::fill(double value) { std::fill(coords_.begin(), coords_.end(), value); }

Vector& Vector::operator+=(const Vector& other) {
  check_same_dim(*this, other);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  check_same_dim(*this, other);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& c : coords_) c *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector a) { return a *= s; }

void check_same_dim(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
}

double inner(const Vector& a, const Vector& b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& a) {
  double s = 0.0;
  for (double c : a) s += c * c;
  return std::sqrt(s);
}

double squared_distance(const Vector& a, const Vector& b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(const Vector& a, const Vector& b) { return std::sqrt(squared_distance(a, b)); }

bool all_finite(const Vector& a) {
  return std::all_of(a.begin(), a.end(), [](double c) { return std::isfinite(c); });
}

Vector axpy(double alpha, const Vector& x, const Vector& y) {
  Vector out = y;
  axpy_inplace(alpha, x, out);
  return out;
}

void axpy_inplace(double alpha, const Vector& x, Vector& y) {
  check_same_dim(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector unit_vector(std::size_t dim, std::size_t axis) {
  Vector e(dim);
  e[axis] = 1.0;
  return e;
}

SymOperator::SymOperator(std::initializer_list<std::initializer_list<double>> rows)
    : dim_(rows.size()), entries_() {
  entries_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw DimensionMismatch(row.size(), dim_);
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
  symmetrize_checked();
}

SymOperator SymOperator::from_rows(const std::vector<std::vector<double>>& rows) {
  SymOperator op(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != op.dim_) throw DimensionMismatch(rows[i].size(), op.dim_);
    std::copy(rows[i].begin(), rows[i].end(), op.entries_.begin() + i * op.dim_);
  }
  op.symmetrize_checked();
  return op;
}

void SymOperator::symmetrize_checked() {
  double scale = 0.0;
  for (double e : entries_) scale = std::max(scale, std::abs(e));
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i + 1; j < dim_; ++j) {
      double& a = entries_[i * dim_ + j];
      double& b = entries_[j * dim_ + i];
      if (std::abs(a - b) > 1e-12 * std::max(scale, 1.0)) {
        throw Error("operator is not symmetric");
      }
      a = b = 0.5 * (a + b);
    }
  }
}

SymOperator SymOperator::identity(std::size_t dim) {
  SymOperator op(dim);
  op.add_identity(1.0);
  return op;
}

SymOperator SymOperator::diagonal(const Vector& diag) {
  SymOperator op(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) op.entries_[i * op.dim_ + i] = diag[i];
  return op;
}

void SymOperator::add_rank_one(double alpha, const Vector& u) {
  if (u.size() != dim_) throw DimensionMismatch(u.size(), dim_);
  // upper triangle, mirrored, so the result stays exactly symmetric
  for (std::size_t i = 0; i < dim_; ++i) {
    const double ai = alpha * u[i];
    for (std::size_t j = i; j < dim_; ++j) {
      const double value = entries_[i * dim_ + j] + ai * u[j];
      entries_[i * dim_ + j] = value;
      entries_[j * dim_ + i] = value;
    }
  }
}

void SymOperator::add_identity(double alpha) {
  for (std::size_t i = 0; i < dim_; ++i) entries_[i * dim_ + i] += alpha;
}

SymOperator& SymOperator::operator*=(double s) {
  for (double& e : entries_) e *= s;
  return *this;
}

SymOperator& SymOperator::operator+=(const SymOperator& other) {
  if (other.dim_ != dim_) throw DimensionMismatch(other.dim_, dim_);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

Vector SymOperator::apply(const Vector& v) const {
  if (v.size() != dim_) throw DimensionMismatch(v.size(), dim_);
  Vector out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = entries_.data() + i * dim_;
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += row[j] * v[j];
    out[i] = s;
  }
  return out;
}

std::vector<std::vector<double>> SymOperator::to_rows() const {
  std::vector<std::vector<double>> rows(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    rows[i].assign(entries_.begin() + i * dim_, entries_.begin() + (i + 1) * dim_);
  }
  return rows;
}

Vector apply_rank_one_sum(const SymOperator& op, const Vector& v) { return op.apply(v); }

namespace {

struct PowerResult {
  double rayleigh = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Power iteration on a PSD operator.
PowerResult power_iterate(const SymOperator& op, Vector x, double tol, int max_iter) {
  x *= 1.0 / norm(x);
  PowerResult res;
  for (int it = 1; it <= max_iter; ++it) {
    Vector y = op.apply(x);
    const double mu = inner(x, y);
    const double y_norm = norm(y);
    res.rayleigh = mu;
    res.iterations = it;
    if (y_norm == 0.0) {
      res.converged = true;
      return res;
    }
    double residual2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - mu * x[i];
      residual2 += r * r;
    }
    if (std::sqrt(residual2) <= tol * std::max(1.0, std::abs(mu))) {
      res.converged = true;
      return res;
    }
    y *= 1.0 / y_norm;
    x = std::move(y);
  }
  return res;
}

// Top eigenvalue of a PSD operator from two deterministic starts: the
// normalized all-ones vector and a fixed pseudo-random vector. The second
// start catches a first start that is orthogonal to the top eigenspace.
PowerResult top_eigenvalue(const SymOperator& op, double tol, int max_iter) {
  const std::size_t d = op.dim();
  const PowerResult ones = power_iterate(op, Vector(d, 1.0), tol, max_iter);

  CounterRng rng(0x5EEDULL, 0);
  Vector start(d);
  for (auto& c : start) c = rng.uniform() - 0.5;
  if (norm(start) == 0.0) start[0] = 1.0;
  const PowerResult random = power_iterate(op, std::move(start), tol, max_iter);

  if (!ones.converged && !random.converged) {
    throw NoConvergence("power iteration did not converge in " + std::to_string(max_iter) +
                        " iterations");
  }
  PowerResult best;
  if (ones.converged && random.converged) {
    best = ones.rayleigh >= random.rayleigh ? ones : random;
  } else {
    best = ones.converged ? ones : random;
  }
  best.iterations = ones.iterations + random.iterations;
  return best;
}

}  // namespace

ExtremeEigenvalues extreme_eigenvalues(const SymOperator& op, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ConfigError("eigenvalue tolerance must be positive");
  const std::size_t d = op.dim();
  if (d == 0) throw ConfigError("empty operator");

  // Gershgorin lower bound; shift so the iterated operator is PSD.
  double lower = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (j != i) off += std::abs(op(i, j));
    }
    lower = std::min(lower, op(i, i) - off);
  }
  const double shift = -lower;

  SymOperator shifted = op;
  shifted.add_identity(shift);
  const PowerResult top = top_eigenvalue(shifted, tol, max_iter);
  const double lambda_max = top.rayleigh - shift;

  SymOperator flipped = op;
  flipped *= -1.0;
  flipped.add_identity(lambda_max);
  const PowerResult bottom = top_eigenvalue(flipped, tol, max_iter);

  ExtremeEigenvalues out;
  out.lambda_max = lambda_max;
  out.lambda_min = lambda_max - bottom.rayleigh;
  out.iterations = top.iterations + bottom.iterations;
  return out;
}

}  // namespace asgd
