#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "asgd/errors.hpp"

namespace asgd {

// Dense coordinate vector. Points of the (possibly truncated) Hilbert space
// are represented by their coordinates in an orthonormal basis, so the
// Euclidean inner product below is the Hilbert inner product.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double value = 0.0) : coords_(dim, value) {}
  Vector(std::initializer_list<double> values) : coords_(values) {}
  explicit Vector(std::vector<double> values) : coords_(std::move(values)) {}

  std::size_t size() const { return coords_.size(); }
  bool empty() const { return coords_.empty(); }

  double& operator[](std::size_t i) { return coords_[i]; }
  double operator[](std::size_t i) const { return coords_[i]; }

  double* data() { return coords_.data(); }
  const double* data() const { return coords_.data(); }
  std::span<double> span() { return coords_; }
  std::span<const double> span() const { return coords_; }
  const std::vector<double>& coords() const { return coords_; }

  auto begin() { return coords_.begin(); }
  auto end() { return coords_.end(); }
  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  void fill(double value);

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> coords_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);

void check_same_dim(const Vector& a, const Vector& b);

double inner(const Vector& a, const Vector& b);
double norm(const Vector& a);
double squared_distance(const Vector& a, const Vector& b);
double distance(const Vector& a, const Vector& b);
bool all_finite(const Vector& a);

// y + alpha * x
Vector axpy(double alpha, const Vector& x, const Vector& y);
// y += alpha * x without allocating.
void axpy_inplace(double alpha, const Vector& x, Vector& y);

Vector unit_vector(std::size_t dim, std::size_t axis);

// Dense symmetric d x d operator, row-major.
class SymOperator {
 public:
  SymOperator() = default;
  explicit SymOperator(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {}
  // Rows must form a square matrix symmetric to 1e-12 relative tolerance;
  // the stored matrix is the exact symmetrization.
  SymOperator(std::initializer_list<std::initializer_list<double>> rows);
  static SymOperator from_rows(const std::vector<std::vector<double>>& rows);

  static SymOperator identity(std::size_t dim);
  static SymOperator diagonal(const Vector& diag);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  // this += alpha * u u^T
  void add_rank_one(double alpha, const Vector& u);
  void add_identity(double alpha);
  SymOperator& operator*=(double s);
  SymOperator& operator+=(const SymOperator& other);

  Vector apply(const Vector& v) const;
  // Rows as nested vectors, for serialization and cross-checks.
  std::vector<std::vector<double>> to_rows() const;

 private:
  void symmetrize_checked();

  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

// op * v, where op is typically a sum of rank-one projectors (I - u (x) u etc.).
Vector apply_rank_one_sum(const SymOperator& op, const Vector& v);

struct ExtremeEigenvalues {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  int iterations = 0;
};

// Largest eigenvalue by power iteration (shifted to the PSD cone by a
// Gershgorin bound when needed), smallest by power iteration on
// lambda_max * I - op. Throws NoConvergence if the Rayleigh residual is
// still above tol after max_iter iterations.
ExtremeEigenvalues extreme_eigenvalues(const SymOperator& op, double tol = 1e-10,
                                       int max_iter = 1000000);

}  // namespace asgd
