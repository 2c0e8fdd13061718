#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace asgd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs)
      : Error("dimension mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Every sample handed to a geometric-quantile MC routine coincided with h.
class AllDegenerate : public Error {
 public:
  using Error::Error;
};

class DegenerateDataset : public Error {
 public:
  using Error::Error;
};

class NonFiniteIterate : public Error {
 public:
  explicit NonFiniteIterate(std::uint64_t n)
      : Error("non-finite iterate at n=" + std::to_string(n)), n_(n) {}
  std::uint64_t n() const { return n_; }

 private:
  std::uint64_t n_;
};

class TooManyFailures : public Error {
 public:
  using Error::Error;
};

class InsufficientPoints : public Error {
 public:
  using Error::Error;
};

class NonPositiveMoment : public Error {
 public:
  using Error::Error;
};

// Invalid parameters or malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace asgd
