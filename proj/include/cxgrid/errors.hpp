#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cxgrid {

/// Shape mismatch between matrices, vectors or tableau fields.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of an operation (parameter range, degenerate path, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Right-hand side evaluated too close to a pole.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, int body)
      : std::runtime_error(what), body_(body) {}
  /// 0 for the earth, 1 for the moon.
  int body() const noexcept { return body_; }

 private:
  int body_;
};

/// A step of a one-step recursion failed; carries the failing step index.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Convergence study where no usable error window exists.
class IndeterminateOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error measurement requested for a problem without exact flow or reference.
class NoReferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cxgrid
