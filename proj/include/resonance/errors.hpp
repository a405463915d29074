#pragma once

#include <stdexcept>
#include <string>

namespace resonance {

/// Thrown when a request would exceed a configured memory or work budget.
/// `required()` carries the size that would have been needed, when known.
class resource_limit_error : public std::runtime_error {
 public:
  explicit resource_limit_error(const std::string& what, double required = 0.0)
      : std::runtime_error(what), required_(required) {}

  double required() const noexcept { return required_; }

 private:
  double required_;
};

/// Thrown when a numerical routine cannot reach its requested accuracy.
class numerical_failure : public std::runtime_error {
 public:
  numerical_failure(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

}  // namespace resonance
