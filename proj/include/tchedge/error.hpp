#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tchedge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model or experiment parameters.
class SpecError : public Error {
 public:
  using Error::Error;
};

// A portfolio, scenario or coefficient violates an admissibility constraint.
class AdmissibilityError : public Error {
 public:
  AdmissibilityError(const std::string& what, std::optional<std::size_t> node,
                     std::optional<std::size_t> mark = std::nullopt)
      : Error(what), node_(node), mark_(mark) {}
  std::optional<std::size_t> node() const { return node_; }
  std::optional<std::size_t> mark() const { return mark_; }

 private:
  std::optional<std::size_t> node_;
  std::optional<std::size_t> mark_;
};

// Least-squares system that is singular to working precision.
class RegressionError : public Error {
 public:
  RegressionError(const std::string& what, std::size_t node) : Error(what), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tchedge
