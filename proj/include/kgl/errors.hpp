#pragma once

#include <stdexcept>
#include <string>

namespace kgl {

/// Invalid model or run configuration. `field` is a dotted path such as
/// "model.z" naming the offending entry.
class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string field, const std::string &what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string &field() const { return field_; }

private:
  std::string field_;
};

/// A realized rate factor exceeded the thinning bound the run was set up with.
class BoundViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Quadrature could not reach the requested accuracy.
class QuadratureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace kgl
