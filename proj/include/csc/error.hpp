#pragma once

#include <stdexcept>
#include <string>

namespace csc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario or parameter validation failed; the message names the field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// A PPP draw produced no base stations.
class EmptyDeploymentError : public Error {
 public:
  using Error::Error;
};

// Data routed to a BS whose uplink rate is zero.
class InfeasibleRouteError : public Error {
 public:
  using Error::Error;
};

// The exhaustive oracle refused a product space above its cap.
class EnumerationCapError : public Error {
 public:
  using Error::Error;
};

}  // namespace csc
