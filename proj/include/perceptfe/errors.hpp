#pragma once

#include <stdexcept>
#include <string>

namespace pfe {

// Base class for all library errors. Subcommands map these to exit codes.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input schema: a required column is missing or a config is invalid.
class SchemaError : public Error {
public:
  using Error::Error;
};

// Invalid configuration values (simulation parameters, state configs).
class ConfigError : public Error {
public:
  using Error::Error;
};

// A model specification that cannot be estimated on the given data
// (e.g. duration control outside Arizona, arrest outcome with Texas rows).
class SpecificationError : public Error {
public:
  using Error::Error;
};

// The parameter of interest is not identified (e.g. treatment collinear
// with the absorbed fixed effects).
class IdentificationError : public Error {
public:
  using Error::Error;
};

// No usable observations remain after filtering/drops.
class EmptySampleError : public Error {
public:
  using Error::Error;
};

// Variance estimation is impossible (fewer than two clusters, nonpositive
// residual degrees of freedom).
class InferenceError : public Error {
public:
  using Error::Error;
};

// An iterative routine failed to converge within its cap.
class NumericalError : public Error {
public:
  NumericalError(const std::string& msg, double last_residual)
      : Error(msg), last_residual_norm(last_residual) {}
  double last_residual_norm = 0.0;
};

// A logit likelihood increases without bound along some direction.
class SeparationError : public Error {
public:
  SeparationError(const std::string& msg, std::string direction_name)
      : Error(msg), direction(std::move(direction_name)) {}
  std::string direction;
};

// Bad command-line usage; the CLI exits with status 2.
class UsageError : public Error {
public:
  using Error::Error;
};

}  // namespace pfe
