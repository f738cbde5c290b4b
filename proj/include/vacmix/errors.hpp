#pragma once

#include <stdexcept>
#include <string>

namespace vacmix {

/// Base for every failure raised by the numerical modules.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Frequency argument fell within the pole tolerance of a medium resonance.
class PoleAtResonance : public NumericError {
public:
  using NumericError::NumericError;
};

class BranchSolveError : public NumericError {
public:
  using NumericError::NumericError;
};

class DegenerateBranches : public NumericError {
public:
  using NumericError::NumericError;
};

class QuadratureNotConverged : public NumericError {
public:
  using NumericError::NumericError;
};

class WronskianSingular : public NumericError {
public:
  using NumericError::NumericError;
};

class OrderTooLarge : public NumericError {
public:
  using NumericError::NumericError;
};

class CausticSingularity : public NumericError {
public:
  using NumericError::NumericError;
};

class InvalidProcess : public NumericError {
public:
  using NumericError::NumericError;
};

class DegenerateProfile : public NumericError {
public:
  using NumericError::NumericError;
};

/// Bad user input. Carries the dotted path of the offending field.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string path, const std::string &reason)
      : std::runtime_error(path.empty() ? reason : path + " " + reason),
        path_(std::move(path)) {}

  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
};

} // namespace vacmix
