#pragma once

#include <stdexcept>
#include <string>

namespace dcl {

/// Numerical routine failed (SVD non-convergence, non-finite input, failed factorization).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter is outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A closed form is undefined at the requested parameters (e.g. h == 1 in the psi coefficients).
class DegenerateParameterError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Configuration file or command line is invalid. `key()` names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// File could not be read or written. `path()` names the file.
class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace dcl
