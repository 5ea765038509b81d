#pragma once

#include <stdexcept>
#include <string>

namespace qhot {

// Configuration file is malformed or violates the schema.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// File could not be read, parsed or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed (normalization out of tolerance,
// iteration budget exhausted, degenerate input data, ...).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qhot
