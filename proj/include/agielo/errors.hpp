#pragma once

#include <stdexcept>

namespace agielo {

/// Malformed input data: CSV cells, run documents, unknown identifiers.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration key or value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace agielo
