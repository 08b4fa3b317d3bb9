#pragma once

#include <stdexcept>
#include <string>

namespace topoae {

/// Bad user input: malformed clouds, size mismatches, unknown options.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// An algorithmic invariant did not hold. Always indicates a bug or an
/// unsupported degenerate configuration, never bad input.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace topoae
