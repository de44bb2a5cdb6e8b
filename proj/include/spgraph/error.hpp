#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spgraph {

// Malformed expression source. offset is the 0-based character position.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

// Domain error during evaluation (sqrt of a negative, division by zero, ...).
class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid problem description or configuration document. path names the offending field.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string &path, const std::string &what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
};

// Initial/boundary data violate the C^1 compatibility conditions.
class CompatibilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Time step exceeds the stability limit of the explicit scheme.
class CflError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Any other numerical failure (grid mismatch, unsupported argument range, ...).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace spgraph
