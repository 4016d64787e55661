#pragma once

#include <stdexcept>
#include <string>

namespace morisita {

// Malformed input files (CSV syntax, ragged rows, bad numbers).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a contract (duplicate column
// names, non-finite values, bad parameter ranges).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// The ID is not computable: no grid finer than one cell per axis keeps
// two points together, so no scaling behaviour can be observed.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace morisita
