#pragma once

#include <stdexcept>
#include <string>

namespace flowsense {

/// Malformed or inconsistent input file.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Semantically invalid data (violated invariant, bad dimension, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Optimization failure (infeasible program, non-convex objective, ...).
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace flowsense
