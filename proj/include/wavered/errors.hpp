#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavered {

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

// Evaluation failure: unbound symbol or a domain violation (log of a
// non-positive value, negative radicand, division by zero). Carries the
// printed offending subexpression.
struct EvalError : std::runtime_error {
  std::string subexpr;
  EvalError(const std::string& msg, std::string sub)
      : std::runtime_error(msg + ": " + sub), subexpr(std::move(sub)) {}
};

// Contract violation on a module boundary (invalid ansatz, violated null
// condition, incompatible spec, ...).
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric procedure failure (Newton non-convergence, singular Jacobian,
// degenerate sampling).
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wavered
