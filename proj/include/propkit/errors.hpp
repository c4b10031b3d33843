#pragma once

#include <stdexcept>
#include <string>

// Domain error hierarchy.  Every throwing path in the library uses one of
// these so callers (and the CLI) can tell domain failures apart from plain
// usage mistakes (std::invalid_argument) and map them to exit codes.
namespace propkit {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A query whose answer is not determined by the residues at hand.  Raised
// instead of guessing: truncated division by an apparent zero, power
// predicates below their decision precision, and so on.
struct InsufficientPrecision : Error {
  explicit InsufficientPrecision(const std::string& msg)
      : Error("InsufficientPrecision: " + msg) {}
};

// Operands belong to different primes / precisions / models where that is
// not reconcilable by truncation.
struct ModelMismatch : Error {
  explicit ModelMismatch(const std::string& msg)
      : Error("ModelMismatch: " + msg) {}
};

// A level system that should be solvable (coordinates of a genuine group
// element against a spanning basis) was not.  Indicates the element is not
// in the group, or the basis images fail to span the layer.
struct LayerSolveFailure : Error {
  explicit LayerSolveFailure(const std::string& msg)
      : Error("LayerSolveFailure: " + msg) {}
};

// Generators span a subgroup that is not open at working precision (fewer
// than d independent directions survive).
struct NotOpenAtPrecision : Error {
  explicit NotOpenAtPrecision(const std::string& msg)
      : Error("NotOpenAtPrecision: " + msg) {}
};

struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& msg)
      : Error("BudgetExceeded: " + msg) {}
};

struct NotPGroup : Error {
  explicit NotPGroup(const std::string& msg) : Error("NotPGroup: " + msg) {}
};

struct NotNilpotent : Error {
  explicit NotNilpotent(const std::string& msg)
      : Error("NotNilpotent: " + msg) {}
};

// A TP2 layout was requested that the group's base cannot be partitioned
// into.
struct PartitionInfeasible : Error {
  explicit PartitionInfeasible(const std::string& msg)
      : Error("PartitionInfeasible: " + msg) {}
};

// Text that does not parse.  `position` is a byte offset into the input.
struct ParseError : Error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : Error("ParseError at " + std::to_string(pos) + ": " + msg),
        position(pos) {}
};

// Evaluation-time failures of the term language: unbound variables, unknown
// series, arity mismatches.
struct EvalError : Error {
  explicit EvalError(const std::string& msg) : Error("EvalError: " + msg) {}
};

}  // namespace propkit
