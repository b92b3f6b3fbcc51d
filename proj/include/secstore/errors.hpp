#pragma once

#include <stdexcept>
#include <string>

namespace secstore {

// Malformed input text (bad token, wrong arity, unparsable number).
// Carries the 1-based line number when one is known, 0 otherwise.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input that violates a model invariant (label cardinality,
// self-loop, duplicate edge, out-of-range source index, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was called outside its contract (wrong regime, unknown node,
// unqualified edge passed to a decode-side routine, ...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive routine would exceed its configured work bound.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A randomized construction ran out of retries (practically unreachable at
// the default field sizes; the message carries the seed for reproduction).
class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace secstore
