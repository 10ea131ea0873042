#pragma once

#include <stdexcept>
#include <string>

namespace nsp {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input; carries the 1-based line number when known.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_ = 0;
};

// Dimension mismatch between containers that must agree.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Index or value outside its documented range.
class RangeError : public Error {
public:
  using Error::Error;
};

// Inputs that individually parse but contradict each other.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

// A requested materialization exceeds the configured capacity.
class CapacityError : public Error {
public:
  using Error::Error;
};

// Operation requires a complete assignment but got a partial one.
class IncompleteAssignmentError : public Error {
public:
  using Error::Error;
};

// Classifier training/prediction misuse (unknown feature, empty table...).
class TrainingError : public Error {
public:
  using Error::Error;
};

// Constraint-learning misuse (empty corpus, mismatched schedule shapes...).
class LearningError : public Error {
public:
  using Error::Error;
};

}  // namespace nsp
