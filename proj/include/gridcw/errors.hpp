#pragma once

#include <stdexcept>
#include <string>

namespace gridcw {

// Malformed input: bad spec text, unknown vertex ids, failed preconditions.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Parse failure with the byte offset where it was detected.
class ParseError : public InputError {
public:
  ParseError(const std::string& what, std::size_t pos)
      : InputError(what + " at offset " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

private:
  std::size_t pos_;
};

// A search or probe ran past its budget or horizon.
class BudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class HorizonError : public BudgetError {
public:
  using BudgetError::BudgetError;
};

// Something that should hold by construction did not.
class InvariantError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace gridcw
