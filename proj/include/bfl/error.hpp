#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bfl {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed fault-tree or formula source. Positions are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A name that does not denote an element of the tree at hand.
class UnknownElement : public Error {
 public:
  explicit UnknownElement(const std::string& name)
      : Error("unknown element '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Well-formed syntax that breaks a semantic rule of the formula language
/// (layering, evidence on a gate, VOT bounds, ...).
class FormulaError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace bfl
