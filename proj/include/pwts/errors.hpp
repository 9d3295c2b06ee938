#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pwts {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input table. Line and column are 1-based; zero means "not applicable".
class ParseError : public Error {
 public:
  enum class Kind { EmptyInput, RaggedRows, NonNumericCell, TooFewRows, TooFewColumns };

  ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& what)
      : Error(what), kind_(kind), line_(line), column_(column) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

inline const char* to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::EmptyInput: return "EmptyInput";
    case ParseError::Kind::RaggedRows: return "RaggedRows";
    case ParseError::Kind::NonNumericCell: return "NonNumericCell";
    case ParseError::Kind::TooFewRows: return "TooFewRows";
    case ParseError::Kind::TooFewColumns: return "TooFewColumns";
  }
  return "Unknown";
}

class UnknownKind : public Error {
 public:
  explicit UnknownKind(const std::string& kind)
      : Error("unknown dataset kind '" + kind + "'"), kind_(kind) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Every interpolation system of a LAD-LASSO problem was singular.
class DegenerateProblem : public Error {
 public:
  using Error::Error;
};

/// No subset survived the scale filter and the solver; the scale is too small for the data.
class NoCandidates : public Error {
 public:
  using Error::Error;
};

/// Invalid grid or candidate configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class AllInfeasible : public Error {
 public:
  AllInfeasible() : Error("every grid cell is infeasible") {}
};

}  // namespace pwts
