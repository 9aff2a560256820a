#pragma once

#include <stdexcept>
#include <string>

namespace ncplex {

enum class ErrorCode {
  InvalidArgument = 1,
  OutOfChart,
  DepthViolation,
  DanglingPoint,
  BadStratum,
  UnsupportedShape,
  NoReferenceTree,
  BadChildID,
  CycleDetected,
  NotConstrained,
  BadDimension,
  NotAChild,
  PointOutsideCell,
  DegenerateCell,
  ShapeMismatch,
  OrientationUnsupported,
  InconsistentChildID,
  SizeMismatch,
  BadCell,
  BadMode,
  SparsityViolation,
  BadField,
  LevelOverflow,
  Unbalanced,
  ParseError,
  VersionMismatch,
  AlreadyTreed,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

/// All library failures are reported through this exception type; the C API
/// maps `code()` onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the DAG reader; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace ncplex
