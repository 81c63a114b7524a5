#pragma once

#include <stdexcept>
#include <string>

namespace motint {

/// Base class of every error raised by the library. `code()` is a stable
/// machine-readable identifier used by the CLI's structured error output.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define MOTINT_DEFINE_ERROR(Name, Code)                                  \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message) : Error(Code, message) {} \
  }

MOTINT_DEFINE_ERROR(SortError, "SortError");
MOTINT_DEFINE_ERROR(NotInA, "NotInA");
MOTINT_DEFINE_ERROR(QOutOfRange, "QOutOfRange");
MOTINT_DEFINE_ERROR(NotIntegrable, "NotIntegrable");
MOTINT_DEFINE_ERROR(CapExceeded, "CapExceeded");
MOTINT_DEFINE_ERROR(InsufficientPrecision, "InsufficientPrecision");
MOTINT_DEFINE_ERROR(OutsideFragment, "OutsideFragment");
MOTINT_DEFINE_ERROR(FrameMismatch, "FrameMismatch");
MOTINT_DEFINE_ERROR(UnsupportedMorphism, "UnsupportedMorphism");
MOTINT_DEFINE_ERROR(ZeroDerivative, "ZeroDerivative");
MOTINT_DEFINE_ERROR(UnsupportedH, "UnsupportedH");
MOTINT_DEFINE_ERROR(NonGeometricFamily, "NonGeometricFamily");
MOTINT_DEFINE_ERROR(NotCellPresented, "NotCellPresented");
MOTINT_DEFINE_ERROR(EvalError, "EvalError");
MOTINT_DEFINE_ERROR(FormatError, "FormatError");

#undef MOTINT_DEFINE_ERROR

/// Syntax error carrying the byte offset into the parsed text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error("ParseError", message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace motint
