#pragma once

#include <stdexcept>
#include <string>

namespace cstar {

// Failure classes, grouped roughly by how a caller should react:
// input/shape problems, violated preconditions, numerical breakdowns,
// and requests outside the supported problem classes.
enum class ErrorCode {
  InvalidContext,
  DimensionMismatch,
  ShapeMismatch,
  ParseError,
  NotPSD,
  NotPD,
  NotUnital,
  NotIsometry,
  AlgebraMismatch,
  EmptyRepresentation,
  StructureMismatch,
  NestMismatch,
  NotDominated,
  Unsupported,
  SingularCompression,
  FactorizationFailed,
  AlphaOutOfRange,
  NonMinimal,
  BlockMismatch,
  NotMultiplicityFree,
  DegreeTooLarge,
  SymbolNotPositive,
  NotConverged,
  AnchorNotCertified,
  EmptyComponentList,
  IndexOutOfRange,
  NumericalFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace cstar
