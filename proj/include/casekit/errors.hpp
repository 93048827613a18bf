#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace casekit {

// Base error for the toolkit. `kind` is a stable machine-readable tag used by
// reports and tests to classify failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Raised by the program parser; `position` is the byte offset of the
// offending token within the input string.
class ParseError : public Error {
 public:
  ParseError(std::string kind, const std::string& message, std::size_t position)
      : Error(std::move(kind), message), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_ = 0;
};

// Raised while evaluating a program.
class ExecError : public Error {
 public:
  using Error::Error;
};

namespace errkind {

// dsl
inline constexpr const char* kUnknownOperation = "UnknownOperation";
inline constexpr const char* kMalformedSyntax = "MalformedSyntax";
inline constexpr const char* kForwardStepReference = "ForwardStepReference";
inline constexpr const char* kEmptyProgram = "EmptyProgram";

// executor
inline constexpr const char* kDivisionByZero = "DivisionByZero";
inline constexpr const char* kMissingTable = "MissingTable";
inline constexpr const char* kUnknownTableRow = "UnknownTableRow";
inline constexpr const char* kNonNumericCell = "NonNumericCell";
inline constexpr const char* kNonNumericOperand = "NonNumericOperand";
inline constexpr const char* kBooleanIntermediate = "BooleanIntermediate";
inline constexpr const char* kNonFiniteResult = "NonFiniteResult";
inline constexpr const char* kTypeMismatch = "TypeMismatch";

// similarity / mining
inline constexpr const char* kEmptyTargetProgram = "EmptyTargetProgram";
inline constexpr const char* kInvalidWeights = "InvalidWeights";
inline constexpr const char* kDimensionMismatch = "DimensionMismatch";
inline constexpr const char* kZeroNorm = "ZeroNorm";
inline constexpr const char* kUnknownQueryId = "UnknownQueryId";
inline constexpr const char* kMissingEmbeddings = "MissingEmbeddings";
inline constexpr const char* kEvalRetriesExhausted = "EvalRetriesExhausted";

// retrieval
inline constexpr const char* kEmptyRepository = "EmptyRepository";
inline constexpr const char* kModeMismatch = "ModeMismatch";
inline constexpr const char* kMissingRerankScore = "MissingRerankScore";
inline constexpr const char* kInvalidArgument = "InvalidArgument";

// corpus / metrics / io
inline constexpr const char* kSchemaMismatch = "SchemaMismatch";
inline constexpr const char* kUnparsableProgram = "UnparsableProgram";
inline constexpr const char* kDanglingEvidence = "DanglingEvidence";
inline constexpr const char* kUnknownPredictionId = "UnknownPredictionId";
inline constexpr const char* kMissingGoldSet = "MissingGoldSet";
inline constexpr const char* kIoError = "IoError";

}  // namespace errkind

}  // namespace casekit
