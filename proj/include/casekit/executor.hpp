#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "casekit/dsl.hpp"

namespace casekit {

// A financial table: one header per row, shared column headers, raw cell
// text. Cell parsing happens lazily at execution time so ingestion stays
// lossless.
struct TableData {
  struct Row {
    std::string header;
    std::vector<std::string> cells;
  };

  std::vector<std::string> column_headers;
  std::vector<Row> rows;

  bool empty() const { return rows.empty(); }
  // Exact header match first, then a case- and whitespace-insensitive pass.
  const Row* find_row(std::string_view name) const;
};

// Final value of a program: numeric for arithmetic roots, yes/no for
// greater-rooted programs.
struct ExecResult {
  enum class Kind { Numeric, Boolean };

  Kind kind = Kind::Numeric;
  double number = 0.0;
  bool truth = false;

  static ExecResult numeric(double v);
  static ExecResult boolean(bool v);

  bool is_numeric() const { return kind == Kind::Numeric; }
  std::string to_string() const;  // canonical number, or "yes"/"no"

  bool operator==(const ExecResult& other) const = default;
};

// Evaluates the program step by step, binding step i's result to #i and
// returning the final step's value. Scalar ops are ordinary binary
// arithmetic (exp = power); greater(a, b) yields a boolean; table ops
// aggregate the numeric cells of the named row. Throws ExecError with kinds
// DivisionByZero, MissingTable, UnknownTableRow, NonNumericCell,
// NonNumericOperand, BooleanIntermediate or NonFiniteResult.
ExecResult execute(const Program& p, const TableData* table = nullptr);

struct MatchOptions {
  double rel_tol = 1e-5;
  double abs_tol = 1e-8;
  // Accepts x100 / /100 rescalings of the predicted value, absorbing the
  // percent-vs-fraction convention drift of financial answers.
  bool scale_lenient = false;
};

// Numeric comparison within max(abs_tol, rel_tol * |gold|); booleans compare
// exactly. Throws Error(TypeMismatch) when one side is boolean and the other
// numeric, and Error(InvalidArgument) for negative tolerances.
bool answers_match(const ExecResult& predicted, const ExecResult& gold,
                   const MatchOptions& opt = {});

}  // namespace casekit
