#include "casekit/executor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "casekit/errors.hpp"
#include "casekit/text.hpp"

namespace casekit {

namespace {

// Collapses case and whitespace for the lenient row-name match.
std::string fold_row_name(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

double numeric_operand(const Operand& o, const std::vector<ExecResult>& results) {
  switch (o.kind) {
    case Operand::Kind::Number:
      return o.percent ? o.value / 100.0 : o.value;
    case Operand::Kind::Constant:
      return o.value;
    case Operand::Kind::StepRef: {
      if (o.step >= results.size()) {
        throw ExecError(errkind::kForwardStepReference,
                        "step reference #" + std::to_string(o.step) + " out of range");
      }
      const ExecResult& r = results[o.step];
      if (!r.is_numeric()) {
        throw ExecError(errkind::kBooleanIntermediate,
                        "boolean result #" + std::to_string(o.step) +
                            " used as an arithmetic operand");
      }
      return r.number;
    }
    case Operand::Kind::Text: {
      if (auto v = text::parse_cell_number(o.raw)) return *v;
      throw ExecError(errkind::kNonNumericOperand,
                      "operand '" + o.raw + "' is not numeric");
    }
  }
  throw ExecError(errkind::kNonNumericOperand, "unhandled operand kind");
}

double table_aggregate(OpName op, const Operand& row_arg, const TableData* table) {
  if (table == nullptr || table->empty()) {
    throw ExecError(errkind::kMissingTable,
                    std::string("operation '") + std::string(op_token(op)) +
                        "' requires a table");
  }
  if (row_arg.kind == Operand::Kind::StepRef) {
    throw ExecError(errkind::kUnknownTableRow,
                    "a step reference cannot name a table row");
  }
  const std::string& name = row_arg.raw;
  const TableData::Row* row = table->find_row(name);
  if (row == nullptr) {
    throw ExecError(errkind::kUnknownTableRow, "table row '" + name + "' not found");
  }

  std::vector<double> values;
  values.reserve(row->cells.size());
  for (const std::string& cell : row->cells) {
    if (text::trim(cell).empty()) continue;  // empty cells are skipped
    auto v = text::parse_cell_number(cell);
    if (!v) {
      throw ExecError(errkind::kNonNumericCell,
                      "cell '" + cell + "' in row '" + name + "' is not numeric");
    }
    values.push_back(*v);
  }
  if (values.empty()) {
    throw ExecError(errkind::kNonNumericCell,
                    "row '" + name + "' has no numeric cells");
  }

  switch (op) {
    case OpName::TableSum: {
      double s = 0.0;
      for (double v : values) s += v;
      return s;
    }
    case OpName::TableAverage: {
      double s = 0.0;
      for (double v : values) s += v;
      return s / static_cast<double>(values.size());
    }
    case OpName::TableMax:
      return *std::max_element(values.begin(), values.end());
    case OpName::TableMin:
      return *std::min_element(values.begin(), values.end());
    default:
      throw ExecError(errkind::kInvalidArgument, "not a table operation");
  }
}

}  // namespace

const TableData::Row* TableData::find_row(std::string_view name) const {
  for (const Row& r : rows) {
    if (r.header == name) return &r;
  }
  std::string folded = fold_row_name(name);
  for (const Row& r : rows) {
    if (fold_row_name(r.header) == folded) return &r;
  }
  return nullptr;
}

ExecResult ExecResult::numeric(double v) {
  ExecResult r;
  r.kind = Kind::Numeric;
  r.number = v;
  return r;
}

ExecResult ExecResult::boolean(bool v) {
  ExecResult r;
  r.kind = Kind::Boolean;
  r.truth = v;
  return r;
}

std::string ExecResult::to_string() const {
  if (kind == Kind::Boolean) return truth ? "yes" : "no";
  return text::canonical_number(number);
}

ExecResult execute(const Program& p, const TableData* table) {
  if (p.steps.empty()) {
    throw ExecError(errkind::kEmptyProgram, "cannot execute an empty program");
  }

  std::vector<ExecResult> results;
  results.reserve(p.steps.size());

  for (const Step& step : p.steps) {
    if (op_kind(step.op) == OpKind::Table) {
      results.push_back(ExecResult::numeric(table_aggregate(step.op, step.args[0], table)));
      continue;
    }

    double a = numeric_operand(step.args[0], results);
    double b = numeric_operand(step.args[1], results);

    if (step.op == OpName::Greater) {
      results.push_back(ExecResult::boolean(a > b));
      continue;
    }

    double value = 0.0;
    switch (step.op) {
      case OpName::Add:
        value = a + b;
        break;
      case OpName::Subtract:
        value = a - b;
        break;
      case OpName::Multiply:
        value = a * b;
        break;
      case OpName::Divide:
        if (b == 0.0) {
          throw ExecError(errkind::kDivisionByZero, "division by zero");
        }
        value = a / b;
        break;
      case OpName::Exp:
        value = std::pow(a, b);
        break;
      default:
        throw ExecError(errkind::kInvalidArgument, "unhandled operation");
    }
    if (!std::isfinite(value)) {
      throw ExecError(errkind::kNonFiniteResult,
                      std::string("operation '") + std::string(op_token(step.op)) +
                          "' produced a non-finite value");
    }
    results.push_back(ExecResult::numeric(value));
  }

  return results.back();
}

bool answers_match(const ExecResult& predicted, const ExecResult& gold,
                   const MatchOptions& opt) {
  if (opt.rel_tol < 0.0 || opt.abs_tol < 0.0) {
    throw Error(errkind::kInvalidArgument, "tolerances must be non-negative");
  }
  if (predicted.kind != gold.kind) {
    throw Error(errkind::kTypeMismatch, "cannot compare boolean with numeric answer");
  }
  if (predicted.kind == ExecResult::Kind::Boolean) {
    return predicted.truth == gold.truth;
  }

  auto close = [&](double p, double g) {
    return std::abs(p - g) <= std::max(opt.abs_tol, opt.rel_tol * std::abs(g));
  };
  if (close(predicted.number, gold.number)) return true;
  if (opt.scale_lenient) {
    return close(predicted.number * 100.0, gold.number) ||
           close(predicted.number / 100.0, gold.number);
  }
  return false;
}

}  // namespace casekit
