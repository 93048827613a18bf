#include "casekit/dsl.hpp"

#include <cctype>
#include <utility>

#include "casekit/errors.hpp"
#include "casekit/text.hpp"

namespace casekit {

namespace {

struct OpEntry {
  std::string_view token;
  OpName name;
  OpKind kind;
};

constexpr OpEntry kOps[] = {
    {"add", OpName::Add, OpKind::Scalar},
    {"subtract", OpName::Subtract, OpKind::Scalar},
    {"multiply", OpName::Multiply, OpKind::Scalar},
    {"divide", OpName::Divide, OpKind::Scalar},
    {"exp", OpName::Exp, OpKind::Scalar},
    {"greater", OpName::Greater, OpKind::Comparison},
    {"table-sum", OpName::TableSum, OpKind::Table},
    {"table-average", OpName::TableAverage, OpKind::Table},
    {"table-max", OpName::TableMax, OpKind::Table},
    {"table-min", OpName::TableMin, OpKind::Table},
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t skip_ws(std::string_view s, std::size_t i) {
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// Classifies one argument token. `step_index` is the index of the step the
// token belongs to; `pos` its byte offset for error reporting.
Operand classify_operand(std::string_view tok, std::size_t step_index, std::size_t pos) {
  if (tok.front() == '#') {
    std::string_view digits = tok.substr(1);
    if (!all_digits(digits)) {
      throw ParseError(errkind::kMalformedSyntax,
                       "malformed step reference '" + std::string(tok) + "' at offset " +
                           std::to_string(pos),
                       pos);
    }
    std::size_t index = 0;
    for (char c : digits) index = index * 10 + static_cast<std::size_t>(c - '0');
    if (index >= step_index) {
      throw ParseError(errkind::kForwardStepReference,
                       "step reference #" + std::string(digits) + " used in step " +
                           std::to_string(step_index) + " before it is defined (offset " +
                           std::to_string(pos) + ")",
                       pos);
    }
    return Operand::step_ref(index);
  }

  std::string lowered = text::to_lower(tok);

  if (lowered.rfind("const_", 0) == 0) {
    std::string_view suffix = std::string_view(lowered).substr(6);
    bool negative = false;
    if (!suffix.empty() && suffix.front() == 'm') {
      negative = true;
      suffix.remove_prefix(1);
    }
    if (auto lit = text::parse_numeric_literal(suffix); lit && !lit->percent) {
      return Operand::constant(lowered, negative ? -lit->value : lit->value);
    }
    // not a recognized constant pattern; fall through to plain text
  }

  if (auto lit = text::parse_numeric_literal(lowered)) {
    return Operand::number(lit->value, lit->normalized, lit->percent);
  }

  return Operand::text(lowered);
}

}  // namespace

std::optional<OpName> op_from_token(std::string_view lowered) {
  for (const auto& e : kOps) {
    if (e.token == lowered) return e.name;
  }
  return std::nullopt;
}

std::string_view op_token(OpName op) {
  for (const auto& e : kOps) {
    if (e.name == op) return e.token;
  }
  return {};
}

OpKind op_kind(OpName op) {
  for (const auto& e : kOps) {
    if (e.name == op) return e.kind;
  }
  return OpKind::Scalar;
}

bool op_is_commutative(OpName op) {
  return op == OpName::Add || op == OpName::Multiply;
}

Operand Operand::number(double value, std::string raw, bool percent) {
  Operand o;
  o.kind = Kind::Number;
  o.value = value;
  o.percent = percent;
  o.raw = std::move(raw);
  return o;
}

Operand Operand::constant(std::string name, double value) {
  Operand o;
  o.kind = Kind::Constant;
  o.value = value;
  o.raw = std::move(name);
  return o;
}

Operand Operand::step_ref(std::size_t index) {
  Operand o;
  o.kind = Kind::StepRef;
  o.step = index;
  o.raw = "#" + std::to_string(index);
  return o;
}

Operand Operand::text(std::string raw) {
  Operand o;
  o.kind = Kind::Text;
  o.raw = std::move(raw);
  return o;
}

std::string Operand::token() const {
  if (kind == Kind::StepRef) return "#" + std::to_string(step);
  return raw;
}

bool Operand::operator==(const Operand& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Number:
      return value == other.value && percent == other.percent;
    case Kind::Constant:
    case Kind::Text:
      return raw == other.raw;
    case Kind::StepRef:
      return step == other.step;
  }
  return false;
}

Program parse_program(std::string_view input) {
  Program program;
  std::size_t i = skip_ws(input, 0);
  if (i >= input.size()) {
    throw ParseError(errkind::kEmptyProgram, "empty program", 0);
  }

  while (true) {
    // operation name up to '('
    std::size_t op_start = i;
    std::size_t paren = input.find('(', i);
    if (paren == std::string_view::npos) {
      throw ParseError(errkind::kMalformedSyntax,
                       "expected '(' after operation name at offset " + std::to_string(i), i);
    }
    std::string op_tok = text::trim(input.substr(i, paren - i));
    if (op_tok.empty()) {
      throw ParseError(errkind::kMalformedSyntax,
                       "missing operation name at offset " + std::to_string(op_start),
                       op_start);
    }
    auto op = op_from_token(text::to_lower(op_tok));
    if (!op) {
      throw ParseError(errkind::kUnknownOperation,
                       "unknown operation '" + op_tok + "' at offset " +
                           std::to_string(op_start),
                       op_start);
    }

    // Two arguments separated by one top-level comma. Row names may carry
    // balanced parentheses ("total (in millions)"), so commas and the step
    // terminator are recognized at depth 0 only. The canonical separator is
    // ", " (comma plus whitespace); bare commas only separate when no spaced
    // comma exists, which keeps thousands separators ("$5,000") inside one
    // argument while still accepting compact "add(1,2)".
    std::size_t args_begin = paren + 1;
    std::size_t close = std::string_view::npos;
    std::vector<std::size_t> commas_spaced;
    std::vector<std::size_t> commas_all;
    std::size_t depth = 0;
    for (std::size_t j = args_begin; j < input.size(); ++j) {
      char c = input[j];
      if (c == '(') {
        ++depth;
      } else if (c == ')') {
        if (depth == 0) {
          close = j;
          break;
        }
        --depth;
      } else if (c == ',' && depth == 0) {
        commas_all.push_back(j);
        if (j + 1 < input.size() && is_space(input[j + 1])) commas_spaced.push_back(j);
      }
    }
    if (close == std::string_view::npos) {
      throw ParseError(errkind::kMalformedSyntax,
                       "unbalanced parentheses at offset " + std::to_string(paren), paren);
    }
    const std::vector<std::size_t>& separators =
        commas_spaced.empty() ? commas_all : commas_spaced;
    if (separators.size() != 1) {
      std::size_t at = separators.size() > 1 ? separators[1] : close;
      throw ParseError(errkind::kMalformedSyntax,
                       "operation '" + op_tok + "' expects 2 arguments (offset " +
                           std::to_string(at) + ")",
                       at);
    }
    std::size_t comma = separators[0];

    std::size_t step_index = program.steps.size();
    std::size_t a1_pos = skip_ws(input, args_begin);
    std::string a1 = text::trim(input.substr(args_begin, comma - args_begin));
    std::size_t a2_pos = skip_ws(input, comma + 1);
    std::string a2 = text::trim(input.substr(comma + 1, close - comma - 1));
    if (a1.empty()) {
      throw ParseError(errkind::kMalformedSyntax,
                       "empty argument at offset " + std::to_string(a1_pos), a1_pos);
    }
    if (a2.empty()) {
      throw ParseError(errkind::kMalformedSyntax,
                       "empty argument at offset " + std::to_string(a2_pos), a2_pos);
    }

    Step step;
    step.op = *op;
    step.args[0] = classify_operand(a1, step_index, a1_pos);
    step.args[1] = classify_operand(a2, step_index, a2_pos);
    program.steps.push_back(std::move(step));

    i = skip_ws(input, close + 1);
    if (i >= input.size()) break;
    if (input[i] != ',') {
      throw ParseError(errkind::kMalformedSyntax,
                       "expected ',' between steps at offset " + std::to_string(i), i);
    }
    i = skip_ws(input, i + 1);
    if (i >= input.size()) {
      throw ParseError(errkind::kMalformedSyntax,
                       "trailing step separator at offset " + std::to_string(i - 1), i - 1);
    }
  }

  if (program.steps.empty()) {
    throw ParseError(errkind::kEmptyProgram, "empty program", 0);
  }
  return program;
}

std::string serialize_program(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (i > 0) out += ", ";
    const Step& s = p.steps[i];
    out += op_token(s.op);
    out += '(';
    out += s.args[0].token();
    out += ", ";
    out += s.args[1].token();
    out += ')';
  }
  return out;
}

std::vector<std::string> op_sequence(const Program& p) {
  std::vector<std::string> ops;
  ops.reserve(p.steps.size());
  for (const Step& s : p.steps) ops.emplace_back(op_token(s.op));
  return ops;
}

std::vector<std::string> arg_sequence(const Program& p) {
  std::vector<std::string> args;
  args.reserve(p.steps.size() * 2);
  for (const Step& s : p.steps) {
    args.push_back(s.args[0].token());
    args.push_back(s.args[1].token());
  }
  return args;
}

}  // namespace casekit
