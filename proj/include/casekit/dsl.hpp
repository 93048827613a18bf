#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace casekit {

// The closed operation vocabulary of the program language. Every operation
// takes exactly two argument slots; table operations carry the row name in
// the first slot and the literal token "none" in the second.
enum class OpName {
  Add,
  Subtract,
  Multiply,
  Divide,
  Exp,
  Greater,
  TableSum,
  TableAverage,
  TableMax,
  TableMin,
};

enum class OpKind { Scalar, Comparison, Table };

inline constexpr int kOpArity = 2;

std::optional<OpName> op_from_token(std::string_view lowered);
std::string_view op_token(OpName op);
OpKind op_kind(OpName op);
bool op_is_commutative(OpName op);  // add and multiply only

// One argument slot. `raw` is the normalized lowercase surface token
// (numbers keep their form minus "$" and thousands separators, so the
// serialization grammar stays comma-free).
struct Operand {
  enum class Kind { Number, Constant, StepRef, Text };

  Kind kind = Kind::Text;
  double value = 0.0;      // Number / Constant: numeric value (percent not applied)
  bool percent = false;    // Number only: surface form carried a trailing '%'
  std::size_t step = 0;    // StepRef only
  std::string raw;

  static Operand number(double value, std::string raw, bool percent = false);
  static Operand constant(std::string name, double value);
  static Operand step_ref(std::size_t index);
  static Operand text(std::string raw);

  bool is_numeric() const { return kind == Kind::Number || kind == Kind::Constant; }

  // Token used in the canonical serialization and in argument sequences.
  std::string token() const;

  // Structural equality: numbers by (value, percent), constants and text by
  // normalized surface, step refs by index.
  bool operator==(const Operand& other) const;
};

struct Step {
  OpName op;
  std::array<Operand, 2> args;

  bool operator==(const Step& other) const = default;
};

// A validated operation sequence. Every StepRef points to an earlier step.
struct Program {
  std::vector<Step> steps;

  bool operator==(const Program& other) const = default;
};

// Parses the comma-separated "op(arg1, arg2)" grammar. Operation names are
// case-insensitive; "#k" references the result of step k. Throws ParseError
// with kinds UnknownOperation, MalformedSyntax, ForwardStepReference or
// EmptyProgram; the error carries the byte offset of the offending token.
Program parse_program(std::string_view input);

// Canonical lowercase rendering; parse_program(serialize_program(p)) is
// structurally equal to p.
std::string serialize_program(const Program& p);

// Per-step operation tokens, in step order.
std::vector<std::string> op_sequence(const Program& p);

// All argument surface tokens in step order, two per step.
std::vector<std::string> arg_sequence(const Program& p);

}  // namespace casekit
