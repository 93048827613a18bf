#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "casekit/dsl.hpp"
#include "casekit/errors.hpp"
#include "casekit/executor.hpp"
#include "casekit/text.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace casekit;

namespace {

TableData revenue_table() {
  TableData t;
  t.column_headers = {"2006", "2007", "2008"};
  t.rows.push_back({"revenue", {"2", "4", "6"}});
  t.rows.push_back({"risk-free interest rate", {"5%", "4%", "3%"}});
  t.rows.push_back({"net income", {"$1,200", "(300)", "1,500.5"}});
  t.rows.push_back({"sparse", {"", "7", ""}});
  return t;
}

std::string exec_error_kind(const std::string& program, const TableData* table = nullptr) {
  try {
    execute(parse_program(program), table);
  } catch (const ExecError& e) {
    return e.kind();
  }
  return "";
}

}  // namespace

TEST_CASE("subtraction over two divisions") {
  // 10/2 = 5, 9/3 = 3, 5 - 3 = 2
  ExecResult r = execute(parse_program("divide(10, 2), divide(9, 3), subtract(#0, #1)"));
  REQUIRE(r.is_numeric());
  CHECK(r.number == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("scalar semantics") {
  CHECK(execute(parse_program("add(1, 2)")).number == 3.0);
  CHECK(execute(parse_program("multiply(3, const_m1)")).number == -3.0);
  CHECK(execute(parse_program("exp(2, 10)")).number == 1024.0);
  CHECK(execute(parse_program("divide(5%, 0.1)")).number == doctest::Approx(0.5));
  CHECK(execute(parse_program("divide(const_100, 4)")).number == 25.0);
}

TEST_CASE("greater yields yes/no") {
  ExecResult yes = execute(parse_program("greater(5, 3)"));
  REQUIRE(yes.kind == ExecResult::Kind::Boolean);
  CHECK(yes.truth);
  CHECK(yes.to_string() == "yes");
  CHECK_FALSE(execute(parse_program("greater(3, 5)")).truth);
}

TEST_CASE("table aggregation over the named row") {
  TableData t = revenue_table();
  CHECK(execute(parse_program("table-average(revenue, none)"), &t).number ==
        doctest::Approx(4.0));
  CHECK(execute(parse_program("table-sum(revenue, none)"), &t).number == 12.0);
  CHECK(execute(parse_program("table-max(revenue, none)"), &t).number == 6.0);
  CHECK(execute(parse_program("table-min(revenue, none)"), &t).number == 2.0);

  // percent, currency, comma and accounting-negative cells
  CHECK(execute(parse_program("table-min(risk-free interest rate, none)"), &t).number ==
        doctest::Approx(0.03));
  CHECK(execute(parse_program("table-sum(net income, none)"), &t).number ==
        doctest::Approx(1200.0 - 300.0 + 1500.5));

  // empty cells are skipped, not treated as zero
  CHECK(execute(parse_program("table-average(sparse, none)"), &t).number == 7.0);

  // lenient row lookup folds case and spacing
  CHECK(execute(parse_program("table-sum(Revenue, none)"), &t).number == 12.0);
}

TEST_CASE("execution error classes") {
  TableData t = revenue_table();
  CHECK(exec_error_kind("divide(1, 0)") == errkind::kDivisionByZero);
  CHECK(exec_error_kind("table-sum(revenue, none)") == errkind::kMissingTable);
  CHECK(exec_error_kind("table-sum(profits, none)", &t) == errkind::kUnknownTableRow);
  CHECK(exec_error_kind("add(net revenue, 1)") == errkind::kNonNumericOperand);
  CHECK(exec_error_kind("greater(5, 3), add(#0, 1)") == errkind::kBooleanIntermediate);
  CHECK(exec_error_kind("exp(10, 4000)") == errkind::kNonFiniteResult);

  TableData bad;
  bad.column_headers = {"2006"};
  bad.rows.push_back({"notes", {"see below"}});
  CHECK(exec_error_kind("table-sum(notes, none)", &bad) == errkind::kNonNumericCell);
}

TEST_CASE("boolean result is fine when terminal, error when consumed") {
  CHECK(execute(parse_program("greater(1, 2)")).kind == ExecResult::Kind::Boolean);
  CHECK(exec_error_kind("greater(1, 2), multiply(#0, 2)") == errkind::kBooleanIntermediate);
}

TEST_CASE("answers_match tolerances") {
  MatchOptions opt;
  opt.rel_tol = 1e-5;
  CHECK(answers_match(ExecResult::numeric(2.0000001), ExecResult::numeric(2.0), opt));
  CHECK_FALSE(answers_match(ExecResult::numeric(2.1), ExecResult::numeric(2.0), opt));
  CHECK(answers_match(ExecResult::boolean(true), ExecResult::boolean(true), opt));
  CHECK_FALSE(answers_match(ExecResult::boolean(true), ExecResult::boolean(false), opt));
}

TEST_CASE("scale-lenient comparison absorbs percent-vs-fraction drift") {
  MatchOptions strict;
  CHECK_FALSE(answers_match(ExecResult::numeric(0.05), ExecResult::numeric(5.0), strict));

  MatchOptions lenient;
  lenient.scale_lenient = true;
  CHECK(answers_match(ExecResult::numeric(0.05), ExecResult::numeric(5.0), lenient));
  CHECK(answers_match(ExecResult::numeric(500.0), ExecResult::numeric(5.0), lenient));
  CHECK_FALSE(answers_match(ExecResult::numeric(0.07), ExecResult::numeric(5.0), lenient));
}

TEST_CASE("answers_match rejects boolean vs numeric comparisons") {
  CHECK_THROWS_WITH_AS(
      answers_match(ExecResult::boolean(true), ExecResult::numeric(1.0), MatchOptions{}),
      doctest::Contains("boolean"), Error);
  MatchOptions bad;
  bad.rel_tol = -1.0;
  CHECK_THROWS_AS(answers_match(ExecResult::numeric(1.0), ExecResult::numeric(1.0), bad),
                  Error);
}

TEST_CASE("cell parsing conventions") {
  using text::parse_cell_number;
  CHECK(*parse_cell_number("5%") == doctest::Approx(0.05));
  CHECK(*parse_cell_number("$1,234.5") == doctest::Approx(1234.5));
  CHECK(*parse_cell_number("(5)") == -5.0);
  CHECK(*parse_cell_number("( $1,000 )") == -1000.0);
  CHECK(*parse_cell_number(" 42 ") == 42.0);
  CHECK(*parse_cell_number("-3.5") == -3.5);
  CHECK_FALSE(parse_cell_number("n/a").has_value());
  CHECK_FALSE(parse_cell_number("-").has_value());
  CHECK_FALSE(parse_cell_number("").has_value());
}

TEST_CASE("determinism: identical inputs give bit-identical results") {
  Program p = parse_program("divide(355, 113), multiply(#0, #0), subtract(#1, 0.1)");
  double first = execute(p).number;
  for (int i = 0; i < 5; ++i) {
    CHECK(execute(p).number == first);
  }
}

TEST_CASE("execute agrees with the recursive expression-tree oracle") {
  testsupport::Rng rng(91021);
  int checked = 0;
  int failures_together = 0;
  for (int i = 0; i < 10000; ++i) {
    Program p = testsupport::random_literal_program(rng, 4);
    std::optional<testsupport::OracleValue> expected = testsupport::oracle_eval(p);
    try {
      ExecResult got = execute(p);
      REQUIRE_MESSAGE(expected.has_value(), "oracle failed where execute succeeded: "
                                                << serialize_program(p));
      REQUIRE(got.is_numeric());
      double scale = std::max({1.0, std::abs(got.number), std::abs(expected->value)});
      REQUIRE_MESSAGE(std::abs(got.number - expected->value) <= 1e-9 * scale,
                      serialize_program(p));
      ++checked;
    } catch (const ExecError&) {
      // both paths must fail together (division by zero / overflow)
      REQUIRE_MESSAGE(!expected.has_value(), serialize_program(p));
      ++failures_together;
    }
  }
  CHECK(checked > 9000);  // failures are rare corner draws
  MESSAGE("oracle agreement on ", checked, " programs, ", failures_together,
          " joint failures");
}
