#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include "casekit/corpus.hpp"
#include "casekit/errors.hpp"
#include "casekit/io.hpp"
#include "casekit/metrics.hpp"
#include "support/generators.hpp"

using namespace casekit;
namespace fs = std::filesystem;

namespace {

fs::path data_dir() {
  const char* env = std::getenv("CASEKIT_TEST_DATA");
  REQUIRE_MESSAGE(env != nullptr, "CASEKIT_TEST_DATA must point at tests/data");
  return fs::path(env);
}

CaseRepository sample_repo() {
  IngestReport report;
  return ingest(data_dir() / "sample_train.json", FieldMap{}, report);
}

std::vector<PredictionRecord> gold_as_predictions(const CaseRepository& repo) {
  std::vector<PredictionRecord> preds;
  for (const CaseRecord& r : repo.records) {
    preds.push_back({r.id, r.program_text, std::nullopt});
  }
  return preds;
}

RetrievalResult ranked(const std::string& query, std::vector<std::string> ids) {
  RetrievalResult r;
  r.query_id = query;
  r.k = ids.size();
  double score = 1.0;
  for (const std::string& id : ids) {
    r.ranked.emplace_back(id, score);
    score -= 0.1;
  }
  return r;
}

GoldCaseSet gold_set(const std::string& query, std::vector<std::string> ids) {
  GoldCaseSet g;
  g.query_id = query;
  for (const std::string& id : ids) g.gold.emplace_back(id, 1.0);
  return g;
}

}  // namespace

TEST_CASE("gold-as-predictions scores 1.0 on all three accuracies") {
  CaseRepository repo = sample_repo();
  EvalReport report = evaluate_predictions(gold_as_predictions(repo), repo);
  CHECK(report.execution_accuracy == 1.0);
  CHECK(report.program_accuracy == 1.0);
  CHECK(report.operator_accuracy == 1.0);
  CHECK(report.operator_token_accuracy == 1.0);
  CHECK(report.total == repo.size());
  CHECK(report.unparsable == 0);
  CHECK(report.exec_errors == 0);
}

TEST_CASE("all-unparsable predictions score zero everywhere") {
  CaseRepository repo = sample_repo();
  std::vector<PredictionRecord> preds;
  for (const CaseRecord& r : repo.records) {
    preds.push_back({r.id, "this is not a program", std::nullopt});
  }
  EvalReport report = evaluate_predictions(preds, repo);
  CHECK(report.execution_accuracy == 0.0);
  CHECK(report.program_accuracy == 0.0);
  CHECK(report.operator_accuracy == 0.0);
  CHECK(report.unparsable == report.total);
}

TEST_CASE("coincidentally correct answers are flagged exec-correct/program-wrong") {
  CaseRepository repo = sample_repo();
  // gamma's answer is 2.0; add(1, 1) reaches it with a different program
  std::vector<PredictionRecord> preds{
      {"gamma/2008/page_7.pdf-5", "add(1, 1)", std::nullopt}};
  EvalReport report = evaluate_predictions(preds, repo);
  CHECK(report.execution_accuracy == 1.0);
  CHECK(report.program_accuracy == 0.0);
  REQUIRE(report.verdicts.size() == 1);
  CHECK(report.verdicts[0].exec_correct_program_wrong);
}

TEST_CASE("program accuracy accepts canonical equivalence") {
  CaseRepository repo = sample_repo();
  std::vector<PredictionRecord> preds{
      // reordered independent divides with renumbered references
      {"gamma/2008/page_7.pdf-5", "divide(9, 3), divide(10, 2), subtract(#1, #0)",
       std::nullopt}};
  EvalReport report = evaluate_predictions(preds, repo);
  CHECK(report.execution_accuracy == 1.0);
  CHECK(report.program_accuracy == 1.0);
  CHECK(report.operator_accuracy == 1.0);
}

TEST_CASE("operand-swapped subtraction is rejected even when values coincide") {
  // the two divisions evaluate to the same value, so the swapped program
  // executes identically, yet it is a different program
  testsupport::FixtureOptions opt;
  opt.records = 8;
  fs::path file = fs::temp_directory_path() / "casekit_metrics_swap.json";
  nlohmann::json split = testsupport::build_fixture_split(opt, "train");
  // overwrite one record with the symmetric construction
  split[0]["qa"]["program"] = "divide(10, 2), add(2, 3), subtract(#0, #1)";
  split[0]["qa"]["exe_ans"] = 0.0;
  testsupport::write_fixture(file.string(), split);
  IngestReport report;
  CaseRepository repo = ingest(file, FieldMap{}, report);
  std::string id = split[0]["id"].get<std::string>();

  std::vector<PredictionRecord> preds{
      {id, "divide(10, 2), add(2, 3), subtract(#1, #0)", std::nullopt}};
  EvalReport eval = evaluate_predictions(preds, repo);
  CHECK(eval.execution_accuracy == 1.0);  // 5 - 5 == 5 - 5
  CHECK(eval.program_accuracy == 0.0);    // but the structure differs
}

TEST_CASE("operator accuracy is an operator-only criterion") {
  CaseRepository repo = sample_repo();
  SUBCASE("same operators, different arguments: correct") {
    std::vector<PredictionRecord> preds{
        {"alpha/2006/page_12.pdf-1", "divide(999, 111)", std::nullopt}};
    EvalReport report = evaluate_predictions(preds, repo);
    CHECK(report.operator_accuracy == 1.0);
    CHECK(report.execution_accuracy == 0.0);
    CHECK(report.program_accuracy == 0.0);
  }
  SUBCASE("different operator sequence: wrong") {
    std::vector<PredictionRecord> preds{
        {"gamma/2008/page_7.pdf-5", "divide(10, 2), divide(9, 3), add(#0, #1)",
         std::nullopt}};
    EvalReport report = evaluate_predictions(preds, repo);
    CHECK(report.operator_accuracy == 0.0);
  }
}

TEST_CASE("execution errors count as wrong and are classified") {
  CaseRepository repo = sample_repo();
  std::vector<PredictionRecord> preds{
      {"alpha/2006/page_12.pdf-1", "divide(1, 0)", std::nullopt}};
  EvalReport report = evaluate_predictions(preds, repo);
  CHECK(report.execution_accuracy == 0.0);
  CHECK(report.exec_errors == 1);
  CHECK(report.verdicts[0].exec_error == errkind::kDivisionByZero);
}

TEST_CASE("unknown prediction ids abort the run") {
  CaseRepository repo = sample_repo();
  std::vector<PredictionRecord> preds{{"ghost", "add(1, 2)", std::nullopt}};
  CHECK_THROWS_AS(evaluate_predictions(preds, repo), Error);
}

TEST_CASE("verdict counts partition the prediction set") {
  CaseRepository repo = sample_repo();
  std::vector<PredictionRecord> preds{
      {"alpha/2006/page_12.pdf-1", "divide(100, 50)", std::nullopt},   // correct
      {"alpha/2006/page_12.pdf-2", "greater(3, 5)", std::nullopt},      // wrong answer
      {"beta/2007/page_3.pdf-1", "divide(1, 0)", std::nullopt},         // exec error
      {"gamma/2008/page_7.pdf-5", "not a program", std::nullopt},       // unparsable
  };
  EvalReport report = evaluate_predictions(preds, repo);
  CHECK(report.total == 4);
  CHECK(report.exe_correct == 1);
  CHECK(report.exe_wrong == 1);
  CHECK(report.exec_errors == 1);
  CHECK(report.unparsable == 1);
  CHECK(report.exe_correct + report.exe_wrong + report.exec_errors + report.unparsable ==
        report.total);
}

TEST_CASE("metrics are invariant under prediction order") {
  CaseRepository repo = sample_repo();
  std::vector<PredictionRecord> preds = gold_as_predictions(repo);
  preds[1].program_text = "subtract(1, 2)";  // corrupt one
  EvalReport forward = evaluate_predictions(preds, repo);
  std::reverse(preds.begin(), preds.end());
  EvalReport backward = evaluate_predictions(preds, repo);
  CHECK(forward.execution_accuracy == backward.execution_accuracy);
  CHECK(forward.program_accuracy == backward.program_accuracy);
  CHECK(forward.operator_accuracy == backward.operator_accuracy);
}

TEST_CASE("operator accuracy dominates program accuracy on random harness runs") {
  testsupport::Rng rng(1123);
  testsupport::FixtureOptions opt;
  opt.records = 40;
  fs::path file = fs::temp_directory_path() / "casekit_metrics_fixture.json";
  testsupport::write_fixture(file.string(),
                             testsupport::build_fixture_split(opt, "train"));
  IngestReport ingest_report;
  CaseRepository repo = ingest(file, FieldMap{}, ingest_report);

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<PredictionRecord> preds;
    for (const CaseRecord& r : repo.records) {
      double roll = rng.uniform(0.0, 1.0);
      if (roll < 0.4) {
        preds.push_back({r.id, r.program_text, std::nullopt});
      } else if (roll < 0.6) {
        preds.push_back({r.id, serialize_program(testsupport::random_program(rng, 3)),
                         std::nullopt});
      } else if (roll < 0.8) {
        preds.push_back(
            {r.id, serialize_program(testsupport::equivalent_mutation(rng, r.program)),
             std::nullopt});
      } else {
        preds.push_back({r.id, "garbage text", std::nullopt});
      }
    }
    EvalReport report = evaluate_predictions(preds, repo);
    CHECK(report.operator_accuracy >= report.program_accuracy);
    for (const VerdictRow& row : report.verdicts) {
      if (row.prog_correct) CHECK(row.ops_correct);
    }
  }
}

TEST_CASE("precision@k counts gold hits over a fixed denominator") {
  std::map<std::string, GoldCaseSet> gold;
  gold["q"] = gold_set("q", {"B", "C"});
  std::vector<RetrievalResult> results{ranked("q", {"B", "X", "C"})};
  CHECK(precision_at_k(results, gold, 3) == doctest::Approx(2.0 / 3.0));
  CHECK(precision_at_k(results, gold, 1) == doctest::Approx(1.0));
}

TEST_CASE("retrievers that lead with gold reach 1.0 whenever |gold| >= k") {
  std::map<std::string, GoldCaseSet> gold;
  gold["q1"] = gold_set("q1", {"a", "b", "c"});
  gold["q2"] = gold_set("q2", {"d", "e", "f", "g"});
  std::vector<RetrievalResult> results{ranked("q1", {"a", "b", "c"}),
                                       ranked("q2", {"g", "f", "e"})};
  CHECK(precision_at_k(results, gold, 3) == doctest::Approx(1.0));
}

TEST_CASE("queries with empty gold sets are excluded and counted") {
  std::map<std::string, GoldCaseSet> gold;
  gold["q1"] = gold_set("q1", {"a"});
  gold["q2"] = gold_set("q2", {});
  std::vector<RetrievalResult> results{ranked("q1", {"a", "x"}),
                                       ranked("q2", {"a", "x"})};
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  double p = precision_at_k(results, gold, 2, &evaluated, &skipped);
  CHECK(p == doctest::Approx(0.5));
  CHECK(evaluated == 1);
  CHECK(skipped == 1);
}

TEST_CASE("a missing gold set is an error, distinct from an empty one") {
  std::map<std::string, GoldCaseSet> gold;
  std::vector<RetrievalResult> results{ranked("q", {"a"})};
  CHECK_THROWS_AS(precision_at_k(results, gold, 1), Error);
}

TEST_CASE("prediction file round-trip") {
  fs::path file = fs::temp_directory_path() / "casekit_preds_roundtrip.tsv";
  std::vector<PredictionRecord> preds{
      {"id1", "divide(10, 2)", 5.0},
      {"id2", "table-average(net revenue, none)", std::nullopt},
  };
  save_predictions(file, preds);
  std::vector<PredictionRecord> back = load_predictions(file);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "id1");
  CHECK(back[0].program_text == "divide(10, 2)");
  CHECK(back[0].predicted_answer == 5.0);
  CHECK(back[1].predicted_answer == std::nullopt);
}

TEST_CASE("sample prediction file scores as constructed") {
  CaseRepository repo = sample_repo();
  std::vector<PredictionRecord> preds = load_predictions(data_dir() / "sample_predictions.tsv");
  EvalReport report = evaluate_predictions(preds, repo);
  // 3 of 4 correct by construction: one greater() with swapped operands
  CHECK(report.execution_accuracy == doctest::Approx(0.75));
  CHECK(report.program_accuracy == doctest::Approx(0.75));
  CHECK(report.operator_accuracy == doctest::Approx(1.0));  // ops match everywhere
}
