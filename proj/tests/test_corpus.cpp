#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "casekit/corpus.hpp"
#include "casekit/errors.hpp"
#include "support/generators.hpp"

using namespace casekit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path data_dir() {
  const char* env = std::getenv("CASEKIT_TEST_DATA");
  REQUIRE_MESSAGE(env != nullptr, "CASEKIT_TEST_DATA must point at tests/data");
  return fs::path(env);
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("casekit_corpus_" + name);
}

}  // namespace

TEST_CASE("sample file ingests with the default field map") {
  IngestReport report;
  CaseRepository repo = ingest(data_dir() / "sample_train.json", FieldMap{}, report);

  CHECK(report.accepted == 4);
  CHECK(repo.size() == 4);
  REQUIRE(report.rejected.size() == 2);
  CHECK(report.rejected[0].id == "delta/2008/page_9.pdf-1");
  CHECK(report.rejected[0].kind == errkind::kUnparsableProgram);
  CHECK(report.rejected[1].id == "epsilon/2005/page_2.pdf-4");
  CHECK(report.rejected[1].kind == errkind::kDanglingEvidence);

  const CaseRecord& alpha = repo.at("alpha/2006/page_12.pdf-1");
  CHECK(alpha.question == "what was the ratio of net revenue in 2006 to 2005 ?");
  CHECK(alpha.program.steps.size() == 1);
  CHECK(alpha.gold_answer.number == 2.0);
  CHECK(alpha.pre_text.size() == 2);
  CHECK(alpha.table.rows.size() == 2);
  CHECK(alpha.table.column_headers == std::vector<std::string>{"2006", "2005"});
  REQUIRE(alpha.gold_evidence.size() == 1);
  CHECK(alpha.gold_evidence.begin()->unit_id() == "text_1");

  // boolean answers arrive as yes/no strings
  const CaseRecord& beta = repo.at("alpha/2006/page_12.pdf-2");
  CHECK(beta.gold_answer.kind == ExecResult::Kind::Boolean);
  CHECK(beta.gold_answer.truth);
}

TEST_CASE("serialize-back reproduces the source fields") {
  IngestReport report;
  fs::path file = data_dir() / "sample_train.json";
  CaseRepository repo = ingest(file, FieldMap{}, report);

  std::ifstream in(file);
  json source;
  in >> source;

  for (const json& entry : source) {
    std::string id = entry["id"].get<std::string>();
    const CaseRecord* rec = repo.find(id);
    if (rec == nullptr) continue;  // rejected fixtures
    json back = record_to_json(*rec, FieldMap{});
    CHECK(back == entry);
  }
}

TEST_CASE("missing file and malformed JSON are file-level errors") {
  IngestReport report;
  CHECK_THROWS_AS(ingest("/nonexistent/nowhere.json", FieldMap{}, report), Error);

  fs::path bad = temp_file("bad.json");
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_AS(ingest(bad, FieldMap{}, report), Error);

  fs::path object = temp_file("object.json");
  std::ofstream(object) << "{\"a\": 1}";
  CHECK_THROWS_AS(ingest(object, FieldMap{}, report), Error);
}

TEST_CASE("a custom field map relocates every field") {
  json entry;
  entry["key"] = "one";
  entry["q"] = "what is it ?";
  entry["prog"] = "add(1, 2)";
  entry["ans"] = 3.0;
  entry["before"] = json::array({"sentence zero ."});
  entry["after"] = json::array();
  entry["grid"] = json::array({json::array({"", "2006"}), json::array({"x", "1"})});
  entry["refs"] = json::array({"text_0"});
  fs::path file = temp_file("custom_map.json");
  std::ofstream(file) << json::array({entry}).dump();

  FieldMap fm;
  fm.id = "key";
  fm.question = "q";
  fm.program = "prog";
  fm.exec_answer = "ans";
  fm.pre_text = "before";
  fm.post_text = "after";
  fm.table = "grid";
  fm.gold_evidence = "refs";

  IngestReport report;
  CaseRepository repo = ingest(file, fm, report);
  REQUIRE(repo.size() == 1);
  CHECK(repo.records[0].id == "one");
  CHECK(repo.records[0].program.steps.size() == 1);
}

TEST_CASE("duplicate ids are rejected, not silently merged") {
  json entry;
  entry["id"] = "dup";
  entry["qa"] = {{"question", "q ?"},
                 {"program", "add(1, 2)"},
                 {"exe_ans", 3.0},
                 {"gold_inds", json::object()}};
  entry["pre_text"] = json::array({"s ."});
  entry["post_text"] = json::array();
  entry["table"] = json::array();
  fs::path file = temp_file("dup.json");
  std::ofstream(file) << json::array({entry, entry}).dump();

  IngestReport report;
  CaseRepository repo = ingest(file, FieldMap{}, report);
  CHECK(repo.size() == 1);
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0].kind == errkind::kSchemaMismatch);
}

TEST_CASE("linearization follows the sentence template") {
  TableData t;
  t.column_headers = {"2006"};
  t.rows.push_back({"risk-free interest rate", {"5%"}});

  LinearizedTable lin = linearize_table(t, LinearizeMode::PerCell);
  REQUIRE(lin.sentences.size() == 1);
  CHECK(lin.sentences[0] == "the risk-free interest rate of 2006 was 5%");
}

TEST_CASE("per-cell linearization is row-major and skips empties") {
  TableData t;
  t.column_headers = {"2006", "2007"};
  t.rows.push_back({"revenue", {"1", "2"}});
  t.rows.push_back({"costs", {"3", "4"}});

  LinearizedTable lin = linearize_table(t, LinearizeMode::PerCell);
  REQUIRE(lin.sentences.size() == 4);
  CHECK(lin.sentences[0] == "the revenue of 2006 was 1");
  CHECK(lin.sentences[1] == "the revenue of 2007 was 2");
  CHECK(lin.sentences[2] == "the costs of 2006 was 3");
  CHECK(lin.sentences[3] == "the costs of 2007 was 4");
  CHECK(lin.skipped_cells == 0);

  TableData sparse;
  sparse.column_headers = {"2006", "2007"};
  sparse.rows.push_back({"revenue", {"", "2"}});
  LinearizedTable sparse_lin = linearize_table(sparse, LinearizeMode::PerCell);
  CHECK(sparse_lin.sentences.size() == 1);
  CHECK(sparse_lin.skipped_cells == 1);
}

TEST_CASE("empty tables linearize to nothing") {
  TableData t;
  CHECK(linearize_table(t, LinearizeMode::PerCell).sentences.empty());
  CHECK(linearize_table(t, LinearizeMode::PerRow).sentences.empty());
}

TEST_CASE("per-row mode emits one sentence per row") {
  TableData t;
  t.column_headers = {"2006", "2007"};
  t.rows.push_back({"revenue", {"1", "2"}});
  LinearizedTable lin = linearize_table(t, LinearizeMode::PerRow);
  REQUIRE(lin.sentences.size() == 1);
  CHECK(lin.sentences[0] ==
        "the revenue of 2006 was 1 ; the revenue of 2007 was 2");
}

TEST_CASE("document units cover text and raw table rows") {
  IngestReport report;
  CaseRepository repo = ingest(data_dir() / "sample_train.json", FieldMap{}, report);
  const CaseRecord& alpha = repo.at("alpha/2006/page_12.pdf-1");
  auto units = document_units(alpha);
  // 2 pre + 1 post + 3 raw table rows (header + 2 data)
  REQUIRE(units.size() == 6);
  CHECK(units[0].first == "text_0");
  CHECK(units[3].first == "table_0");
  CHECK(units[4].first == "table_1");
  // every gold evidence id resolves to a unit
  for (const EvidenceRef& ref : alpha.gold_evidence) {
    bool found = false;
    for (const auto& [id, _] : units) found |= id == ref.unit_id();
    CHECK(found);
  }
}

TEST_CASE("stats on a single-record repository") {
  json entry;
  entry["id"] = "solo";
  entry["qa"] = {{"question", "q ?"},
                 {"program", "add(1, 2)"},
                 {"exe_ans", 3.0},
                 {"gold_inds", {{"text_0", "s ."}}}};
  entry["pre_text"] = json::array({"s ."});
  entry["post_text"] = json::array();
  entry["table"] = json::array();
  fs::path file = temp_file("solo.json");
  std::ofstream(file) << json::array({entry}).dump();

  IngestReport report;
  CaseRepository repo = ingest(file, FieldMap{}, report);
  CorpusStats stats = compute_stats(repo);
  CHECK(stats.total == 1);
  CHECK(stats.frac_one_step == 1.0);
  CHECK(stats.frac_text_only == 1.0);
  CHECK(stats.table_op_fraction == 0.0);
}

TEST_CASE("stats fractions sum to one per family on the synthetic corpus") {
  testsupport::FixtureOptions opt;
  opt.records = 80;
  fs::path file = temp_file("fixture_stats.json");
  testsupport::write_fixture(file.string(), testsupport::build_fixture_split(opt, "train"));

  IngestReport report;
  CaseRepository repo = ingest(file, FieldMap{}, report);
  REQUIRE(repo.size() == 80);
  CHECK(report.rejected.empty());

  CorpusStats stats = compute_stats(repo);
  CHECK(stats.frac_text_only + stats.frac_table_only + stats.frac_text_and_table ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(stats.frac_one_step + stats.frac_two_step + stats.frac_three_plus_step ==
        doctest::Approx(1.0).epsilon(1e-9));
  // evidence classes follow the configured 5/12/3 per-20 split
  CHECK(stats.frac_text_only == doctest::Approx(0.25));
  CHECK(stats.frac_table_only == doctest::Approx(0.60));
  CHECK(stats.frac_text_and_table == doctest::Approx(0.15));
}

TEST_CASE("evidence recall reaches 1.0 when k spans the whole document") {
  IngestReport report;
  CaseRepository repo = ingest(data_dir() / "sample_train.json", FieldMap{}, report);
  EvidenceRecallOptions opt;
  opt.k = 64;  // larger than any document in the sample
  EvidenceRecallResult result = evidence_recall(repo, opt);
  CHECK(result.recall == doctest::Approx(1.0));
  CHECK(result.evaluated == repo.size());
  CHECK(result.skipped_empty == 0);
}

TEST_CASE("records without gold evidence are skipped and counted") {
  json entry;
  entry["id"] = "noev";
  entry["qa"] = {{"question", "q ?"},
                 {"program", "add(1, 2)"},
                 {"exe_ans", 3.0},
                 {"gold_inds", json::object()}};
  entry["pre_text"] = json::array({"s ."});
  entry["post_text"] = json::array();
  entry["table"] = json::array();
  fs::path file = temp_file("noev.json");
  std::ofstream(file) << json::array({entry}).dump();

  IngestReport report;
  CaseRepository repo = ingest(file, FieldMap{}, report);
  EvidenceRecallResult result = evidence_recall(repo, EvidenceRecallOptions{});
  CHECK(result.evaluated == 0);
  CHECK(result.skipped_empty == 1);
}
