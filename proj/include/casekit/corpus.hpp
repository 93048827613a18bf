#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "casekit/dsl.hpp"
#include "casekit/executor.hpp"

namespace casekit {

// A gold supporting unit inside a case's document: a text sentence (indexed
// over pre_text followed by post_text) or a raw table row (row 0 is the
// header row of the source table).
struct EvidenceRef {
  enum class Kind { Text, TableRow };

  Kind kind = Kind::Text;
  std::size_t index = 0;

  std::string unit_id() const;  // "text_<i>" / "table_<i>"
  auto operator<=>(const EvidenceRef&) const = default;
};

// One dataset entry: the question, its gold program and executable answer,
// and the source document (text sentences plus a table).
struct CaseRecord {
  std::string id;
  std::string question;
  std::string program_text;  // raw program string from the source file
  Program program;
  ExecResult gold_answer;
  std::vector<std::string> pre_text;
  std::vector<std::string> post_text;
  TableData table;                               // data rows (header row split off)
  std::vector<std::vector<std::string>> raw_table;  // source table, row 0 = headers
  std::set<EvidenceRef> gold_evidence;
  // unit id -> source content, when the source stores evidence as an object
  std::map<std::string, std::string> gold_evidence_content;

  std::size_t text_unit_count() const { return pre_text.size() + post_text.size(); }
  const std::string& text_unit(std::size_t i) const;
};

struct CaseRepository {
  std::vector<CaseRecord> records;
  std::unordered_map<std::string, std::size_t> by_id;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  const CaseRecord* find(std::string_view id) const;
  const CaseRecord& at(std::string_view id) const;  // throws Error(UnknownQueryId)
  void add(CaseRecord record);                      // throws on duplicate id
};

// Maps the source file's field names onto CaseRecord fields. Paths are
// dot-separated ("qa.program"). The defaults match the public dataset
// release.
struct FieldMap {
  std::string id = "id";
  std::string question = "qa.question";
  std::string program = "qa.program";
  std::string exec_answer = "qa.exe_ans";
  std::string pre_text = "pre_text";
  std::string post_text = "post_text";
  std::string table = "table";
  std::string gold_evidence = "qa.gold_inds";
};

struct IngestIssue {
  std::string id;      // record id, or "entry[<n>]" when the id is missing
  std::string kind;    // error kind tag
  std::string detail;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::vector<IngestIssue> rejected;  // records kept out of the repository
  std::vector<IngestIssue> warnings;  // kept, with a normalization note
};

// Loads a JSON array of records, validating every entry (program parses,
// evidence indices resolve, answer well-typed). Invalid entries land in the
// report instead of the repository. Throws Error(IoError/SchemaMismatch) only
// for file-level failures.
CaseRepository ingest(const std::filesystem::path& file, const FieldMap& fm,
                      IngestReport& report);

// Rebuilds the source JSON fields of a record under the field map; ingestion
// is lossless modulo validation, so this reproduces the source entry.
nlohmann::ordered_json record_to_json(const CaseRecord& record, const FieldMap& fm);

enum class LinearizeMode { PerCell, PerRow };

struct LinearizedTable {
  std::vector<std::string> sentences;
  std::size_t skipped_cells = 0;
};

// Renders table cells as sentences: "the <row header> of <column header> was
// <cell>". PerCell emits one sentence per non-empty cell in row-major order;
// PerRow joins each row's cell sentences with " ; ".
LinearizedTable linearize_table(const TableData& t, LinearizeMode mode);

// Retrieval units of a record's own document: ("text_<i>", sentence) for the
// text, ("table_<j>", per-row linearization) for raw table rows (the header
// row linearizes to its cell texts).
std::vector<std::pair<std::string, std::string>> document_units(const CaseRecord& r);

struct CorpusStats {
  std::size_t total = 0;

  // question type, from gold evidence annotations
  std::size_t text_only = 0;
  std::size_t table_only = 0;
  std::size_t text_and_table = 0;
  std::size_t unannotated = 0;  // excluded from the three fractions
  double frac_text_only = 0.0;
  double frac_table_only = 0.0;
  double frac_text_and_table = 0.0;

  // reasoning depth
  std::size_t one_step = 0;
  std::size_t two_step = 0;
  std::size_t three_plus_step = 0;
  double frac_one_step = 0.0;
  double frac_two_step = 0.0;
  double frac_three_plus_step = 0.0;

  // operand-based diagnostic: programs that touch the table at all
  double table_op_fraction = 0.0;
};

CorpusStats compute_stats(const CaseRepository& repo);

struct EvidenceRecallOptions {
  std::size_t k = 3;
  bool use_bm25 = true;  // false: tf-idf
  int threads = 0;
};

struct EvidenceRecallResult {
  double recall = 0.0;         // mean over records with gold evidence
  std::size_t evaluated = 0;
  std::size_t skipped_empty = 0;  // records without gold evidence
};

// Indexes each record's own document units and measures
// |retrieved@k ∩ gold| / |gold| with the question as the query.
EvidenceRecallResult evidence_recall(const CaseRepository& repo,
                                     const EvidenceRecallOptions& opt);

}  // namespace casekit
