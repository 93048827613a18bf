#include "casekit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "casekit/errors.hpp"
#include "casekit/parallel.hpp"
#include "casekit/retrieval.hpp"
#include "casekit/text.hpp"

namespace casekit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Walks a dot-separated path ("qa.program") into nested objects.
const json* find_path(const json& root, std::string_view path) {
  const json* cur = &root;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t dot = path.find('.', start);
    std::string_view key =
        dot == std::string_view::npos ? path.substr(start) : path.substr(start, dot - start);
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(std::string(key));
    if (it == cur->end()) return nullptr;
    cur = &*it;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return cur;
}

void set_path(ordered_json& root, std::string_view path, ordered_json value) {
  ordered_json* cur = &root;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = path.find('.', start);
    std::string key(dot == std::string_view::npos ? path.substr(start)
                                                  : path.substr(start, dot - start));
    if (dot == std::string_view::npos) {
      (*cur)[key] = std::move(value);
      return;
    }
    cur = &(*cur)[key];
    start = dot + 1;
  }
}

std::vector<std::string> string_list(const json& j, const std::string& field) {
  if (!j.is_array()) {
    throw Error(errkind::kSchemaMismatch, "field '" + field + "' must be an array of strings");
  }
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_string()) {
      throw Error(errkind::kSchemaMismatch, "field '" + field + "' must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

ExecResult parse_gold_answer(const json& j, std::vector<IngestIssue>& warnings,
                             const std::string& id) {
  if (j.is_number()) return ExecResult::numeric(j.get<double>());
  if (j.is_boolean()) return ExecResult::boolean(j.get<bool>());
  if (j.is_string()) {
    std::string s = text::to_lower(text::trim(j.get<std::string>()));
    if (s == "yes") return ExecResult::boolean(true);
    if (s == "no") return ExecResult::boolean(false);
    if (auto v = text::parse_cell_number(s)) {
      warnings.push_back({id, errkind::kSchemaMismatch,
                          "answer stored as string '" + s + "', parsed as number"});
      return ExecResult::numeric(*v);
    }
  }
  throw Error(errkind::kSchemaMismatch, "answer is neither numeric nor yes/no");
}

std::optional<EvidenceRef> parse_evidence_key(std::string_view key) {
  auto parse_index = [](std::string_view digits) -> std::optional<std::size_t> {
    if (digits.empty()) return std::nullopt;
    std::size_t v = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    return v;
  };
  if (key.rfind("text_", 0) == 0) {
    if (auto i = parse_index(key.substr(5))) return EvidenceRef{EvidenceRef::Kind::Text, *i};
  } else if (key.rfind("table_", 0) == 0) {
    if (auto i = parse_index(key.substr(6))) return EvidenceRef{EvidenceRef::Kind::TableRow, *i};
  }
  return std::nullopt;
}

// Sentence for one data cell, matching the linearization template.
std::string cell_sentence(const std::string& row_header, const std::string& col_header,
                          const std::string& cell) {
  return "the " + row_header + " of " + col_header + " was " + cell;
}

std::string raw_row_sentence(const std::vector<std::vector<std::string>>& raw_table,
                             std::size_t row_index) {
  const std::vector<std::string>& row = raw_table[row_index];
  if (row_index == 0) {
    // the header row linearizes to its cell texts
    std::string out;
    for (const std::string& cell : row) {
      std::string c = text::trim(cell);
      if (c.empty()) continue;
      if (!out.empty()) out += " ; ";
      out += c;
    }
    return out;
  }
  const std::vector<std::string>& headers = raw_table[0];
  std::string out;
  std::string row_header = row.empty() ? std::string() : text::trim(row[0]);
  for (std::size_t c = 1; c < row.size(); ++c) {
    std::string cell = text::trim(row[c]);
    if (cell.empty()) continue;
    std::string col = c < headers.size() ? text::trim(headers[c]) : std::string();
    if (!out.empty()) out += " ; ";
    out += cell_sentence(row_header, col, cell);
  }
  return out;
}

}  // namespace

std::string EvidenceRef::unit_id() const {
  return (kind == Kind::Text ? "text_" : "table_") + std::to_string(index);
}

const std::string& CaseRecord::text_unit(std::size_t i) const {
  if (i < pre_text.size()) return pre_text[i];
  return post_text.at(i - pre_text.size());
}

const CaseRecord* CaseRepository::find(std::string_view id) const {
  auto it = by_id.find(std::string(id));
  if (it == by_id.end()) return nullptr;
  return &records[it->second];
}

const CaseRecord& CaseRepository::at(std::string_view id) const {
  const CaseRecord* r = find(id);
  if (r == nullptr) {
    throw Error(errkind::kUnknownQueryId, "no case with id '" + std::string(id) + "'");
  }
  return *r;
}

void CaseRepository::add(CaseRecord record) {
  auto [it, inserted] = by_id.try_emplace(record.id, records.size());
  if (!inserted) {
    throw Error(errkind::kSchemaMismatch, "duplicate case id '" + record.id + "'");
  }
  records.push_back(std::move(record));
}

CaseRepository ingest(const std::filesystem::path& file, const FieldMap& fm,
                      IngestReport& report) {
  std::ifstream in(file);
  if (!in) {
    throw Error(errkind::kIoError, "cannot open '" + file.string() + "'");
  }
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw Error(errkind::kSchemaMismatch,
                "invalid JSON in '" + file.string() + "': " + e.what());
  }
  if (!root.is_array()) {
    throw Error(errkind::kSchemaMismatch,
                "expected a top-level JSON array in '" + file.string() + "'");
  }

  CaseRepository repo;
  for (std::size_t n = 0; n < root.size(); ++n) {
    const json& entry = root[n];
    std::string id = "entry[" + std::to_string(n) + "]";
    try {
      if (!entry.is_object()) {
        throw Error(errkind::kSchemaMismatch, "entry is not an object");
      }
      const json* idj = find_path(entry, fm.id);
      if (idj != nullptr && idj->is_string()) id = idj->get<std::string>();
      auto require = [&](const std::string& path) -> const json& {
        const json* j = find_path(entry, path);
        if (j == nullptr) {
          throw Error(errkind::kSchemaMismatch, "missing field '" + path + "'");
        }
        return *j;
      };

      CaseRecord rec;
      rec.id = id;
      if (idj == nullptr) {
        throw Error(errkind::kSchemaMismatch, "missing field '" + fm.id + "'");
      }

      const json& qj = require(fm.question);
      if (!qj.is_string()) {
        throw Error(errkind::kSchemaMismatch, "field '" + fm.question + "' must be a string");
      }
      rec.question = qj.get<std::string>();

      const json& pj = require(fm.program);
      if (!pj.is_string()) {
        throw Error(errkind::kSchemaMismatch, "field '" + fm.program + "' must be a string");
      }
      rec.program_text = pj.get<std::string>();
      try {
        rec.program = parse_program(rec.program_text);
      } catch (const ParseError& e) {
        throw Error(errkind::kUnparsableProgram,
                    std::string(e.kind()) + ": " + e.what());
      }

      rec.gold_answer = parse_gold_answer(require(fm.exec_answer), report.warnings, id);
      rec.pre_text = string_list(require(fm.pre_text), fm.pre_text);
      rec.post_text = string_list(require(fm.post_text), fm.post_text);

      // table: array of rows; row 0 carries the column headers
      const json& tj = require(fm.table);
      if (!tj.is_array()) {
        throw Error(errkind::kSchemaMismatch, "field '" + fm.table + "' must be an array");
      }
      std::size_t width = 0;
      for (const auto& rowj : tj) {
        if (!rowj.is_array()) {
          throw Error(errkind::kSchemaMismatch, "table rows must be arrays");
        }
        std::vector<std::string> row;
        row.reserve(rowj.size());
        for (const auto& cellj : rowj) {
          if (cellj.is_string()) {
            row.push_back(cellj.get<std::string>());
          } else if (cellj.is_number()) {
            row.push_back(text::canonical_number(cellj.get<double>()));
            report.warnings.push_back({id, errkind::kSchemaMismatch,
                                       "numeric table cell converted to text"});
          } else {
            throw Error(errkind::kSchemaMismatch, "table cells must be strings");
          }
        }
        width = std::max(width, row.size());
        rec.raw_table.push_back(std::move(row));
      }
      if (!rec.raw_table.empty()) {
        bool padded = false;
        for (auto& row : rec.raw_table) {
          while (row.size() < width) {
            row.push_back("");
            padded = true;
          }
        }
        if (padded) {
          report.warnings.push_back({id, errkind::kSchemaMismatch,
                                     "ragged table rows padded to uniform width"});
        }
        const auto& header_row = rec.raw_table[0];
        rec.table.column_headers.assign(header_row.begin() + (header_row.empty() ? 0 : 1),
                                        header_row.end());
        std::unordered_set<std::string> seen_headers;
        for (std::size_t r = 1; r < rec.raw_table.size(); ++r) {
          TableData::Row row;
          row.header = rec.raw_table[r].empty() ? std::string() : rec.raw_table[r][0];
          row.cells.assign(rec.raw_table[r].begin() + (rec.raw_table[r].empty() ? 0 : 1),
                           rec.raw_table[r].end());
          if (!seen_headers.insert(row.header).second) {
            report.warnings.push_back({id, errkind::kSchemaMismatch,
                                       "duplicate table row header '" + row.header +
                                           "' (lookups use the first)"});
          }
          rec.table.rows.push_back(std::move(row));
        }
      }

      // gold evidence: object keyed by unit id, or an array of unit ids
      const json& gj = require(fm.gold_evidence);
      auto add_evidence = [&](const std::string& key) {
        auto ref = parse_evidence_key(key);
        if (!ref) {
          throw Error(errkind::kDanglingEvidence, "unrecognized evidence key '" + key + "'");
        }
        if (ref->kind == EvidenceRef::Kind::Text) {
          if (ref->index >= rec.text_unit_count()) {
            throw Error(errkind::kDanglingEvidence,
                        "evidence '" + key + "' exceeds " +
                            std::to_string(rec.text_unit_count()) + " text sentences");
          }
        } else if (ref->index >= rec.raw_table.size()) {
          throw Error(errkind::kDanglingEvidence,
                      "evidence '" + key + "' exceeds " +
                          std::to_string(rec.raw_table.size()) + " table rows");
        }
        rec.gold_evidence.insert(*ref);
      };
      if (gj.is_object()) {
        for (auto it = gj.begin(); it != gj.end(); ++it) {
          add_evidence(it.key());
          if (it.value().is_string()) {
            rec.gold_evidence_content[it.key()] = it.value().get<std::string>();
          }
        }
      } else if (gj.is_array()) {
        for (const auto& item : gj) {
          if (!item.is_string()) {
            throw Error(errkind::kDanglingEvidence, "evidence list must contain unit ids");
          }
          add_evidence(item.get<std::string>());
        }
      } else {
        throw Error(errkind::kSchemaMismatch,
                    "field '" + fm.gold_evidence + "' must be an object or array");
      }

      repo.add(std::move(rec));
      ++report.accepted;
    } catch (const Error& e) {
      report.rejected.push_back({id, e.kind(), e.what()});
    }
  }
  return repo;
}

nlohmann::ordered_json record_to_json(const CaseRecord& record, const FieldMap& fm) {
  ordered_json out = ordered_json::object();
  set_path(out, fm.id, record.id);
  set_path(out, fm.question, record.question);
  set_path(out, fm.program, record.program_text);
  if (record.gold_answer.is_numeric()) {
    set_path(out, fm.exec_answer, record.gold_answer.number);
  } else {
    set_path(out, fm.exec_answer, record.gold_answer.to_string());
  }
  set_path(out, fm.pre_text, record.pre_text);
  set_path(out, fm.post_text, record.post_text);
  set_path(out, fm.table, record.raw_table);
  if (!record.gold_evidence_content.empty()) {
    ordered_json evidence = ordered_json::object();
    for (const EvidenceRef& ref : record.gold_evidence) {
      std::string key = ref.unit_id();
      auto it = record.gold_evidence_content.find(key);
      evidence[key] = it != record.gold_evidence_content.end() ? it->second : std::string();
    }
    set_path(out, fm.gold_evidence, std::move(evidence));
  } else {
    ordered_json evidence = ordered_json::array();
    for (const EvidenceRef& ref : record.gold_evidence) evidence.push_back(ref.unit_id());
    set_path(out, fm.gold_evidence, std::move(evidence));
  }
  return out;
}

LinearizedTable linearize_table(const TableData& t, LinearizeMode mode) {
  LinearizedTable out;
  for (const TableData::Row& row : t.rows) {
    std::string row_sentence;
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      std::string cell = text::trim(row.cells[c]);
      if (cell.empty()) {
        ++out.skipped_cells;
        continue;
      }
      std::string col =
          c < t.column_headers.size() ? text::trim(t.column_headers[c]) : std::string();
      std::string sentence = cell_sentence(text::trim(row.header), col, cell);
      if (mode == LinearizeMode::PerCell) {
        out.sentences.push_back(std::move(sentence));
      } else {
        if (!row_sentence.empty()) row_sentence += " ; ";
        row_sentence += sentence;
      }
    }
    if (mode == LinearizeMode::PerRow && !row_sentence.empty()) {
      out.sentences.push_back(std::move(row_sentence));
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> document_units(const CaseRecord& r) {
  std::vector<std::pair<std::string, std::string>> units;
  units.reserve(r.text_unit_count() + r.raw_table.size());
  for (std::size_t i = 0; i < r.text_unit_count(); ++i) {
    units.emplace_back("text_" + std::to_string(i), r.text_unit(i));
  }
  for (std::size_t j = 0; j < r.raw_table.size(); ++j) {
    units.emplace_back("table_" + std::to_string(j), raw_row_sentence(r.raw_table, j));
  }
  return units;
}

CorpusStats compute_stats(const CaseRepository& repo) {
  CorpusStats stats;
  stats.total = repo.size();
  std::size_t with_table_op = 0;

  for (const CaseRecord& r : repo.records) {
    bool has_text = false;
    bool has_table = false;
    for (const EvidenceRef& ref : r.gold_evidence) {
      (ref.kind == EvidenceRef::Kind::Text ? has_text : has_table) = true;
    }
    if (!has_text && !has_table) {
      ++stats.unannotated;
    } else if (has_text && has_table) {
      ++stats.text_and_table;
    } else if (has_text) {
      ++stats.text_only;
    } else {
      ++stats.table_only;
    }

    std::size_t steps = r.program.steps.size();
    if (steps <= 1) {
      ++stats.one_step;
    } else if (steps == 2) {
      ++stats.two_step;
    } else {
      ++stats.three_plus_step;
    }

    bool table_op = false;
    for (const Step& s : r.program.steps) {
      if (op_kind(s.op) == OpKind::Table) table_op = true;
    }
    if (table_op) ++with_table_op;
  }

  std::size_t annotated = stats.text_only + stats.table_only + stats.text_and_table;
  if (annotated > 0) {
    double d = static_cast<double>(annotated);
    stats.frac_text_only = stats.text_only / d;
    stats.frac_table_only = stats.table_only / d;
    stats.frac_text_and_table = stats.text_and_table / d;
  }
  if (stats.total > 0) {
    double d = static_cast<double>(stats.total);
    stats.frac_one_step = stats.one_step / d;
    stats.frac_two_step = stats.two_step / d;
    stats.frac_three_plus_step = stats.three_plus_step / d;
    stats.table_op_fraction = with_table_op / d;
  }
  return stats;
}

EvidenceRecallResult evidence_recall(const CaseRepository& repo,
                                     const EvidenceRecallOptions& opt) {
  EvidenceRecallResult result;
  const std::size_t n = repo.size();
  std::vector<double> recalls(n, -1.0);  // -1 marks records without gold evidence

  IndexOptions index_opt;
  index_opt.mode = opt.use_bm25 ? IndexMode::Bm25 : IndexMode::Tfidf;

  parallel_for_index(n, opt.threads, [&](std::size_t i) {
    const CaseRecord& r = repo.records[i];
    if (r.gold_evidence.empty()) return;
    std::vector<std::pair<std::string, std::string>> units = document_units(r);
    CaseIndex index = CaseIndex::build_units(units, index_opt);
    RetrievalResult retrieved = index.retrieve(r.question, opt.k);
    std::size_t hits = 0;
    for (const auto& [unit_id, score] : retrieved.ranked) {
      for (const EvidenceRef& ref : r.gold_evidence) {
        if (ref.unit_id() == unit_id) {
          ++hits;
          break;
        }
      }
    }
    recalls[i] = static_cast<double>(hits) / static_cast<double>(r.gold_evidence.size());
  });

  double sum = 0.0;
  for (double v : recalls) {
    if (v < 0.0) {
      ++result.skipped_empty;
    } else {
      sum += v;
      ++result.evaluated;
    }
  }
  result.recall = result.evaluated > 0 ? sum / static_cast<double>(result.evaluated) : 0.0;
  return result;
}

}  // namespace casekit
