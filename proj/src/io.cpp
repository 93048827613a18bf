#include "casekit/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "casekit/errors.hpp"
#include "casekit/text.hpp"

namespace casekit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error(errkind::kIoError, "cannot open '" + file.string() + "'");
  }
  return in;
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) {
    throw Error(errkind::kIoError, "cannot write '" + file.string() + "'");
  }
  return out;
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

EmbeddingStore load_embeddings(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  EmbeddingStore store;
  std::string line;
  std::size_t line_no = 0;
  bool have_dim = false;

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    std::vector<std::string> fields = split_ws(line);
    if (fields.empty()) continue;

    if (!have_dim) {
      // header: the dimension (a single integer, optionally labeled)
      const std::string& tok = fields.back();
      char* end = nullptr;
      long d = std::strtol(tok.c_str(), &end, 10);
      if (end == nullptr || *end != '\0' || d <= 0) {
        throw Error(errkind::kSchemaMismatch,
                    file.string() + ":" + std::to_string(line_no) +
                        ": expected the dimension header");
      }
      store.dim = static_cast<std::size_t>(d);
      have_dim = true;
      continue;
    }

    if (fields.size() != store.dim + 1) {
      throw Error(errkind::kDimensionMismatch,
                  file.string() + ":" + std::to_string(line_no) + ": expected id plus " +
                      std::to_string(store.dim) + " values, got " +
                      std::to_string(fields.size() > 0 ? fields.size() - 1 : 0));
    }
    EmbeddingVector vec;
    vec.id = fields[0];
    vec.values.reserve(store.dim);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      char* end = nullptr;
      double v = std::strtod(fields[i].c_str(), &end);
      if (end == nullptr || *end != '\0' || !std::isfinite(v)) {
        throw Error(errkind::kSchemaMismatch,
                    file.string() + ":" + std::to_string(line_no) +
                        ": bad vector entry '" + fields[i] + "'");
      }
      vec.values.push_back(v);
    }
    auto [it, inserted] = store.by_id.try_emplace(vec.id, store.vectors.size());
    if (!inserted) {
      throw Error(errkind::kSchemaMismatch,
                  file.string() + ":" + std::to_string(line_no) + ": duplicate id '" +
                      vec.id + "'");
    }
    store.vectors.push_back(std::move(vec));
  }
  if (!have_dim) {
    throw Error(errkind::kSchemaMismatch, file.string() + ": missing dimension header");
  }
  return store;
}

void save_embeddings(const std::filesystem::path& file, const EmbeddingStore& store) {
  std::ofstream out = open_out(file);
  out << store.dim << "\n";
  for (const EmbeddingVector& vec : store.vectors) {
    out << vec.id;
    for (double v : vec.values) out << ' ' << text::canonical_number(v);
    out << "\n";
  }
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> seen;

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (text::trim(line).empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty()) {
      throw Error(errkind::kSchemaMismatch,
                  file.string() + ":" + std::to_string(line_no) +
                      ": expected <id> TAB <program> [TAB <answer>]");
    }
    PredictionRecord rec;
    rec.id = fields[0];
    rec.program_text = fields[1];
    if (fields.size() == 3 && !text::trim(fields[2]).empty()) {
      char* end = nullptr;
      std::string ans = text::trim(fields[2]);
      double v = std::strtod(ans.c_str(), &end);
      if (end == nullptr || *end != '\0') {
        throw Error(errkind::kSchemaMismatch,
                    file.string() + ":" + std::to_string(line_no) + ": bad answer '" +
                        fields[2] + "'");
      }
      rec.predicted_answer = v;
    }
    auto [it, inserted] = seen.try_emplace(rec.id, line_no);
    if (!inserted) {
      throw Error(errkind::kSchemaMismatch,
                  file.string() + ":" + std::to_string(line_no) + ": duplicate id '" +
                      rec.id + "' (first at line " + std::to_string(it->second) + ")");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void save_predictions(const std::filesystem::path& file,
                      const std::vector<PredictionRecord>& predictions) {
  std::ofstream out = open_out(file);
  for (const PredictionRecord& rec : predictions) {
    out << rec.id << '\t' << rec.program_text;
    if (rec.predicted_answer) out << '\t' << text::canonical_number(*rec.predicted_answer);
    out << "\n";
  }
}

std::map<std::pair<std::string, std::string>, double> load_rerank_scores(
    const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  std::map<std::pair<std::string, std::string>, double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    std::vector<std::string> fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 3) {
      throw Error(errkind::kSchemaMismatch,
                  file.string() + ":" + std::to_string(line_no) +
                      ": expected <query_id> <case_id> <score>");
    }
    char* end = nullptr;
    double v = std::strtod(fields[2].c_str(), &end);
    if (end == nullptr || *end != '\0') {
      throw Error(errkind::kSchemaMismatch,
                  file.string() + ":" + std::to_string(line_no) + ": bad score '" +
                      fields[2] + "'");
    }
    scores[{fields[0], fields[1]}] = v;
  }
  return scores;
}

RerankFn rerank_from_scores(std::map<std::pair<std::string, std::string>, double> scores) {
  return [scores = std::move(scores)](const std::string& query_id,
                                      const std::string& case_id) -> std::optional<double> {
    auto it = scores.find({query_id, case_id});
    if (it == scores.end()) return std::nullopt;
    return it->second;
  };
}

namespace {

const char* pool_name(PoolMode pool) { return pool == PoolMode::All ? "all" : "top_n"; }

}  // namespace

void save_gold_cases(const std::filesystem::path& file,
                     const std::vector<GoldCaseSet>& sets) {
  std::ofstream out = open_out(file);
  for (const GoldCaseSet& set : sets) {
    ordered_json j;
    j["query_id"] = set.query_id;
    j["threshold"] = set.threshold;
    j["inclusive"] = set.threshold_inclusive;
    j["pool"] = pool_name(set.pool);
    if (set.pool == PoolMode::TopN) j["top_n"] = set.top_n;
    ordered_json gold = ordered_json::array();
    for (const auto& [id, score] : set.gold) {
      gold.push_back(ordered_json{{"id", id}, {"score", score}});
    }
    j["gold"] = std::move(gold);
    out << j.dump() << "\n";
  }
}

std::map<std::string, GoldCaseSet> load_gold_cases(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  std::map<std::string, GoldCaseSet> sets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(errkind::kSchemaMismatch,
                  file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    GoldCaseSet set;
    set.query_id = j.at("query_id").get<std::string>();
    set.threshold = j.value("threshold", 0.9);
    set.threshold_inclusive = j.value("inclusive", false);
    set.pool = j.value("pool", "all") == std::string("top_n") ? PoolMode::TopN : PoolMode::All;
    set.top_n = j.value("top_n", 0u);
    for (const auto& g : j.at("gold")) {
      set.gold.emplace_back(g.at("id").get<std::string>(), g.at("score").get<double>());
    }
    sets[set.query_id] = std::move(set);
  }
  return sets;
}

void save_retrieval_results(const std::filesystem::path& file,
                            const std::vector<RetrievalResult>& results) {
  std::ofstream out = open_out(file);
  for (const RetrievalResult& r : results) {
    ordered_json j;
    j["query_id"] = r.query_id;
    j["k"] = r.k;
    ordered_json ranked = ordered_json::array();
    for (const auto& [id, score] : r.ranked) {
      ranked.push_back(ordered_json{{"id", id}, {"score", score}});
    }
    j["ranked"] = std::move(ranked);
    out << j.dump() << "\n";
  }
}

std::vector<RetrievalResult> load_retrieval_results(const std::filesystem::path& file) {
  std::ifstream in = open_in(file);
  std::vector<RetrievalResult> results;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(errkind::kSchemaMismatch,
                  file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    RetrievalResult r;
    r.query_id = j.at("query_id").get<std::string>();
    r.k = j.value("k", 0u);
    for (const auto& item : j.at("ranked")) {
      r.ranked.emplace_back(item.at("id").get<std::string>(),
                            item.at("score").get<double>());
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string file_hash_hex(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error(errkind::kIoError, "cannot open '" + file.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string bytes = buf.str();
  return text::fnv1a64_hex(bytes);
}

}  // namespace casekit
