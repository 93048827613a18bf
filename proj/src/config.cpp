#include "casekit/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "casekit/errors.hpp"

namespace casekit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> known,
                const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw Error(errkind::kSchemaMismatch,
                  "unknown config key '" + scope + it.key() + "'");
    }
  }
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error(errkind::kIoError, "cannot open config '" + file.string() + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(errkind::kSchemaMismatch,
                "invalid JSON in config '" + file.string() + "': " + e.what());
  }
  RunConfig config;
  config.apply_json(j);
  return config;
}

void RunConfig::apply_json(const json& j) {
  if (!j.is_object()) {
    throw Error(errkind::kSchemaMismatch, "config must be a JSON object");
  }
  check_keys(j,
             {"splits", "field_map", "w_ops", "w_arg", "threshold", "threshold_inclusive",
              "pool", "top_n", "sim_source", "embeddings_file", "index_mode", "bm25_k1",
              "bm25_b", "use_stopwords", "stopwords", "rel_tol", "abs_tol", "scale_lenient",
              "k_list", "n_coarse", "linearize", "out_dir", "seed", "threads"},
             "");

  if (j.contains("splits")) {
    if (!j["splits"].is_object()) {
      throw Error(errkind::kSchemaMismatch, "config 'splits' must map names to paths");
    }
    for (auto it = j["splits"].begin(); it != j["splits"].end(); ++it) {
      splits[it.key()] = it.value().get<std::string>();
    }
  }
  if (j.contains("field_map")) {
    const json& fmj = j["field_map"];
    check_keys(fmj,
               {"id", "question", "program", "exec_answer", "pre_text", "post_text", "table",
                "gold_evidence"},
               "field_map.");
    if (fmj.contains("id")) field_map.id = fmj["id"].get<std::string>();
    if (fmj.contains("question")) field_map.question = fmj["question"].get<std::string>();
    if (fmj.contains("program")) field_map.program = fmj["program"].get<std::string>();
    if (fmj.contains("exec_answer"))
      field_map.exec_answer = fmj["exec_answer"].get<std::string>();
    if (fmj.contains("pre_text")) field_map.pre_text = fmj["pre_text"].get<std::string>();
    if (fmj.contains("post_text")) field_map.post_text = fmj["post_text"].get<std::string>();
    if (fmj.contains("table")) field_map.table = fmj["table"].get<std::string>();
    if (fmj.contains("gold_evidence"))
      field_map.gold_evidence = fmj["gold_evidence"].get<std::string>();
  }

  if (j.contains("w_ops")) weights.w_ops = j["w_ops"].get<double>();
  if (j.contains("w_arg")) weights.w_arg = j["w_arg"].get<double>();
  if (j.contains("threshold")) threshold = j["threshold"].get<double>();
  if (j.contains("threshold_inclusive"))
    threshold_inclusive = j["threshold_inclusive"].get<bool>();
  if (j.contains("pool")) pool = j["pool"].get<std::string>();
  if (j.contains("top_n")) top_n = j["top_n"].get<std::size_t>();
  if (j.contains("sim_source")) sim_source = j["sim_source"].get<std::string>();
  if (j.contains("embeddings_file")) embeddings_file = j["embeddings_file"].get<std::string>();
  if (j.contains("index_mode")) index_mode = j["index_mode"].get<std::string>();
  if (j.contains("bm25_k1")) bm25.k1 = j["bm25_k1"].get<double>();
  if (j.contains("bm25_b")) bm25.b = j["bm25_b"].get<double>();
  if (j.contains("use_stopwords")) use_stopwords = j["use_stopwords"].get<bool>();
  if (j.contains("stopwords")) {
    stopwords.clear();
    for (const auto& s : j["stopwords"]) stopwords.push_back(s.get<std::string>());
  }
  if (j.contains("rel_tol")) match.rel_tol = j["rel_tol"].get<double>();
  if (j.contains("abs_tol")) match.abs_tol = j["abs_tol"].get<double>();
  if (j.contains("scale_lenient")) match.scale_lenient = j["scale_lenient"].get<bool>();
  if (j.contains("k_list")) {
    k_list.clear();
    for (const auto& k : j["k_list"]) k_list.push_back(k.get<std::size_t>());
  }
  if (j.contains("n_coarse")) n_coarse = j["n_coarse"].get<std::size_t>();
  if (j.contains("linearize")) linearize = j["linearize"].get<std::string>();
  if (j.contains("out_dir")) out_dir = j["out_dir"].get<std::string>();
  if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) threads = j["threads"].get<int>();
}

void RunConfig::validate() const {
  validate_score_weights(weights);
  if (pool != "all" && pool != "top_n") {
    throw Error(errkind::kInvalidArgument, "pool must be 'all' or 'top_n'");
  }
  if (sim_source != "lexical" && sim_source != "embeddings") {
    throw Error(errkind::kInvalidArgument, "sim_source must be 'lexical' or 'embeddings'");
  }
  if (!index_mode_from_name(index_mode)) {
    throw Error(errkind::kInvalidArgument,
                "index_mode must be 'bm25', 'tfidf' or 'embedding'");
  }
  if (linearize != "per_cell" && linearize != "per_row") {
    throw Error(errkind::kInvalidArgument, "linearize must be 'per_cell' or 'per_row'");
  }
  if (match.rel_tol < 0.0 || match.abs_tol < 0.0) {
    throw Error(errkind::kInvalidArgument, "tolerances must be non-negative");
  }
  if (k_list.empty()) {
    throw Error(errkind::kInvalidArgument, "k_list must not be empty");
  }
  for (std::size_t k : k_list) {
    if (k < 1) throw Error(errkind::kInvalidArgument, "k values must be >= 1");
  }
  if (top_n < 1) {
    throw Error(errkind::kInvalidArgument, "top_n must be >= 1");
  }
  if (n_coarse < 1) {
    throw Error(errkind::kInvalidArgument, "n_coarse must be >= 1");
  }
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  ordered_json sp = ordered_json::object();
  for (const auto& [name, path] : splits) sp[name] = path;
  j["splits"] = std::move(sp);
  j["field_map"] = ordered_json{{"id", field_map.id},
                                {"question", field_map.question},
                                {"program", field_map.program},
                                {"exec_answer", field_map.exec_answer},
                                {"pre_text", field_map.pre_text},
                                {"post_text", field_map.post_text},
                                {"table", field_map.table},
                                {"gold_evidence", field_map.gold_evidence}};
  j["w_ops"] = weights.w_ops;
  j["w_arg"] = weights.w_arg;
  j["threshold"] = threshold;
  j["threshold_inclusive"] = threshold_inclusive;
  j["pool"] = pool;
  j["top_n"] = top_n;
  j["sim_source"] = sim_source;
  j["embeddings_file"] = embeddings_file;
  j["index_mode"] = index_mode;
  j["bm25_k1"] = bm25.k1;
  j["bm25_b"] = bm25.b;
  j["use_stopwords"] = use_stopwords;
  j["stopwords"] = stopwords;
  j["rel_tol"] = match.rel_tol;
  j["abs_tol"] = match.abs_tol;
  j["scale_lenient"] = match.scale_lenient;
  j["k_list"] = k_list;
  j["n_coarse"] = n_coarse;
  j["linearize"] = linearize;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["threads"] = threads;
  return j;
}

MineOptions RunConfig::mine_options() const {
  MineOptions opt;
  opt.threshold = threshold;
  opt.threshold_inclusive = threshold_inclusive;
  opt.pool = pool == "top_n" ? PoolMode::TopN : PoolMode::All;
  opt.top_n = top_n;
  opt.sim_source = sim_source == "embeddings" ? SimSource::Embeddings : SimSource::Lexical;
  opt.weights = weights;
  return opt;
}

IndexOptions RunConfig::index_options() const {
  IndexOptions opt;
  opt.mode = *index_mode_from_name(index_mode);
  opt.bm25 = bm25;
  if (use_stopwords) {
    opt.stopwords.insert(stopwords.begin(), stopwords.end());
  }
  return opt;
}

}  // namespace casekit
