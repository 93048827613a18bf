#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "casekit/corpus.hpp"
#include "casekit/executor.hpp"
#include "casekit/retrieval.hpp"
#include "casekit/similarity.hpp"

namespace casekit {

// One validated configuration drives a whole command run and is echoed
// verbatim into every report, so runs stay reproducible from their outputs.
struct RunConfig {
  // dataset paths per split
  std::map<std::string, std::string> splits;  // name -> file path
  FieldMap field_map{};

  ScoreWeights weights{};
  double threshold = 0.9;
  bool threshold_inclusive = false;
  std::string pool = "all";  // "all" | "top_n"
  std::size_t top_n = 100;
  std::string sim_source = "lexical";  // "lexical" | "embeddings"
  std::string embeddings_file;

  std::string index_mode = "bm25";  // "bm25" | "tfidf" | "embedding"
  Bm25Params bm25{};
  bool use_stopwords = false;
  std::vector<std::string> stopwords;

  MatchOptions match{};
  std::vector<std::size_t> k_list{1, 3, 5};
  std::size_t n_coarse = 100;
  std::string linearize = "per_cell";  // "per_cell" | "per_row"

  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = all hardware threads, 1 = serial

  // Loads a JSON config file and overlays it onto the defaults. Unknown keys
  // raise Error(SchemaMismatch) so typos do not silently fall back.
  static RunConfig load(const std::filesystem::path& file);
  void apply_json(const nlohmann::json& j);

  // Validates cross-field constraints (weights, modes, tolerances).
  void validate() const;

  nlohmann::ordered_json to_json() const;

  MineOptions mine_options() const;
  IndexOptions index_options() const;
};

}  // namespace casekit
