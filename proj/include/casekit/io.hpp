#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "casekit/metrics.hpp"
#include "casekit/retrieval.hpp"
#include "casekit/similarity.hpp"

namespace casekit {

// Embedding file: a header line carrying the dimension, then one record per
// line: the case id followed by that many values, whitespace or comma
// separated. Ids must not contain whitespace.
EmbeddingStore load_embeddings(const std::filesystem::path& file);
void save_embeddings(const std::filesystem::path& file, const EmbeddingStore& store);

// Prediction file: one record per line, tab separated:
//   <id> TAB <program string> [TAB <answer>]
// Blank lines are skipped. The program field is free text.
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& file);
void save_predictions(const std::filesystem::path& file,
                      const std::vector<PredictionRecord>& predictions);

// Rerank-score file: one "<query_id> <case_id> <score>" triple per line.
std::map<std::pair<std::string, std::string>, double> load_rerank_scores(
    const std::filesystem::path& file);
RerankFn rerank_from_scores(std::map<std::pair<std::string, std::string>, double> scores);

// Gold-case file: one JSON object per line
//   {"query_id": ..., "threshold": ..., "inclusive": ..., "pool": ...,
//    "gold": [{"id": ..., "score": ...}, ...]}
void save_gold_cases(const std::filesystem::path& file,
                     const std::vector<GoldCaseSet>& sets);
std::map<std::string, GoldCaseSet> load_gold_cases(const std::filesystem::path& file);

// Retrieval output: one JSON object per line
//   {"query_id": ..., "k": ..., "ranked": [{"id": ..., "score": ...}, ...]}
void save_retrieval_results(const std::filesystem::path& file,
                            const std::vector<RetrievalResult>& results);
std::vector<RetrievalResult> load_retrieval_results(const std::filesystem::path& file);

// FNV-1a content hash of a file's bytes, as 16 hex digits.
std::string file_hash_hex(const std::filesystem::path& file);

}  // namespace casekit
