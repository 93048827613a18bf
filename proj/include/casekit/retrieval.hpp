#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "casekit/corpus.hpp"
#include "casekit/similarity.hpp"

namespace casekit {

enum class IndexMode { Bm25, Tfidf, Embedding };

std::string_view index_mode_name(IndexMode mode);
std::optional<IndexMode> index_mode_from_name(std::string_view name);

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
};

struct IndexOptions {
  IndexMode mode = IndexMode::Bm25;
  Bm25Params bm25{};
  // empty set = no stopword removal (the default)
  std::unordered_set<std::string> stopwords{};
};

// Ranked candidates for one query: scores non-increasing, ties broken by
// ascending case id, the query's own id excluded when known.
struct RetrievalResult {
  std::string query_id;
  std::size_t k = 0;
  std::vector<std::pair<std::string, double>> ranked;
};

// Immutable retrieval structure over a set of documents (case questions, or
// a record's own document units). Lexical modes score tokenized text;
// embedding mode scores exact cosine against stored vectors. Reads are
// lock-free and safe from any number of threads after build.
class CaseIndex {
 public:
  // Lexical index over the repository's questions.
  static CaseIndex build(const CaseRepository& repo, const IndexOptions& opt);
  // Lexical index over arbitrary (id, text) documents.
  static CaseIndex build_units(const std::vector<std::pair<std::string, std::string>>& docs,
                               const IndexOptions& opt);
  // Exact-cosine index; requires a vector for every case id.
  static CaseIndex build_embeddings(const CaseRepository& repo, const EmbeddingStore& store);

  IndexMode mode() const { return mode_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

  // Top-k by score. Throws Error(ModeMismatch) when the query type does not
  // match the index mode, Error(InvalidArgument) for k < 1.
  RetrievalResult retrieve(std::string_view query_text, std::size_t k,
                           std::string_view exclude_id = {}) const;
  RetrievalResult retrieve(std::span<const double> query_vector, std::size_t k,
                           std::string_view exclude_id = {}) const;

  // Scores for every document (unranked, document order); the building block
  // shared by retrieve and the mining pool ranking.
  std::vector<double> score_all(std::string_view query_text) const;
  std::vector<double> score_all(std::span<const double> query_vector) const;

 private:
  CaseIndex() = default;

  void build_lexical(const std::vector<std::pair<std::string, std::string>>& docs);
  RetrievalResult rank(std::vector<double> scores, std::size_t k,
                       std::string_view exclude_id) const;

  IndexMode mode_ = IndexMode::Bm25;
  Bm25Params bm25_{};
  std::unordered_set<std::string> stopwords_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> vocab_;
  // term id -> (doc index, term frequency)
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings_;
  std::vector<double> idf_tfidf_;
  std::vector<double> idf_bm25_;
  std::vector<double> doc_len_;
  std::vector<double> doc_norm_;
  double avg_len_ = 0.0;
  // embedding mode
  std::vector<std::vector<double>> vectors_;
  std::vector<double> vec_norm_;
  std::size_t dim_ = 0;
};

// Produces a rerank score for a (query id, case id) pair; nullopt means the
// source has no score for the pair.
using RerankFn =
    std::function<std::optional<double>(const std::string&, const std::string&)>;

// Reranks by the query's own gold program: the program score of each
// candidate's program against it. Used as the diagnostic upper bound.
RerankFn oracle_rerank(const CaseRepository& pool, const CaseRepository& queries,
                       const ScoreWeights& w = {});

// Coarse-then-fine retrieval: the index supplies n_coarse candidates, the
// rerank source reorders them, the top k of the reranked list is returned.
// Requires n_coarse >= k. Throws Error(MissingRerankScore) when the source
// has no score for a coarse candidate, Error(MissingEmbeddings) when the
// coarse index is embedding-mode and the query has no vector.
RetrievalResult two_stage_retrieve(const CaseIndex& coarse, const CaseRepository& pool,
                                   const std::string& query_id, std::string_view query_text,
                                   std::size_t n_coarse, std::size_t k,
                                   const RerankFn& rerank,
                                   const EmbeddingStore* embeddings = nullptr);

}  // namespace casekit
