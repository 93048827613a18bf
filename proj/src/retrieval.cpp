#include "casekit/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "casekit/errors.hpp"
#include "casekit/text.hpp"

namespace casekit {

std::string_view index_mode_name(IndexMode mode) {
  switch (mode) {
    case IndexMode::Bm25:
      return "bm25";
    case IndexMode::Tfidf:
      return "tfidf";
    case IndexMode::Embedding:
      return "embedding";
  }
  return "";
}

std::optional<IndexMode> index_mode_from_name(std::string_view name) {
  if (name == "bm25") return IndexMode::Bm25;
  if (name == "tfidf") return IndexMode::Tfidf;
  if (name == "embedding") return IndexMode::Embedding;
  return std::nullopt;
}

CaseIndex CaseIndex::build(const CaseRepository& repo, const IndexOptions& opt) {
  if (repo.empty()) {
    throw Error(errkind::kEmptyRepository, "cannot index an empty repository");
  }
  if (opt.mode == IndexMode::Embedding) {
    throw Error(errkind::kModeMismatch,
                "embedding indexes are built with build_embeddings");
  }
  std::vector<std::pair<std::string, std::string>> docs;
  docs.reserve(repo.size());
  for (const CaseRecord& r : repo.records) docs.emplace_back(r.id, r.question);
  return build_units(docs, opt);
}

CaseIndex CaseIndex::build_units(
    const std::vector<std::pair<std::string, std::string>>& docs,
    const IndexOptions& opt) {
  if (docs.empty()) {
    throw Error(errkind::kEmptyRepository, "cannot index an empty document set");
  }
  if (opt.mode == IndexMode::Embedding) {
    throw Error(errkind::kModeMismatch,
                "embedding indexes are built with build_embeddings");
  }
  CaseIndex index;
  index.mode_ = opt.mode;
  index.bm25_ = opt.bm25;
  index.stopwords_ = opt.stopwords;
  index.build_lexical(docs);
  return index;
}

void CaseIndex::build_lexical(const std::vector<std::pair<std::string, std::string>>& docs) {
  const std::size_t n = docs.size();
  ids_.reserve(n);
  doc_len_.assign(n, 0.0);

  std::vector<std::unordered_map<std::uint32_t, double>> tf(n);
  for (std::size_t d = 0; d < n; ++d) {
    ids_.push_back(docs[d].first);
    std::vector<std::string> tokens = text::tokenize(docs[d].second, stopwords_);
    doc_len_[d] = static_cast<double>(tokens.size());
    for (const std::string& tok : tokens) {
      auto [it, inserted] = vocab_.try_emplace(tok, static_cast<std::uint32_t>(vocab_.size()));
      tf[d][it->second] += 1.0;
    }
  }

  postings_.assign(vocab_.size(), {});
  for (std::size_t d = 0; d < n; ++d) {
    // term order within a doc does not matter for scoring; postings stay in
    // ascending doc order which keeps accumulation deterministic
    std::vector<std::pair<std::uint32_t, double>> entries(tf[d].begin(), tf[d].end());
    std::sort(entries.begin(), entries.end());
    for (const auto& [term, count] : entries) {
      postings_[term].emplace_back(static_cast<std::uint32_t>(d), count);
    }
  }

  const double nd = static_cast<double>(n);
  idf_tfidf_.resize(vocab_.size());
  idf_bm25_.resize(vocab_.size());
  for (std::size_t t = 0; t < vocab_.size(); ++t) {
    double df = static_cast<double>(postings_[t].size());
    idf_tfidf_[t] = std::log((nd + 1.0) / (df + 1.0)) + 1.0;
    idf_bm25_[t] = std::log(1.0 + (nd - df + 0.5) / (df + 0.5));
  }

  doc_norm_.assign(n, 0.0);
  for (std::size_t t = 0; t < vocab_.size(); ++t) {
    for (const auto& [d, count] : postings_[t]) {
      double w = count * idf_tfidf_[t];
      doc_norm_[d] += w * w;
    }
  }
  double total_len = 0.0;
  for (std::size_t d = 0; d < n; ++d) {
    doc_norm_[d] = std::sqrt(doc_norm_[d]);
    total_len += doc_len_[d];
  }
  avg_len_ = total_len > 0.0 ? total_len / nd : 1.0;
}

CaseIndex CaseIndex::build_embeddings(const CaseRepository& repo,
                                      const EmbeddingStore& store) {
  if (repo.empty()) {
    throw Error(errkind::kEmptyRepository, "cannot index an empty repository");
  }
  CaseIndex index;
  index.mode_ = IndexMode::Embedding;
  index.dim_ = store.dim;
  index.ids_.reserve(repo.size());
  index.vectors_.reserve(repo.size());
  index.vec_norm_.reserve(repo.size());
  for (const CaseRecord& r : repo.records) {
    const EmbeddingVector* v = store.find(r.id);
    if (v == nullptr) {
      throw Error(errkind::kMissingEmbeddings, "no embedding vector for case '" + r.id + "'");
    }
    double norm_sq = 0.0;
    for (double x : v->values) {
      if (!std::isfinite(x)) {
        throw Error(errkind::kInvalidArgument,
                    "non-finite embedding entry for case '" + r.id + "'");
      }
      norm_sq += x * x;
    }
    if (norm_sq == 0.0) {
      throw Error(errkind::kZeroNorm, "zero-norm embedding for case '" + r.id + "'");
    }
    index.ids_.push_back(r.id);
    index.vectors_.push_back(v->values);
    index.vec_norm_.push_back(std::sqrt(norm_sq));
  }
  return index;
}

std::vector<double> CaseIndex::score_all(std::string_view query_text) const {
  if (mode_ == IndexMode::Embedding) {
    throw Error(errkind::kModeMismatch, "embedding index requires a vector query");
  }
  std::vector<double> scores(ids_.size(), 0.0);

  std::vector<std::string> tokens = text::tokenize(query_text, stopwords_);
  // sorted unique terms with query-side counts: fixed accumulation order
  std::vector<std::pair<std::string, double>> terms;
  {
    std::vector<std::string> sorted = tokens;
    std::sort(sorted.begin(), sorted.end());
    for (const std::string& tok : sorted) {
      if (!terms.empty() && terms.back().first == tok) {
        terms.back().second += 1.0;
      } else {
        terms.emplace_back(tok, 1.0);
      }
    }
  }

  if (mode_ == IndexMode::Tfidf) {
    double query_norm = 0.0;
    for (const auto& [tok, qtf] : terms) {
      auto it = vocab_.find(tok);
      // unseen terms contribute no overlap but do lengthen the query vector
      double idf = it != vocab_.end() ? idf_tfidf_[it->second]
                                      : std::log(static_cast<double>(ids_.size()) + 1.0) + 1.0;
      double qw = qtf * idf;
      query_norm += qw * qw;
      if (it == vocab_.end()) continue;
      for (const auto& [d, count] : postings_[it->second]) {
        scores[d] += qw * count * idf;
      }
    }
    if (query_norm > 0.0) {
      double qn = std::sqrt(query_norm);
      for (std::size_t d = 0; d < scores.size(); ++d) {
        if (scores[d] != 0.0) scores[d] /= qn * doc_norm_[d];
      }
    }
  } else {  // bm25
    const double k1 = bm25_.k1;
    const double b = bm25_.b;
    for (const auto& [tok, qtf] : terms) {
      auto it = vocab_.find(tok);
      if (it == vocab_.end()) continue;
      double idf = idf_bm25_[it->second];
      for (const auto& [d, count] : postings_[it->second]) {
        double denom = count + k1 * (1.0 - b + b * doc_len_[d] / avg_len_);
        scores[d] += qtf * idf * (count * (k1 + 1.0)) / denom;
      }
    }
  }
  return scores;
}

std::vector<double> CaseIndex::score_all(std::span<const double> query_vector) const {
  if (mode_ != IndexMode::Embedding) {
    throw Error(errkind::kModeMismatch, "lexical index requires a text query");
  }
  if (query_vector.size() != dim_) {
    throw Error(errkind::kDimensionMismatch,
                "query dimension " + std::to_string(query_vector.size()) +
                    " does not match index dimension " + std::to_string(dim_));
  }
  double qn_sq = 0.0;
  for (double x : query_vector) qn_sq += x * x;
  if (qn_sq == 0.0) {
    throw Error(errkind::kZeroNorm, "zero-norm query vector");
  }
  double qn = std::sqrt(qn_sq);

  std::vector<double> scores(ids_.size(), 0.0);
  for (std::size_t d = 0; d < ids_.size(); ++d) {
    const std::vector<double>& v = vectors_[d];
    double dot = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) dot += v[i] * query_vector[i];
    scores[d] = dot / (qn * vec_norm_[d]);
  }
  return scores;
}

RetrievalResult CaseIndex::rank(std::vector<double> scores, std::size_t k,
                                std::string_view exclude_id) const {
  if (k < 1) {
    throw Error(errkind::kInvalidArgument, "k must be >= 1");
  }
  std::vector<std::size_t> docs;
  docs.reserve(scores.size());
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (!exclude_id.empty() && ids_[d] == exclude_id) continue;
    docs.push_back(d);
  }
  auto better = [&](std::size_t x, std::size_t y) {
    if (scores[x] != scores[y]) return scores[x] > scores[y];
    return ids_[x] < ids_[y];
  };
  std::size_t take = std::min(k, docs.size());
  std::partial_sort(docs.begin(), docs.begin() + take, docs.end(), better);
  docs.resize(take);

  RetrievalResult result;
  result.k = k;
  result.ranked.reserve(take);
  for (std::size_t d : docs) result.ranked.emplace_back(ids_[d], scores[d]);
  return result;
}

RetrievalResult CaseIndex::retrieve(std::string_view query_text, std::size_t k,
                                    std::string_view exclude_id) const {
  return rank(score_all(query_text), k, exclude_id);
}

RetrievalResult CaseIndex::retrieve(std::span<const double> query_vector, std::size_t k,
                                    std::string_view exclude_id) const {
  return rank(score_all(query_vector), k, exclude_id);
}

RerankFn oracle_rerank(const CaseRepository& pool, const CaseRepository& queries,
                       const ScoreWeights& w) {
  return [&pool, &queries, w](const std::string& query_id,
                              const std::string& case_id) -> std::optional<double> {
    const CaseRecord* q = queries.find(query_id);
    const CaseRecord* c = pool.find(case_id);
    if (q == nullptr || c == nullptr) return std::nullopt;
    return program_score(q->program, c->program, w).s;
  };
}

RetrievalResult two_stage_retrieve(const CaseIndex& coarse, const CaseRepository& pool,
                                   const std::string& query_id, std::string_view query_text,
                                   std::size_t n_coarse, std::size_t k,
                                   const RerankFn& rerank,
                                   const EmbeddingStore* embeddings) {
  if (k < 1 || n_coarse < k) {
    throw Error(errkind::kInvalidArgument, "two-stage retrieval requires n_coarse >= k >= 1");
  }
  (void)pool;

  RetrievalResult coarse_result;
  if (coarse.mode() == IndexMode::Embedding) {
    if (embeddings == nullptr) {
      throw Error(errkind::kMissingEmbeddings,
                  "embedding-mode coarse stage requires an embedding store");
    }
    const EmbeddingVector* qv = embeddings->find(query_id);
    if (qv == nullptr) {
      throw Error(errkind::kMissingEmbeddings,
                  "no embedding vector for query '" + query_id + "'");
    }
    coarse_result = coarse.retrieve(std::span<const double>(qv->values), n_coarse, query_id);
  } else {
    coarse_result = coarse.retrieve(query_text, n_coarse, query_id);
  }

  std::vector<std::pair<std::string, double>> reranked;
  reranked.reserve(coarse_result.ranked.size());
  for (const auto& [case_id, coarse_score] : coarse_result.ranked) {
    std::optional<double> s = rerank(query_id, case_id);
    if (!s) {
      throw Error(errkind::kMissingRerankScore,
                  "no rerank score for (" + query_id + ", " + case_id + ")");
    }
    reranked.emplace_back(case_id, *s);
  }
  std::sort(reranked.begin(), reranked.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  if (reranked.size() > k) reranked.resize(k);

  RetrievalResult result;
  result.query_id = query_id;
  result.k = k;
  result.ranked = std::move(reranked);
  return result;
}

}  // namespace casekit
