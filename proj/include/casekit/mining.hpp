#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "casekit/corpus.hpp"
#include "casekit/retrieval.hpp"
#include "casekit/similarity.hpp"

namespace casekit {

// Mines the gold cases of one query against a candidate pool: ranks the pool
// by question similarity when the pool mode is TopN, scores every remaining
// candidate's program against the query's program, and keeps the ones that
// clear the threshold. The query's own id is always excluded.
//
// `question_index` may supply a prebuilt lexical index over the pool's
// questions (it is built on the fly otherwise); `embeddings` must cover the
// query and the pool when sim_source is Embeddings.
GoldCaseSet mine_gold_cases(const CaseRepository& pool, const CaseRecord& query,
                            const MineOptions& opt,
                            const EmbeddingStore* embeddings = nullptr,
                            const CaseIndex* question_index = nullptr);

// Spec-shaped convenience: the query is a member of the repository.
// Throws Error(UnknownQueryId).
GoldCaseSet mine_gold_cases(const CaseRepository& repo, const std::string& query_id,
                            const MineOptions& opt,
                            const EmbeddingStore* embeddings = nullptr,
                            const CaseIndex* question_index = nullptr);

struct MiningCoverage {
  std::size_t queries = 0;
  std::size_t empty = 0;          // no gold cases at all
  std::size_t fewer_than_10 = 0;  // 1..9 gold cases
  std::size_t ten_or_more = 0;

  double empty_fraction() const;
  double fewer_than_10_fraction() const;
  double ten_or_more_fraction() const;
};

// Gold sets for every query, aligned with the query repository's order.
struct MiningRun {
  std::vector<GoldCaseSet> sets;

  MiningCoverage coverage() const;
};

// Reference implementation: a plain per-query loop over the string-token
// scoring path. Kept for testing the parallel kernel against.
MiningRun mine_all_serial(const CaseRepository& pool, const CaseRepository& queries,
                          const MineOptions& opt,
                          const EmbeddingStore* embeddings = nullptr);

// OpenMP kernel: token sequences are interned to integer ids once, then the
// per-query loop runs data-parallel. Output is identical to the serial
// reference for every worker count.
MiningRun mine_all_parallel(const CaseRepository& pool, const CaseRepository& queries,
                            const MineOptions& opt,
                            const EmbeddingStore* embeddings = nullptr, int threads = 0);

// Dispatch: threads == 1 selects the serial reference.
MiningRun mine_all(const CaseRepository& pool, const CaseRepository& queries,
                   const MineOptions& opt, const EmbeddingStore* embeddings = nullptr,
                   int threads = 0);

}  // namespace casekit
