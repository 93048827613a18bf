#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "casekit/dsl.hpp"

namespace casekit {

// Word-level edit distance (insertions, deletions, substitutions).
std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b);
// Interned fast path used by the batch mining kernel.
std::size_t levenshtein(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

struct ScoreWeights {
  double w_ops = 0.7;
  double w_arg = 0.3;
};

// Throws Error(InvalidWeights) unless w_ops + w_arg = 1 and w_ops >= w_arg >= 0.
void validate_score_weights(const ScoreWeights& w);

// The program-similarity score with all of its component terms. Each term is
// (l - d) / l over the target's sequence length, clamped to [0, 1] before
// weighting, so the score stays a similarity on a [0, 1] scale even when the
// candidate is much longer than the target.
struct ProgramScore {
  double s = 0.0;
  double ops_term = 0.0;
  double arg_term = 0.0;
  std::size_t l_ops = 0;
  std::size_t l_arg = 0;
  std::size_t d_ops = 0;
  std::size_t d_arg = 0;
  double w_ops = 0.0;
  double w_arg = 0.0;
};

// Normalization is by the target's lengths, so the score is asymmetric in
// its arguments. Identical programs score exactly 1.0. Throws
// Error(EmptyTargetProgram) and Error(InvalidWeights); weights must sum to 1
// with w_ops >= w_arg >= 0 (operations dominate).
ProgramScore program_score(const Program& target, const Program& candidate,
                           const ScoreWeights& w = {});

// Token-sequence variant for callers that precompute op/arg sequences.
ProgramScore program_score_sequences(std::span<const std::string> target_ops,
                                     std::span<const std::string> target_args,
                                     std::span<const std::string> candidate_ops,
                                     std::span<const std::string> candidate_args,
                                     const ScoreWeights& w = {});

struct EmbeddingVector {
  std::string id;
  std::vector<double> values;
};

// Externally produced question vectors, one per case id, uniform dimension.
struct EmbeddingStore {
  std::vector<EmbeddingVector> vectors;
  std::unordered_map<std::string, std::size_t> by_id;
  std::size_t dim = 0;

  const EmbeddingVector* find(std::string_view id) const;
};

// A . B / (||A|| ||B||), in [-1, 1]. Throws Error(DimensionMismatch) and
// Error(ZeroNorm).
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Embedding-free fallback: cosine over smoothed TF-IDF term vectors of the
// two questions (lowercase alphanumeric tokens). In [0, 1]; empty text scores
// 0 against anything.
double lexical_question_similarity(std::string_view q1, std::string_view q2);

enum class PoolMode { All, TopN };
enum class SimSource { Lexical, Embeddings };

struct MineOptions {
  double threshold = 0.9;
  bool threshold_inclusive = false;  // "above" read strictly by default
  PoolMode pool = PoolMode::All;
  std::size_t top_n = 100;
  SimSource sim_source = SimSource::Lexical;
  ScoreWeights weights{};
};

// Result of mining one query: candidate cases whose program score against
// the query's program clears the threshold, the query itself excluded.
struct GoldCaseSet {
  std::string query_id;
  // (case id, program score), score descending, ties by ascending id
  std::vector<std::pair<std::string, double>> gold;
  double threshold = 0.9;
  bool threshold_inclusive = false;
  PoolMode pool = PoolMode::All;
  std::size_t top_n = 0;

  bool contains(std::string_view id) const;
  bool empty() const { return gold.empty(); }
  std::size_t size() const { return gold.size(); }
};

}  // namespace casekit
