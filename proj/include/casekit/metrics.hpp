#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "casekit/corpus.hpp"
#include "casekit/executor.hpp"
#include "casekit/retrieval.hpp"
#include "casekit/similarity.hpp"

namespace casekit {

// One line of a prediction file. The program text may be arbitrary; parse
// failures count as wrong rather than aborting evaluation.
struct PredictionRecord {
  std::string id;
  std::string program_text;
  std::optional<double> predicted_answer;
};

struct VerdictRow {
  std::string id;
  bool parsed = false;
  bool exec_ok = false;
  bool exe_correct = false;
  bool prog_correct = false;
  bool ops_correct = false;
  std::string exec_error;  // error kind when execution failed
  // execution accuracy can overestimate: the answer coincides although the
  // program is not equivalent to the gold one
  bool exec_correct_program_wrong = false;
  double ops_token_ratio = 0.0;  // per-token operator diagnostic
};

struct EvalOptions {
  MatchOptions match{};
  ScoreWeights weights{};
  int threads = 0;
};

struct EvalReport {
  double execution_accuracy = 0.0;
  double program_accuracy = 0.0;
  double operator_accuracy = 0.0;
  double operator_token_accuracy = 0.0;  // secondary diagnostic column

  std::size_t total = 0;
  std::size_t unparsable = 0;
  std::size_t exec_errors = 0;
  std::size_t exe_correct = 0;
  std::size_t exe_wrong = 0;  // executed cleanly, answer mismatched

  std::map<std::size_t, double> precision_at_k;
  std::size_t precision_queries = 0;
  std::size_t precision_skipped_empty_gold = 0;

  std::vector<VerdictRow> verdicts;  // prediction order
};

// Scores every prediction against its gold record: execution accuracy with
// the configured tolerances, program accuracy via canonical equivalence, and
// operator accuracy as exact op-sequence match (an equivalent program also
// counts, keeping operator accuracy >= program accuracy by construction).
// Throws Error(UnknownPredictionId) when an id has no record.
EvalReport evaluate_predictions(const std::vector<PredictionRecord>& predictions,
                                const CaseRepository& repo, const EvalOptions& opt = {});

// Single-metric views over the same evaluation pass.
double execution_accuracy(const std::vector<PredictionRecord>& predictions,
                          const CaseRepository& repo, const EvalOptions& opt = {});
double program_accuracy(const std::vector<PredictionRecord>& predictions,
                        const CaseRepository& repo, const EvalOptions& opt = {});
double operator_accuracy(const std::vector<PredictionRecord>& predictions,
                         const CaseRepository& repo, const EvalOptions& opt = {});

// Mean over queries of |top-k ∩ gold| / k. Queries whose gold set is empty
// are excluded from the mean and counted in `skipped`. A retrieval result
// whose query id has no gold set at all raises Error(MissingGoldSet).
double precision_at_k(const std::vector<RetrievalResult>& retrieved,
                      const std::map<std::string, GoldCaseSet>& gold_sets, std::size_t k,
                      std::size_t* evaluated = nullptr, std::size_t* skipped = nullptr);

}  // namespace casekit
