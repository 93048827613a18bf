#include "casekit/metrics.hpp"

#include <algorithm>
#include <unordered_set>

#include "casekit/equivalence.hpp"
#include "casekit/errors.hpp"
#include "casekit/parallel.hpp"

namespace casekit {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

EvalReport evaluate_predictions(const std::vector<PredictionRecord>& predictions,
                                const CaseRepository& repo, const EvalOptions& opt) {
  validate_score_weights(opt.weights);

  // resolve ids up front so the parallel loop only sees valid records
  std::vector<const CaseRecord*> records(predictions.size(), nullptr);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    records[i] = repo.find(predictions[i].id);
    if (records[i] == nullptr) {
      throw Error(errkind::kUnknownPredictionId,
                  "prediction id '" + predictions[i].id + "' has no record");
    }
  }

  EvalReport report;
  report.total = predictions.size();
  report.verdicts.resize(predictions.size());

  parallel_for_index(predictions.size(), opt.threads, [&](std::size_t i) {
    const PredictionRecord& pred = predictions[i];
    const CaseRecord& gold = *records[i];
    VerdictRow row;
    row.id = pred.id;

    Program program;
    try {
      program = parse_program(pred.program_text);
      row.parsed = true;
    } catch (const ParseError&) {
      row.parsed = false;
    }

    if (row.parsed) {
      // program structure
      row.prog_correct = programs_equivalent(program, gold.program);
      std::vector<std::string> pred_ops = op_sequence(program);
      std::vector<std::string> gold_ops = op_sequence(gold.program);
      row.ops_correct = pred_ops == gold_ops || row.prog_correct;
      std::size_t d = levenshtein(std::span(gold_ops), std::span(pred_ops));
      row.ops_token_ratio =
          d >= gold_ops.size()
              ? 0.0
              : static_cast<double>(gold_ops.size() - d) / static_cast<double>(gold_ops.size());

      // execution
      try {
        ExecResult result = execute(program, gold.table.empty() ? nullptr : &gold.table);
        row.exec_ok = true;
        try {
          row.exe_correct = answers_match(result, gold.gold_answer, opt.match);
        } catch (const Error&) {
          row.exe_correct = false;  // boolean vs numeric: wrong, not fatal
        }
      } catch (const ExecError& e) {
        row.exec_ok = false;
        row.exec_error = e.kind();
      }
    }
    row.exec_correct_program_wrong = row.exe_correct && !row.prog_correct;
    report.verdicts[i] = std::move(row);
  });

  std::size_t prog_correct = 0;
  std::size_t ops_correct = 0;
  double token_sum = 0.0;
  for (const VerdictRow& row : report.verdicts) {
    if (!row.parsed) {
      ++report.unparsable;
    } else if (!row.exec_ok) {
      ++report.exec_errors;
    } else if (row.exe_correct) {
      ++report.exe_correct;
    } else {
      ++report.exe_wrong;
    }
    if (row.prog_correct) ++prog_correct;
    if (row.ops_correct) ++ops_correct;
    token_sum += row.ops_token_ratio;
  }

  report.execution_accuracy = ratio(report.exe_correct, report.total);
  report.program_accuracy = ratio(prog_correct, report.total);
  report.operator_accuracy = ratio(ops_correct, report.total);
  report.operator_token_accuracy =
      report.total > 0 ? token_sum / static_cast<double>(report.total) : 0.0;
  return report;
}

double execution_accuracy(const std::vector<PredictionRecord>& predictions,
                          const CaseRepository& repo, const EvalOptions& opt) {
  return evaluate_predictions(predictions, repo, opt).execution_accuracy;
}

double program_accuracy(const std::vector<PredictionRecord>& predictions,
                        const CaseRepository& repo, const EvalOptions& opt) {
  return evaluate_predictions(predictions, repo, opt).program_accuracy;
}

double operator_accuracy(const std::vector<PredictionRecord>& predictions,
                         const CaseRepository& repo, const EvalOptions& opt) {
  return evaluate_predictions(predictions, repo, opt).operator_accuracy;
}

double precision_at_k(const std::vector<RetrievalResult>& retrieved,
                      const std::map<std::string, GoldCaseSet>& gold_sets, std::size_t k,
                      std::size_t* evaluated, std::size_t* skipped) {
  if (k < 1) {
    throw Error(errkind::kInvalidArgument, "k must be >= 1");
  }
  std::size_t used = 0;
  std::size_t empty = 0;
  double sum = 0.0;
  for (const RetrievalResult& result : retrieved) {
    auto it = gold_sets.find(result.query_id);
    if (it == gold_sets.end()) {
      throw Error(errkind::kMissingGoldSet,
                  "no gold set for query '" + result.query_id + "'");
    }
    const GoldCaseSet& gold = it->second;
    if (gold.empty()) {
      ++empty;
      continue;
    }
    std::unordered_set<std::string> gold_ids;
    for (const auto& [id, score] : gold.gold) gold_ids.insert(id);
    std::size_t hits = 0;
    std::size_t upto = std::min(k, result.ranked.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (gold_ids.count(result.ranked[i].first)) ++hits;
    }
    sum += static_cast<double>(hits) / static_cast<double>(k);
    ++used;
  }
  if (evaluated != nullptr) *evaluated = used;
  if (skipped != nullptr) *skipped = empty;
  return used > 0 ? sum / static_cast<double>(used) : 0.0;
}

}  // namespace casekit
