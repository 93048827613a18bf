#pragma once

// Independent oracles for cross-checking the library. These deliberately
// avoid the implementation paths they verify: the evaluator walks a
// recursive expression tree instead of step memory, the edit distance fills
// the full DP matrix instead of two rows, and the ranking oracle scores
// pairs directly.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "casekit/dsl.hpp"

namespace testsupport {

// Full-matrix dynamic-programming edit distance over token sequences.
std::size_t oracle_levenshtein(const std::vector<std::string>& a,
                               const std::vector<std::string>& b);

// Recursive expression-tree evaluation of a program. Table rows are supplied
// as parsed numeric cells. Returns nullopt for non-finite results, division
// by zero, boolean misuse or unresolved rows; comparison-rooted programs
// yield 1.0 (yes) / 0.0 (no) in `boolean_result`.
struct OracleValue {
  double value = 0.0;
  bool is_boolean = false;
};
std::optional<OracleValue> oracle_eval(
    const casekit::Program& p,
    const std::map<std::string, std::vector<double>>& table_rows = {});

// Plain cosine formula.
double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b);

// Brute-force cosine ranking: ids ordered by score descending, ties by id
// ascending, the query id excluded.
std::vector<std::string> oracle_cosine_ranking(
    const std::vector<std::pair<std::string, std::vector<double>>>& docs,
    const std::vector<double>& query, std::size_t k, const std::string& exclude_id);

}  // namespace testsupport
