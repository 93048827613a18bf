#include "casekit/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "casekit/errors.hpp"
#include "casekit/text.hpp"

namespace casekit {

namespace {

template <class T>
std::size_t levenshtein_impl(std::span<const T> a, std::span<const T> b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();

  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;

  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double clamp_unit(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

void validate_score_weights(const ScoreWeights& w) {
  if (!(w.w_ops >= 0.0) || !(w.w_arg >= 0.0) ||
      std::abs(w.w_ops + w.w_arg - 1.0) > 1e-9 || w.w_ops < w.w_arg) {
    throw Error(errkind::kInvalidWeights,
                "weights must satisfy w_ops + w_arg = 1 and w_ops >= w_arg >= 0");
  }
}

std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b) {
  return levenshtein_impl(a, b);
}

std::size_t levenshtein(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  return levenshtein_impl(a, b);
}

ProgramScore program_score_sequences(std::span<const std::string> target_ops,
                                     std::span<const std::string> target_args,
                                     std::span<const std::string> candidate_ops,
                                     std::span<const std::string> candidate_args,
                                     const ScoreWeights& w) {
  validate_score_weights(w);
  if (target_ops.empty() || target_args.empty()) {
    throw Error(errkind::kEmptyTargetProgram, "target program has no steps");
  }

  ProgramScore score;
  score.w_ops = w.w_ops;
  score.w_arg = w.w_arg;
  score.l_ops = target_ops.size();
  score.l_arg = target_args.size();
  score.d_ops = levenshtein(target_ops, candidate_ops);
  score.d_arg = levenshtein(target_args, candidate_args);

  // exact when the distances vanish, so identical programs score exactly 1.0
  double ops_frac =
      score.d_ops == 0
          ? 1.0
          : clamp_unit(static_cast<double>(score.l_ops - std::min(score.d_ops, score.l_ops)) /
                       static_cast<double>(score.l_ops));
  double arg_frac =
      score.d_arg == 0
          ? 1.0
          : clamp_unit(static_cast<double>(score.l_arg - std::min(score.d_arg, score.l_arg)) /
                       static_cast<double>(score.l_arg));
  score.ops_term = ops_frac * w.w_ops;
  score.arg_term = arg_frac * w.w_arg;
  score.s = (score.d_ops == 0 && score.d_arg == 0) ? 1.0 : score.ops_term + score.arg_term;
  return score;
}

ProgramScore program_score(const Program& target, const Program& candidate,
                           const ScoreWeights& w) {
  std::vector<std::string> t_ops = op_sequence(target);
  std::vector<std::string> t_args = arg_sequence(target);
  std::vector<std::string> c_ops = op_sequence(candidate);
  std::vector<std::string> c_args = arg_sequence(candidate);
  return program_score_sequences(t_ops, t_args, c_ops, c_args, w);
}

const EmbeddingVector* EmbeddingStore::find(std::string_view id) const {
  auto it = by_id.find(std::string(id));
  if (it == by_id.end()) return nullptr;
  return &vectors[it->second];
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(errkind::kDimensionMismatch,
                "vector dimensions differ: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(errkind::kZeroNorm, "cosine similarity undefined for a zero vector");
  }
  double v = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::min(1.0, std::max(-1.0, v));
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine_similarity(std::span<const double>(a.values),
                           std::span<const double>(b.values));
}

double lexical_question_similarity(std::string_view q1, std::string_view q2) {
  std::vector<std::string> t1 = text::tokenize(q1);
  std::vector<std::string> t2 = text::tokenize(q2);
  if (t1.empty() || t2.empty()) return 0.0;
  if (t1 == t2) return 1.0;

  std::map<std::string, std::pair<double, double>> tf;  // term -> (tf in q1, tf in q2)
  for (const auto& t : t1) tf[t].first += 1.0;
  for (const auto& t : t2) tf[t].second += 1.0;

  // smoothed idf over the two-question corpus keeps shared terms informative
  double dot = 0.0, n1 = 0.0, n2 = 0.0;
  for (const auto& [term, counts] : tf) {
    double df = (counts.first > 0.0 ? 1.0 : 0.0) + (counts.second > 0.0 ? 1.0 : 0.0);
    double idf = std::log(3.0 / (df + 1.0)) + 1.0;
    double w1 = counts.first * idf;
    double w2 = counts.second * idf;
    dot += w1 * w2;
    n1 += w1 * w1;
    n2 += w2 * w2;
  }
  if (n1 == 0.0 || n2 == 0.0) return 0.0;
  return std::min(1.0, std::max(0.0, dot / (std::sqrt(n1) * std::sqrt(n2))));
}

bool GoldCaseSet::contains(std::string_view id) const {
  for (const auto& [gid, score] : gold) {
    if (gid == id) return true;
  }
  return false;
}

}  // namespace casekit
