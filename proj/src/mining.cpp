#include "casekit/mining.hpp"

#include <algorithm>
#include <unordered_map>

#include "casekit/errors.hpp"
#include "casekit/parallel.hpp"

namespace casekit {

namespace {

bool clears_threshold(double score, const MineOptions& opt) {
  return opt.threshold_inclusive ? score >= opt.threshold : score > opt.threshold;
}

void sort_gold(std::vector<std::pair<std::string, double>>& gold) {
  std::sort(gold.begin(), gold.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
}

// Candidate pool indices for one query, already excluding the query itself.
std::vector<std::size_t> candidate_indices(const CaseRepository& pool,
                                           const CaseRecord& query, const MineOptions& opt,
                                           const EmbeddingStore* embeddings,
                                           const CaseIndex* question_index,
                                           const CaseIndex* owned_index) {
  std::vector<std::size_t> out;
  if (opt.pool == PoolMode::All) {
    out.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool.records[i].id != query.id) out.push_back(i);
    }
    return out;
  }

  // TopN: rank by question similarity first
  if (opt.sim_source == SimSource::Embeddings) {
    if (embeddings == nullptr) {
      throw Error(errkind::kMissingEmbeddings,
                  "mining with embedding similarity requires an embedding store");
    }
    const EmbeddingVector* qv = embeddings->find(query.id);
    if (qv == nullptr) {
      throw Error(errkind::kMissingEmbeddings,
                  "no embedding vector for query '" + query.id + "'");
    }
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(pool.size());
    for (const CaseRecord& c : pool.records) {
      if (c.id == query.id) continue;
      const EmbeddingVector* cv = embeddings->find(c.id);
      if (cv == nullptr) {
        throw Error(errkind::kMissingEmbeddings,
                    "no embedding vector for case '" + c.id + "'");
      }
      scored.emplace_back(c.id, cosine_similarity(*qv, *cv));
    }
    sort_gold(scored);  // same ordering rule: score desc, id asc
    std::size_t take = std::min(opt.top_n, scored.size());
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(pool.by_id.at(scored[i].first));
    return out;
  }

  const CaseIndex* index = question_index != nullptr ? question_index : owned_index;
  RetrievalResult ranked = index->retrieve(query.question, opt.top_n, query.id);
  out.reserve(ranked.ranked.size());
  for (const auto& [id, score] : ranked.ranked) out.push_back(pool.by_id.at(id));
  return out;
}

CaseIndex build_pool_question_index(const CaseRepository& pool) {
  IndexOptions opt;
  opt.mode = IndexMode::Tfidf;
  return CaseIndex::build(pool, opt);
}

GoldCaseSet make_set(const CaseRecord& query, const MineOptions& opt) {
  GoldCaseSet set;
  set.query_id = query.id;
  set.threshold = opt.threshold;
  set.threshold_inclusive = opt.threshold_inclusive;
  set.pool = opt.pool;
  set.top_n = opt.pool == PoolMode::TopN ? opt.top_n : 0;
  return set;
}

}  // namespace

GoldCaseSet mine_gold_cases(const CaseRepository& pool, const CaseRecord& query,
                            const MineOptions& opt, const EmbeddingStore* embeddings,
                            const CaseIndex* question_index) {
  std::optional<CaseIndex> owned;
  if (opt.pool == PoolMode::TopN && opt.sim_source == SimSource::Lexical &&
      question_index == nullptr) {
    owned = build_pool_question_index(pool);
  }

  GoldCaseSet set = make_set(query, opt);
  std::vector<std::string> q_ops = op_sequence(query.program);
  std::vector<std::string> q_args = arg_sequence(query.program);

  for (std::size_t idx : candidate_indices(pool, query, opt, embeddings, question_index,
                                           owned ? &*owned : nullptr)) {
    const CaseRecord& cand = pool.records[idx];
    std::vector<std::string> c_ops = op_sequence(cand.program);
    std::vector<std::string> c_args = arg_sequence(cand.program);
    ProgramScore score =
        program_score_sequences(q_ops, q_args, c_ops, c_args, opt.weights);
    if (clears_threshold(score.s, opt)) {
      set.gold.emplace_back(cand.id, score.s);
    }
  }
  sort_gold(set.gold);
  return set;
}

GoldCaseSet mine_gold_cases(const CaseRepository& repo, const std::string& query_id,
                            const MineOptions& opt, const EmbeddingStore* embeddings,
                            const CaseIndex* question_index) {
  return mine_gold_cases(repo, repo.at(query_id), opt, embeddings, question_index);
}

double MiningCoverage::empty_fraction() const {
  return queries > 0 ? static_cast<double>(empty) / static_cast<double>(queries) : 0.0;
}

double MiningCoverage::fewer_than_10_fraction() const {
  return queries > 0 ? static_cast<double>(fewer_than_10) / static_cast<double>(queries) : 0.0;
}

double MiningCoverage::ten_or_more_fraction() const {
  return queries > 0 ? static_cast<double>(ten_or_more) / static_cast<double>(queries) : 0.0;
}

MiningCoverage MiningRun::coverage() const {
  MiningCoverage cov;
  cov.queries = sets.size();
  for (const GoldCaseSet& set : sets) {
    if (set.gold.empty()) {
      ++cov.empty;
    } else if (set.gold.size() < 10) {
      ++cov.fewer_than_10;
    } else {
      ++cov.ten_or_more;
    }
  }
  return cov;
}

MiningRun mine_all_serial(const CaseRepository& pool, const CaseRepository& queries,
                          const MineOptions& opt, const EmbeddingStore* embeddings) {
  std::optional<CaseIndex> owned;
  if (opt.pool == PoolMode::TopN && opt.sim_source == SimSource::Lexical) {
    owned = build_pool_question_index(pool);
  }
  MiningRun run;
  run.sets.reserve(queries.size());
  for (const CaseRecord& q : queries.records) {
    run.sets.push_back(
        mine_gold_cases(pool, q, opt, embeddings, owned ? &*owned : nullptr));
  }
  return run;
}

// ---------------------------------------------------------------------------
// parallel kernel
// ---------------------------------------------------------------------------

namespace {

// Programs as interned id sequences. One table covers op and argument tokens
// of the pool and the queries.
struct InternedPrograms {
  std::vector<std::vector<std::uint32_t>> ops;
  std::vector<std::vector<std::uint32_t>> args;
};

class TokenInterner {
 public:
  std::uint32_t intern(const std::string& tok) {
    auto [it, inserted] = map_.try_emplace(tok, static_cast<std::uint32_t>(map_.size()));
    return it->second;
  }

  InternedPrograms intern_repo(const CaseRepository& repo) {
    InternedPrograms out;
    out.ops.reserve(repo.size());
    out.args.reserve(repo.size());
    for (const CaseRecord& r : repo.records) {
      std::vector<std::uint32_t> ops;
      std::vector<std::uint32_t> args;
      for (const std::string& t : op_sequence(r.program)) ops.push_back(intern(t));
      for (const std::string& t : arg_sequence(r.program)) args.push_back(intern(t));
      out.ops.push_back(std::move(ops));
      out.args.push_back(std::move(args));
    }
    return out;
  }

 private:
  std::unordered_map<std::string, std::uint32_t> map_;
};

}  // namespace

MiningRun mine_all_parallel(const CaseRepository& pool, const CaseRepository& queries,
                            const MineOptions& opt, const EmbeddingStore* embeddings,
                            int threads) {
  validate_score_weights(opt.weights);
  const bool same_repo = &pool == &queries;

  TokenInterner interner;
  InternedPrograms pool_seq = interner.intern_repo(pool);
  InternedPrograms query_seq = same_repo ? pool_seq : interner.intern_repo(queries);

  std::optional<CaseIndex> owned;
  if (opt.pool == PoolMode::TopN && opt.sim_source == SimSource::Lexical) {
    owned = build_pool_question_index(pool);
  }

  MiningRun run;
  run.sets.resize(queries.size());

  parallel_for_index(queries.size(), threads, [&](std::size_t qi) {
    const CaseRecord& query = queries.records[qi];
    GoldCaseSet set = make_set(query, opt);

    const std::vector<std::uint32_t>& q_ops = query_seq.ops[qi];
    const std::vector<std::uint32_t>& q_args = query_seq.args[qi];
    const double l_ops = static_cast<double>(q_ops.size());
    const double l_arg = static_cast<double>(q_args.size());
    if (q_ops.empty() || q_args.empty()) {
      throw Error(errkind::kEmptyTargetProgram, "query '" + query.id + "' has no steps");
    }

    for (std::size_t ci : candidate_indices(pool, query, opt, embeddings,
                                            owned ? &*owned : nullptr, nullptr)) {
      std::size_t d_ops = levenshtein(std::span(q_ops), std::span(pool_seq.ops[ci]));
      std::size_t d_arg = levenshtein(std::span(q_args), std::span(pool_seq.args[ci]));
      double s;
      if (d_ops == 0 && d_arg == 0) {
        s = 1.0;
      } else {
        double ops_frac =
            d_ops == 0 ? 1.0
                       : std::max(0.0, (l_ops - static_cast<double>(d_ops)) / l_ops);
        double arg_frac =
            d_arg == 0 ? 1.0
                       : std::max(0.0, (l_arg - static_cast<double>(d_arg)) / l_arg);
        s = ops_frac * opt.weights.w_ops + arg_frac * opt.weights.w_arg;
      }
      if (clears_threshold(s, opt)) {
        set.gold.emplace_back(pool.records[ci].id, s);
      }
    }
    sort_gold(set.gold);
    run.sets[qi] = std::move(set);
  });

  return run;
}

MiningRun mine_all(const CaseRepository& pool, const CaseRepository& queries,
                   const MineOptions& opt, const EmbeddingStore* embeddings, int threads) {
  if (effective_threads(threads) <= 1) {
    return mine_all_serial(pool, queries, opt, embeddings);
  }
  return mine_all_parallel(pool, queries, opt, embeddings, threads);
}

}  // namespace casekit
