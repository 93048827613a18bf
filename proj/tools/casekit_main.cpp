// Command-line front end: ingestion, statistics, linearization, gold-case
// mining, retrieval, execution and evaluation over one shared config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "casekit/config.hpp"
#include "casekit/corpus.hpp"
#include "casekit/equivalence.hpp"
#include "casekit/errors.hpp"
#include "casekit/executor.hpp"
#include "casekit/io.hpp"
#include "casekit/metrics.hpp"
#include "casekit/mining.hpp"
#include "casekit/parallel.hpp"
#include "casekit/retrieval.hpp"
#include "casekit/text.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace casekit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

// Flags override the config file, which overrides the defaults.
struct CliOverrides {
  std::string config_file;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> threshold;
  std::optional<double> w_ops;
  std::optional<std::string> pool;
  std::optional<std::string> index_mode;
  std::vector<std::size_t> k_list;
};

RunConfig make_config(const CliOverrides& o) {
  RunConfig config;
  if (!o.config_file.empty()) config = RunConfig::load(o.config_file);
  if (!o.out_dir.empty()) config.out_dir = o.out_dir;
  if (o.seed) config.seed = *o.seed;
  if (o.threads) config.threads = *o.threads;
  if (o.threshold) config.threshold = *o.threshold;
  if (o.w_ops) {
    config.weights.w_ops = *o.w_ops;
    config.weights.w_arg = 1.0 - *o.w_ops;
  }
  if (o.pool) config.pool = *o.pool;
  if (o.index_mode) config.index_mode = *o.index_mode;
  if (!o.k_list.empty()) config.k_list = o.k_list;
  config.validate();
  return config;
}

std::string split_path(const RunConfig& config, const std::string& split) {
  auto it = config.splits.find(split);
  if (it == config.splits.end()) {
    throw Error(errkind::kInvalidArgument,
                "split '" + split + "' is not configured (add it under config \"splits\")");
  }
  return it->second;
}

CaseRepository ingest_split(const RunConfig& config, const std::string& split,
                            IngestReport& report, ordered_json& input_hashes) {
  std::string path = split_path(config, split);
  input_hashes[path] = file_hash_hex(path);
  return ingest(path, config.field_map, report);
}

ordered_json report_header(const RunConfig& config, const ordered_json& input_hashes) {
  ordered_json j;
  j["config"] = config.to_json();
  j["inputs"] = input_hashes;
  return j;
}

void write_json(const fs::path& path, const ordered_json& j) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path);
  if (!out) {
    throw Error(errkind::kIoError, "cannot write '" + path.string() + "'");
  }
  out << j.dump(2) << "\n";
}

ordered_json issues_json(const std::vector<IngestIssue>& issues) {
  ordered_json arr = ordered_json::array();
  for (const IngestIssue& issue : issues) {
    arr.push_back(ordered_json{
        {"id", issue.id}, {"kind", issue.kind}, {"detail", issue.detail}});
  }
  return arr;
}

EmbeddingStore load_configured_embeddings(const RunConfig& config,
                                          ordered_json& input_hashes) {
  if (config.embeddings_file.empty()) {
    throw Error(errkind::kMissingEmbeddings,
                "this run needs an embeddings file (config \"embeddings_file\")");
  }
  input_hashes[config.embeddings_file] = file_hash_hex(config.embeddings_file);
  return load_embeddings(config.embeddings_file);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_ingest(const RunConfig& config, const std::vector<std::string>& splits) {
  ordered_json hashes = ordered_json::object();
  ordered_json per_split = ordered_json::object();
  fs::create_directories(config.out_dir);

  for (const std::string& split : splits) {
    IngestReport report;
    CaseRepository repo = ingest_split(config, split, report, hashes);

    ordered_json records = ordered_json::array();
    for (const CaseRecord& r : repo.records) {
      records.push_back(record_to_json(r, config.field_map));
    }
    write_json(fs::path(config.out_dir) / (split + ".repo.json"), records);

    per_split[split] = ordered_json{{"accepted", report.accepted},
                                    {"rejected", issues_json(report.rejected)},
                                    {"warnings", issues_json(report.warnings)}};
    std::printf("%s: accepted %zu, rejected %zu, warnings %zu\n", split.c_str(),
                report.accepted, report.rejected.size(), report.warnings.size());
  }

  ordered_json out = report_header(config, hashes);
  out["splits"] = std::move(per_split);
  write_json(fs::path(config.out_dir) / "ingest_report.json", out);
  return kExitOk;
}

ordered_json stats_json(const CorpusStats& s) {
  ordered_json j;
  j["total"] = s.total;
  j["question_type"] = ordered_json{
      {"text_only", s.text_only},
      {"table_only", s.table_only},
      {"text_and_table", s.text_and_table},
      {"unannotated", s.unannotated},
      {"frac_text_only", s.frac_text_only},
      {"frac_table_only", s.frac_table_only},
      {"frac_text_and_table", s.frac_text_and_table}};
  j["steps"] = ordered_json{{"one", s.one_step},
                            {"two", s.two_step},
                            {"three_plus", s.three_plus_step},
                            {"frac_one", s.frac_one_step},
                            {"frac_two", s.frac_two_step},
                            {"frac_three_plus", s.frac_three_plus_step}};
  j["table_op_fraction"] = s.table_op_fraction;
  return j;
}

int cmd_stats(const RunConfig& config, const std::vector<std::string>& splits) {
  ordered_json hashes = ordered_json::object();
  ordered_json per_split = ordered_json::object();

  for (const std::string& split : splits) {
    IngestReport report;
    CaseRepository repo = ingest_split(config, split, report, hashes);
    CorpusStats stats = compute_stats(repo);
    per_split[split] = stats_json(stats);
    per_split[split]["rejected"] = report.rejected.size();

    std::printf("split %s: %zu records (%zu rejected at ingest)\n", split.c_str(),
                stats.total, report.rejected.size());
    std::printf("  question type:  text-only %.2f%%  table-only %.2f%%  text+table %.2f%%\n",
                100.0 * stats.frac_text_only, 100.0 * stats.frac_table_only,
                100.0 * stats.frac_text_and_table);
    std::printf("  reasoning steps: 1 step %.2f%%  2 steps %.2f%%  3+ steps %.2f%%\n",
                100.0 * stats.frac_one_step, 100.0 * stats.frac_two_step,
                100.0 * stats.frac_three_plus_step);
    std::printf("  programs with table ops: %.2f%%\n", 100.0 * stats.table_op_fraction);

    // lexical evidence-retrieval baseline over each record's own document
    ordered_json recall = ordered_json::object();
    for (std::size_t k : config.k_list) {
      EvidenceRecallOptions ropt;
      ropt.k = k;
      ropt.use_bm25 = config.index_mode != "tfidf";
      ropt.threads = config.threads;
      EvidenceRecallResult r = evidence_recall(repo, ropt);
      recall[std::to_string(k)] =
          ordered_json{{"recall", r.recall},
                       {"evaluated", r.evaluated},
                       {"skipped_empty_gold", r.skipped_empty}};
      std::printf("  evidence recall@%zu: %.4f (%zu records, %zu without gold evidence)\n",
                  k, r.recall, r.evaluated, r.skipped_empty);
    }
    per_split[split]["evidence_recall"] = std::move(recall);
  }

  ordered_json out = report_header(config, hashes);
  out["stats"] = std::move(per_split);
  write_json(fs::path(config.out_dir) / "stats_report.json", out);
  return kExitOk;
}

int cmd_linearize(const RunConfig& config, const std::string& split) {
  ordered_json hashes = ordered_json::object();
  IngestReport report;
  CaseRepository repo = ingest_split(config, split, report, hashes);
  LinearizeMode mode =
      config.linearize == "per_row" ? LinearizeMode::PerRow : LinearizeMode::PerCell;

  fs::create_directories(config.out_dir);
  fs::path path = fs::path(config.out_dir) / ("linearized_" + split + ".jsonl");
  std::ofstream out(path);
  if (!out) {
    throw Error(errkind::kIoError, "cannot write '" + path.string() + "'");
  }
  std::size_t sentences = 0;
  std::size_t skipped = 0;
  for (const CaseRecord& r : repo.records) {
    LinearizedTable lin = linearize_table(r.table, mode);
    ordered_json j;
    j["id"] = r.id;
    j["sentences"] = lin.sentences;
    j["skipped_cells"] = lin.skipped_cells;
    out << j.dump() << "\n";
    sentences += lin.sentences.size();
    skipped += lin.skipped_cells;
  }
  std::printf("%s: %zu sentences (%zu empty cells skipped) -> %s\n", split.c_str(),
              sentences, skipped, path.string().c_str());
  return kExitOk;
}

int cmd_mine(const RunConfig& config, const std::string& query_split,
             const std::string& pool_split) {
  ordered_json hashes = ordered_json::object();
  IngestReport pool_report;
  CaseRepository pool = ingest_split(config, pool_split, pool_report, hashes);

  IngestReport query_report;
  CaseRepository query_repo;
  const CaseRepository* queries = &pool;
  if (query_split != pool_split) {
    query_repo = ingest_split(config, query_split, query_report, hashes);
    queries = &query_repo;
  }

  MineOptions opt = config.mine_options();
  std::optional<EmbeddingStore> embeddings;
  if (opt.pool == PoolMode::TopN && opt.sim_source == SimSource::Embeddings) {
    embeddings = load_configured_embeddings(config, hashes);
  }

  MiningRun run = mine_all(pool, *queries, opt, embeddings ? &*embeddings : nullptr,
                           config.threads);
  MiningCoverage cov = run.coverage();

  fs::create_directories(config.out_dir);
  fs::path gold_path =
      fs::path(config.out_dir) / ("gold_cases_" + query_split + "_vs_" + pool_split + ".jsonl");
  save_gold_cases(gold_path, run.sets);

  ordered_json out = report_header(config, hashes);
  out["query_split"] = query_split;
  out["pool_split"] = pool_split;
  out["coverage"] = ordered_json{{"queries", cov.queries},
                                 {"empty", cov.empty},
                                 {"fewer_than_10", cov.fewer_than_10},
                                 {"ten_or_more", cov.ten_or_more},
                                 {"frac_empty", cov.empty_fraction()},
                                 {"frac_fewer_than_10", cov.fewer_than_10_fraction()},
                                 {"frac_ten_or_more", cov.ten_or_more_fraction()}};
  write_json(fs::path(config.out_dir) / "mine_report.json", out);

  std::printf("mined %zu queries vs %zu-case pool: empty %.2f%%, <10 %.2f%%, >=10 %.2f%%\n",
              cov.queries, pool.size(), 100.0 * cov.empty_fraction(),
              100.0 * cov.fewer_than_10_fraction(), 100.0 * cov.ten_or_more_fraction());
  std::printf("gold cases -> %s\n", gold_path.string().c_str());
  return kExitOk;
}

int cmd_retrieve(const RunConfig& config, const std::string& query_split,
                 const std::string& index_split, bool two_stage,
                 const std::string& rerank_file) {
  ordered_json hashes = ordered_json::object();
  IngestReport index_report;
  CaseRepository index_repo = ingest_split(config, index_split, index_report, hashes);

  IngestReport query_report;
  CaseRepository query_store;
  const CaseRepository* queries = &index_repo;
  if (query_split != index_split) {
    query_store = ingest_split(config, query_split, query_report, hashes);
    queries = &query_store;
  }

  IndexOptions index_opt = config.index_options();
  std::optional<EmbeddingStore> embeddings;
  CaseIndex index = [&]() {
    if (index_opt.mode == IndexMode::Embedding) {
      embeddings = load_configured_embeddings(config, hashes);
      return CaseIndex::build_embeddings(index_repo, *embeddings);
    }
    return CaseIndex::build(index_repo, index_opt);
  }();

  std::size_t k = *std::max_element(config.k_list.begin(), config.k_list.end());

  RerankFn rerank;
  if (two_stage) {
    if (!rerank_file.empty()) {
      hashes[rerank_file] = file_hash_hex(rerank_file);
      rerank = rerank_from_scores(load_rerank_scores(rerank_file));
    } else {
      rerank = oracle_rerank(index_repo, *queries, config.weights);
    }
  }

  std::vector<RetrievalResult> results(queries->size());
  parallel_for_index(queries->size(), config.threads, [&](std::size_t i) {
    const CaseRecord& q = queries->records[i];
    if (two_stage) {
      results[i] = two_stage_retrieve(index, index_repo, q.id, q.question, config.n_coarse,
                                      k, rerank, embeddings ? &*embeddings : nullptr);
      return;
    }
    RetrievalResult r;
    if (index.mode() == IndexMode::Embedding) {
      const EmbeddingVector* qv = embeddings->find(q.id);
      if (qv == nullptr) {
        throw Error(errkind::kMissingEmbeddings,
                    "no embedding vector for query '" + q.id + "'");
      }
      r = index.retrieve(std::span<const double>(qv->values), k, q.id);
    } else {
      r = index.retrieve(q.question, k, q.id);
    }
    r.query_id = q.id;
    results[i] = r;
  });

  fs::create_directories(config.out_dir);
  fs::path path = fs::path(config.out_dir) /
                  ("retrieval_" + query_split + "_vs_" + index_split + ".jsonl");
  save_retrieval_results(path, results);

  ordered_json out = report_header(config, hashes);
  out["query_split"] = query_split;
  out["index_split"] = index_split;
  out["mode"] = std::string(index_mode_name(index.mode()));
  out["two_stage"] = two_stage;
  out["k"] = k;
  out["queries"] = results.size();
  write_json(fs::path(config.out_dir) / "retrieve_report.json", out);
  std::printf("retrieved top-%zu for %zu queries -> %s\n", k, results.size(),
              path.string().c_str());
  return kExitOk;
}

int cmd_exec(const RunConfig& config, const std::string& split,
             const std::string& one_off_program, const std::string& record_id) {
  // one-off evaluation of a program string
  if (!one_off_program.empty()) {
    Program program = parse_program(one_off_program);
    const TableData* table = nullptr;
    CaseRepository repo;
    ordered_json hashes = ordered_json::object();
    if (!record_id.empty()) {
      IngestReport report;
      repo = ingest_split(config, split, report, hashes);
      table = &repo.at(record_id).table;
    }
    ExecResult result = execute(program, table);
    std::printf("%s\n", result.to_string().c_str());
    return kExitOk;
  }

  ordered_json hashes = ordered_json::object();
  IngestReport report;
  CaseRepository repo = ingest_split(config, split, report, hashes);

  struct Failure {
    std::string id;
    std::string cls;
    std::string detail;
  };
  std::vector<ExecResult> results(repo.size());
  std::vector<int> status(repo.size(), 0);  // 0 = match, 1 = mismatch, 2 = exec error
  std::vector<std::string> detail(repo.size());

  parallel_for_index(repo.size(), config.threads, [&](std::size_t i) {
    const CaseRecord& r = repo.records[i];
    try {
      ExecResult got = execute(r.program, r.table.empty() ? nullptr : &r.table);
      results[i] = got;
      bool ok = false;
      try {
        ok = answers_match(got, r.gold_answer, config.match);
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) {
        status[i] = 1;
        detail[i] = "expected " + r.gold_answer.to_string() + ", got " + got.to_string();
      }
    } catch (const ExecError& e) {
      status[i] = 2;
      detail[i] = std::string(e.kind()) + ": " + e.what();
    }
  });

  std::size_t matched = 0;
  std::map<std::string, std::size_t> error_classes;
  ordered_json failures = ordered_json::array();
  for (std::size_t i = 0; i < repo.size(); ++i) {
    if (status[i] == 0) {
      ++matched;
      continue;
    }
    std::string cls = status[i] == 1 ? "Mismatch" : detail[i].substr(0, detail[i].find(':'));
    ++error_classes[cls];
    failures.push_back(ordered_json{
        {"id", repo.records[i].id}, {"class", cls}, {"detail", detail[i]}});
  }

  double rate = repo.size() > 0 ? static_cast<double>(matched) / repo.size() : 0.0;
  ordered_json out = report_header(config, hashes);
  out["split"] = split;
  out["total"] = repo.size();
  out["matched"] = matched;
  out["match_rate"] = rate;
  ordered_json classes = ordered_json::object();
  for (const auto& [cls, count] : error_classes) classes[cls] = count;
  out["failure_classes"] = std::move(classes);
  out["failures"] = std::move(failures);
  out["ingest_rejected"] = issues_json(report.rejected);
  write_json(fs::path(config.out_dir) / ("exec_report_" + split + ".json"), out);

  std::printf("%s: %zu/%zu gold programs reproduce the stored answer (%.2f%%)\n",
              split.c_str(), matched, repo.size(), 100.0 * rate);
  for (const auto& [cls, count] : error_classes) {
    std::printf("  %s: %zu\n", cls.c_str(), count);
  }
  return kExitOk;
}

int cmd_eval(const RunConfig& config, const std::string& split,
             const std::string& predictions_file, const std::string& retrieval_file,
             const std::string& gold_cases_file) {
  ordered_json hashes = ordered_json::object();
  IngestReport report;
  CaseRepository repo = ingest_split(config, split, report, hashes);

  hashes[predictions_file] = file_hash_hex(predictions_file);
  std::vector<PredictionRecord> predictions = load_predictions(predictions_file);

  EvalOptions opt;
  opt.match = config.match;
  opt.weights = config.weights;
  opt.threads = config.threads;
  EvalReport eval = evaluate_predictions(predictions, repo, opt);

  if (!retrieval_file.empty() && !gold_cases_file.empty()) {
    hashes[retrieval_file] = file_hash_hex(retrieval_file);
    hashes[gold_cases_file] = file_hash_hex(gold_cases_file);
    std::vector<RetrievalResult> retrieved = load_retrieval_results(retrieval_file);
    std::map<std::string, GoldCaseSet> gold_sets = load_gold_cases(gold_cases_file);
    for (std::size_t k : config.k_list) {
      std::size_t evaluated = 0;
      std::size_t skipped = 0;
      double p = precision_at_k(retrieved, gold_sets, k, &evaluated, &skipped);
      eval.precision_at_k[k] = p;
      eval.precision_queries = evaluated;
      eval.precision_skipped_empty_gold = skipped;
    }
  }

  ordered_json out = report_header(config, hashes);
  out["split"] = split;
  out["predictions"] = predictions_file;
  out["total"] = eval.total;
  out["execution_accuracy"] = eval.execution_accuracy;
  out["program_accuracy"] = eval.program_accuracy;
  out["operator_accuracy"] = eval.operator_accuracy;
  out["operator_token_accuracy"] = eval.operator_token_accuracy;
  out["counts"] = ordered_json{{"unparsable", eval.unparsable},
                               {"exec_errors", eval.exec_errors},
                               {"exe_correct", eval.exe_correct},
                               {"exe_wrong", eval.exe_wrong}};
  if (!eval.precision_at_k.empty()) {
    ordered_json prec = ordered_json::object();
    for (const auto& [k, p] : eval.precision_at_k) prec[std::to_string(k)] = p;
    out["precision_at_k"] = std::move(prec);
    out["precision_queries"] = eval.precision_queries;
    out["precision_skipped_empty_gold"] = eval.precision_skipped_empty_gold;
  }
  ordered_json verdicts = ordered_json::array();
  for (const VerdictRow& row : eval.verdicts) {
    verdicts.push_back(ordered_json{{"id", row.id},
                                    {"parsed", row.parsed},
                                    {"exec_ok", row.exec_ok},
                                    {"exe_correct", row.exe_correct},
                                    {"prog_correct", row.prog_correct},
                                    {"ops_correct", row.ops_correct},
                                    {"exec_error", row.exec_error},
                                    {"exec_correct_program_wrong",
                                     row.exec_correct_program_wrong},
                                    {"ops_token_ratio", row.ops_token_ratio}});
  }
  out["verdicts"] = std::move(verdicts);
  write_json(fs::path(config.out_dir) / "eval_report.json", out);

  // aligned text table
  std::string table;
  char line[256];
  std::snprintf(line, sizeof(line), "%-32s %9s %9s %9s %13s\n", "Predictions", "Exe Acc",
                "Prog Acc", "Ops Acc", "Ops Acc (tok)");
  table += line;
  std::snprintf(line, sizeof(line), "%-32s %9.2f %9.2f %9.2f %13.2f\n",
                fs::path(predictions_file).filename().string().c_str(),
                100.0 * eval.execution_accuracy, 100.0 * eval.program_accuracy,
                100.0 * eval.operator_accuracy, 100.0 * eval.operator_token_accuracy);
  table += line;
  for (const auto& [k, p] : eval.precision_at_k) {
    std::snprintf(line, sizeof(line), "precision@%-22zu %9.2f\n", k, 100.0 * p);
    table += line;
  }
  std::fputs(table.c_str(), stdout);
  std::ofstream txt(fs::path(config.out_dir) / "eval_report.txt");
  txt << table;
  return kExitOk;
}

int cmd_score(const RunConfig& config, const std::string& target_text,
              const std::string& candidate_text, int random_trials) {
  Program target = parse_program(target_text);
  Program candidate = parse_program(candidate_text);
  ProgramScore score = program_score(target, candidate, config.weights);

  ordered_json j;
  j["s"] = score.s;
  j["ops_term"] = score.ops_term;
  j["arg_term"] = score.arg_term;
  j["l_ops"] = score.l_ops;
  j["l_arg"] = score.l_arg;
  j["d_ops"] = score.d_ops;
  j["d_arg"] = score.d_arg;
  j["w_ops"] = score.w_ops;
  j["w_arg"] = score.w_arg;
  j["equivalent"] = programs_equivalent(target, candidate);
  j["canonical_target"] = canonicalize(target).encoding;
  j["canonical_candidate"] = canonicalize(candidate).encoding;
  if (random_trials > 0) {
    RandomEvalOptions opt;
    opt.trials = random_trials;
    opt.seed = config.seed;
    j["random_eval_agrees"] = random_eval_equivalent(target, candidate, opt);
  }
  std::printf("%s\n", j.dump(2).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"case-based toolkit for numerical QA over financial documents"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags remain usable after the subcommand name

  CliOverrides o;
  app.add_option("--config", o.config_file, "JSON config file")->envname("CASEKIT_CONFIG");
  app.add_option("--out", o.out_dir, "output directory (overrides config)");
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "random seed (overrides config)");
  int threads_flag = 0;
  auto* threads_opt =
      app.add_option("--threads", threads_flag, "worker threads; 1 = serial (overrides config)");
  double threshold_flag = 0.0;
  auto* threshold_opt =
      app.add_option("--threshold", threshold_flag, "gold-case score threshold");
  double w_ops_flag = 0.0;
  auto* w_ops_opt = app.add_option("--w-ops", w_ops_flag, "operation weight (w_arg = 1 - w_ops)");
  std::string pool_flag;
  auto* pool_opt = app.add_option("--pool", pool_flag, "candidate pool: all | top_n");
  std::string index_mode_flag;
  auto* index_mode_opt =
      app.add_option("--index-mode", index_mode_flag, "bm25 | tfidf | embedding");
  std::vector<std::size_t> k_flag;
  auto* k_opt = app.add_option("--k", k_flag, "k values for retrieval / precision");

  std::string split = "train";
  std::vector<std::string> splits;
  std::string query_split = "train";
  std::string pool_split = "train";
  std::string index_split = "train";
  std::string predictions_file;
  std::string retrieval_file;
  std::string gold_cases_file;
  std::string rerank_file;
  std::string program_text;
  std::string record_id;
  std::string target_text;
  std::string candidate_text;
  bool two_stage = false;
  int random_trials = 0;

  auto* ingest_cmd = app.add_subcommand("ingest", "load, validate and normalize splits");
  ingest_cmd->add_option("--split", splits, "splits to ingest (default: all configured)");

  auto* stats_cmd = app.add_subcommand("stats", "corpus statistics per split");
  stats_cmd->add_option("--split", splits, "splits to report (default: all configured)");

  auto* linearize_cmd = app.add_subcommand("linearize", "render tables as sentences");
  linearize_cmd->add_option("--split", split, "split to linearize");

  auto* mine_cmd = app.add_subcommand("mine", "mine gold cases by program score");
  mine_cmd->add_option("--split,--query-split", query_split, "queries to mine for");
  mine_cmd->add_option("--pool-split", pool_split, "candidate pool split");

  auto* retrieve_cmd = app.add_subcommand("retrieve", "rank candidate cases per query");
  retrieve_cmd->add_option("--split,--query-split", query_split, "query split");
  retrieve_cmd->add_option("--index-split", index_split, "split the index covers");
  retrieve_cmd->add_flag("--two-stage", two_stage, "coarse index stage plus reranking");
  retrieve_cmd->add_option("--rerank-file", rerank_file,
                           "external rerank scores (default: gold-program oracle)");

  auto* exec_cmd = app.add_subcommand("exec", "execute gold programs against stored answers");
  exec_cmd->add_option("--split", split, "split to execute");
  exec_cmd->add_option("--program", program_text, "evaluate one program string instead");
  exec_cmd->add_option("--record", record_id, "table context for --program");

  auto* eval_cmd = app.add_subcommand("eval", "score a prediction file");
  eval_cmd->add_option("--split", split, "gold split");
  eval_cmd->add_option("--predictions", predictions_file, "prediction file (tsv)")->required();
  eval_cmd->add_option("--retrieval", retrieval_file, "retrieval results for precision@k");
  eval_cmd->add_option("--gold-cases", gold_cases_file, "gold-case file for precision@k");

  auto* score_cmd = app.add_subcommand("score", "program score between two programs");
  score_cmd->add_option("--target", target_text, "target program string")->required();
  score_cmd->add_option("--candidate", candidate_text, "candidate program string")->required();
  score_cmd->add_option("--random-trials", random_trials,
                        "also run the randomized equivalence oracle");

  CLI11_PARSE(app, argc, argv);

  try {
    if (seed_opt->count() > 0) o.seed = seed_flag;
    if (threads_opt->count() > 0) o.threads = threads_flag;
    if (threshold_opt->count() > 0) o.threshold = threshold_flag;
    if (w_ops_opt->count() > 0) o.w_ops = w_ops_flag;
    if (pool_opt->count() > 0) o.pool = pool_flag;
    if (index_mode_opt->count() > 0) o.index_mode = index_mode_flag;
    if (k_opt->count() > 0) o.k_list = k_flag;
    RunConfig config = make_config(o);

    if (splits.empty()) {
      for (const auto& [name, path] : config.splits) splits.push_back(name);
    }

    if (ingest_cmd->parsed()) return cmd_ingest(config, splits);
    if (stats_cmd->parsed()) return cmd_stats(config, splits);
    if (linearize_cmd->parsed()) return cmd_linearize(config, split);
    if (mine_cmd->parsed()) return cmd_mine(config, query_split, pool_split);
    if (retrieve_cmd->parsed())
      return cmd_retrieve(config, query_split, index_split, two_stage, rerank_file);
    if (exec_cmd->parsed()) return cmd_exec(config, split, program_text, record_id);
    if (eval_cmd->parsed())
      return cmd_eval(config, split, predictions_file, retrieval_file, gold_cases_file);
    if (score_cmd->parsed())
      return cmd_score(config, target_text, candidate_text, random_trials);
    std::fprintf(stderr, "no subcommand selected\n");
    return kExitValidation;
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.kind().c_str(), e.what());
    if (e.kind() == errkind::kIoError || e.kind() == errkind::kSchemaMismatch) {
      return kExitIo;
    }
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
}
