// Benchmark: serial reference vs OpenMP mining kernel on a synthetic corpus
// at configurable scale. Not part of the test suite.
//
//   casekit_bench [records] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "casekit/corpus.hpp"
#include "casekit/mining.hpp"
#include "casekit/parallel.hpp"
#include "support/generators.hpp"

using namespace casekit;

namespace {

double run_once(const CaseRepository& repo, int threads) {
  auto start = std::chrono::steady_clock::now();
  MiningRun run = threads == 1 ? mine_all_serial(repo, repo, MineOptions{})
                               : mine_all_parallel(repo, repo, MineOptions{}, nullptr, threads);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // keep the result alive so the work is not optimized away
  volatile std::size_t sink = run.coverage().ten_or_more;
  (void)sink;
  return elapsed;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t records = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000;
  int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

  testsupport::FixtureOptions opt;
  opt.records = records;
  opt.unique_program_fraction = 0.01;
  std::filesystem::path file =
      std::filesystem::temp_directory_path() / "casekit_bench_corpus.json";
  testsupport::write_fixture(file.string(), testsupport::build_fixture_split(opt, "train"));
  IngestReport report;
  CaseRepository repo = ingest(file, FieldMap{}, report);

  std::size_t pairs = repo.size() * (repo.size() - 1);
  std::printf("mining benchmark: %zu cases, %zu program-score pairs, %d hardware threads\n",
              repo.size(), pairs, effective_threads(0));

  double best_serial = 1e300;
  double best_parallel = 1e300;
  for (int r = 0; r < repeats; ++r) {
    double s = run_once(repo, 1);
    double p = run_once(repo, 0);
    if (s < best_serial) best_serial = s;
    if (p < best_parallel) best_parallel = p;
    std::printf("  run %d: serial %.3fs (%.1f Mpairs/s) | parallel %.3fs (%.1f Mpairs/s)\n",
                r + 1, s, pairs / s / 1e6, p, pairs / p / 1e6);
  }
  std::printf("best: serial %.3fs, parallel %.3fs, speedup %.2fx\n", best_serial,
              best_parallel, best_serial / best_parallel);
  return 0;
}
