#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "casekit/corpus.hpp"
#include "casekit/errors.hpp"
#include "casekit/retrieval.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace casekit;

namespace {

CaseRepository small_repo() {
  auto make = [](const std::string& id, const std::string& question) {
    CaseRecord r;
    r.id = id;
    r.question = question;
    r.program_text = "add(1, 2)";
    r.program = parse_program(r.program_text);
    r.gold_answer = ExecResult::numeric(3.0);
    return r;
  };
  CaseRepository repo;
  repo.add(make("a", "what was the net revenue change between 2006 and 2007 ?"));
  repo.add(make("b", "what portion of total debt matures after 2010 ?"));
  repo.add(make("c", "what was the average risk-free interest rate in 2006 ?"));
  repo.add(make("d", "how much did operating expenses grow in 2007 ?"));
  return repo;
}

EmbeddingStore random_store(testsupport::Rng& rng, const CaseRepository& repo,
                            std::size_t dim) {
  EmbeddingStore store;
  store.dim = dim;
  for (const CaseRecord& r : repo.records) {
    EmbeddingVector v;
    v.id = r.id;
    for (std::size_t i = 0; i < dim; ++i) v.values.push_back(rng.uniform(-1.0, 1.0));
    store.by_id[v.id] = store.vectors.size();
    store.vectors.push_back(std::move(v));
  }
  return store;
}

}  // namespace

TEST_CASE("build covers every case exactly once") {
  CaseRepository repo = small_repo();
  for (IndexMode mode : {IndexMode::Bm25, IndexMode::Tfidf}) {
    IndexOptions opt;
    opt.mode = mode;
    CaseIndex index = CaseIndex::build(repo, opt);
    CHECK(index.size() == repo.size());
  }
}

TEST_CASE("empty repositories cannot be indexed") {
  CaseRepository repo;
  CHECK_THROWS_AS(CaseIndex::build(repo, IndexOptions{}), Error);
}

TEST_CASE("self-retrieval: a stored question ranks itself first") {
  CaseRepository repo = small_repo();
  for (IndexMode mode : {IndexMode::Bm25, IndexMode::Tfidf}) {
    IndexOptions opt;
    opt.mode = mode;
    CaseIndex index = CaseIndex::build(repo, opt);
    for (const CaseRecord& r : repo.records) {
      RetrievalResult result = index.retrieve(r.question, 2);
      REQUIRE(!result.ranked.empty());
      CHECK(result.ranked[0].first == r.id);
    }
  }
}

TEST_CASE("k beyond the repository returns everything, ranked") {
  CaseRepository repo = small_repo();
  CaseIndex index = CaseIndex::build(repo, IndexOptions{});
  RetrievalResult result = index.retrieve("net revenue 2006", 100);
  CHECK(result.ranked.size() == repo.size());
  for (std::size_t i = 1; i < result.ranked.size(); ++i) {
    CHECK(result.ranked[i - 1].second >= result.ranked[i].second);
  }
}

TEST_CASE("excluded ids never appear") {
  CaseRepository repo = small_repo();
  CaseIndex index = CaseIndex::build(repo, IndexOptions{});
  RetrievalResult result = index.retrieve(repo.records[0].question, 10, "a");
  for (const auto& [id, score] : result.ranked) CHECK(id != "a");
}

TEST_CASE("identical rebuilds rank identically") {
  CaseRepository repo = small_repo();
  IndexOptions opt;
  opt.mode = IndexMode::Bm25;
  CaseIndex first = CaseIndex::build(repo, opt);
  CaseIndex second = CaseIndex::build(repo, opt);
  for (const CaseRecord& r : repo.records) {
    RetrievalResult a = first.retrieve(r.question, 4);
    RetrievalResult b = second.retrieve(r.question, 4);
    REQUIRE(a.ranked.size() == b.ranked.size());
    for (std::size_t i = 0; i < a.ranked.size(); ++i) {
      CHECK(a.ranked[i].first == b.ranked[i].first);
      CHECK(a.ranked[i].second == b.ranked[i].second);
    }
  }
}

TEST_CASE("mode mismatch is rejected both ways") {
  CaseRepository repo = small_repo();
  CaseIndex lexical = CaseIndex::build(repo, IndexOptions{});
  std::vector<double> query{1.0, 2.0};
  CHECK_THROWS_AS(lexical.retrieve(std::span<const double>(query), 2), Error);

  testsupport::Rng rng(5);
  EmbeddingStore store = random_store(rng, repo, 4);
  CaseIndex embedded = CaseIndex::build_embeddings(repo, store);
  CHECK_THROWS_AS(embedded.retrieve("text query", 2), Error);
}

TEST_CASE("embedding index requires a vector per case and rejects zero norms") {
  CaseRepository repo = small_repo();
  testsupport::Rng rng(6);
  EmbeddingStore store = random_store(rng, repo, 4);
  store.by_id.erase("c");
  CHECK_THROWS_WITH_AS(CaseIndex::build_embeddings(repo, store), doctest::Contains("'c'"),
                       Error);

  EmbeddingStore zeros = random_store(rng, repo, 4);
  zeros.vectors[1].values = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(CaseIndex::build_embeddings(repo, zeros), Error);
}

TEST_CASE("embedding retrieval reproduces the brute-force cosine ranking") {
  testsupport::Rng rng(987);
  CaseRepository repo;
  for (int i = 0; i < 40; ++i) {
    CaseRecord r;
    r.id = "case_" + std::to_string(i);
    r.question = "question " + std::to_string(i);
    r.program_text = "add(1, 2)";
    r.program = parse_program(r.program_text);
    r.gold_answer = ExecResult::numeric(3.0);
    repo.add(std::move(r));
  }
  EmbeddingStore store = random_store(rng, repo, 12);
  CaseIndex index = CaseIndex::build_embeddings(repo, store);

  std::vector<std::pair<std::string, std::vector<double>>> docs;
  for (const EmbeddingVector& v : store.vectors) docs.emplace_back(v.id, v.values);

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> query(12);
    for (auto& x : query) x = rng.uniform(-1.0, 1.0);
    RetrievalResult got = index.retrieve(std::span<const double>(query), 10);
    std::vector<std::string> expected = testsupport::oracle_cosine_ranking(docs, query, 10, "");
    REQUIRE(got.ranked.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(got.ranked[i].first == expected[i]);
    }
  }
}

TEST_CASE("two-stage: full-width coarse stage equals pure reranking") {
  CaseRepository repo = small_repo();
  CaseIndex index = CaseIndex::build(repo, IndexOptions{});

  // rerank scores independent of the coarse ordering
  auto rerank = [](const std::string&, const std::string& case_id) -> std::optional<double> {
    return case_id == "d" ? 3.0 : case_id == "b" ? 2.0 : 1.0;
  };
  RetrievalResult result = two_stage_retrieve(index, repo, "a", repo.at("a").question,
                                              repo.size(), 2, rerank);
  REQUIRE(result.ranked.size() == 2);
  CHECK(result.ranked[0].first == "d");
  CHECK(result.ranked[1].first == "b");
  CHECK(result.query_id == "a");
}

TEST_CASE("two-stage: k equal to n_coarse reorders the coarse set") {
  CaseRepository repo = small_repo();
  CaseIndex index = CaseIndex::build(repo, IndexOptions{});
  auto rerank = [](const std::string&, const std::string& id) -> std::optional<double> {
    return id == "c" ? 1.0 : 0.5;
  };
  RetrievalResult coarse = index.retrieve(repo.at("a").question, 2, "a");
  RetrievalResult result =
      two_stage_retrieve(index, repo, "a", repo.at("a").question, 2, 2, rerank);
  REQUIRE(result.ranked.size() == 2);
  // same candidate set as the coarse stage, reordered by the rerank scores
  std::set<std::string> coarse_ids, two_ids;
  for (const auto& [id, s] : coarse.ranked) coarse_ids.insert(id);
  for (const auto& [id, s] : result.ranked) two_ids.insert(id);
  CHECK(coarse_ids == two_ids);
}

TEST_CASE("two-stage: a coarse candidate without a rerank score is an error") {
  CaseRepository repo = small_repo();
  CaseIndex index = CaseIndex::build(repo, IndexOptions{});
  auto rerank = [](const std::string&, const std::string& id) -> std::optional<double> {
    if (id == "b") return std::nullopt;
    return 1.0;
  };
  CHECK_THROWS_WITH_AS(
      two_stage_retrieve(index, repo, "a", repo.at("a").question, repo.size(), 2, rerank),
      doctest::Contains("rerank"), Error);
}

TEST_CASE("two-stage validates n_coarse >= k") {
  CaseRepository repo = small_repo();
  CaseIndex index = CaseIndex::build(repo, IndexOptions{});
  auto rerank = [](const std::string&, const std::string&) -> std::optional<double> {
    return 1.0;
  };
  CHECK_THROWS_AS(two_stage_retrieve(index, repo, "a", "q", 1, 2, rerank), Error);
}

TEST_CASE("oracle rerank scores candidates by gold-program similarity") {
  CaseRepository repo;
  auto make = [](const std::string& id, const std::string& program) {
    CaseRecord r;
    r.id = id;
    r.question = "question " + id;
    r.program_text = program;
    r.program = parse_program(program);
    r.gold_answer = ExecResult::numeric(0.0);
    return r;
  };
  repo.add(make("q", "divide(10, 2)"));
  repo.add(make("twin", "divide(10, 2)"));
  repo.add(make("far", "table-sum(revenue, none)"));

  RerankFn rerank = oracle_rerank(repo, repo);
  CHECK(*rerank("q", "twin") == 1.0);
  CHECK(*rerank("q", "far") < 0.5);
  CHECK_FALSE(rerank("q", "ghost").has_value());
}

TEST_CASE("stopword removal is configurable") {
  CaseRepository repo = small_repo();
  IndexOptions opt;
  opt.stopwords = {"what", "was", "the", "in"};
  CaseIndex index = CaseIndex::build(repo, opt);
  RetrievalResult result = index.retrieve("what was the net revenue", 1);
  REQUIRE(result.ranked.size() == 1);
  CHECK(result.ranked[0].first == "a");  // only content words score
}
