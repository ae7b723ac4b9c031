#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "netfuse/ingest.hpp"

using namespace netfuse;

namespace {

WorkRecord article(std::string id, std::string journal, std::vector<std::string> authors,
                   std::vector<std::string> refs) {
  return make_work(std::move(id), std::move(journal), std::move(authors), std::move(refs), "article");
}

}  // namespace

TEST_CASE("filter keeps research articles with references") {
  const std::vector<WorkRecord> in{article("w1", "J", {"a"}, {"r1", "r2", "r3"}), article("w2", "J", {"a"}, {}),
                                   make_work("w3", "J", {"a"}, {"r1"}, "editorial"),
                                   make_work("w4", "J", {"a"}, {"r1"}, "research-article")};
  const auto out = filter_works(in);
  REQUIRE(out.size() == 2);
  CHECK(out[0].id == "w1");
  CHECK(out[1].id == "w4");
  CHECK(filter_works({}).empty());
}

TEST_CASE("editor incidence is binary") {
  const auto m = build_editor_incidence({{"J1", "E1"}, {"J1", "E1"}, {"J2", "E1"}});
  CHECK(m.mode() == IncidenceMode::Binary);
  CHECK(m.at("J1", "E1") == 1.0);
  CHECK(m.at("J2", "E1") == 1.0);
  CHECK(m.total() == 2.0);
  CHECK_THROWS_AS(build_editor_incidence({}), Error);
}

TEST_CASE("author incidence counts fractionally") {
  auto m = build_author_incidence({article("w1", "J", {"a", "b"}, {"r"})});
  CHECK(m.at("J", "a") == 0.5);
  CHECK(m.at("J", "b") == 0.5);
  m = build_author_incidence({article("w1", "J", {"a"}, {"r"}), article("w2", "J", {"a"}, {"r"})});
  CHECK(m.at("J", "a") == 2.0);
  try {
    build_author_incidence({article("w1", "J", {}, {"r"})});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroAuthors);
  }
}

TEST_CASE("reference incidence counts citations") {
  const auto m = build_reference_incidence({article("w1", "J", {"a"}, {"R"}), article("w2", "J", {"a"}, {"R", "S"}),
                                            article("w3", "J", {"a"}, {"R"}), article("w4", "K", {"a"}, {"R"})});
  CHECK(m.at("J", "R") == 3.0);
  CHECK(m.at("J", "S") == 1.0);
  CHECK(m.at("K", "S") == 0.0);
  CHECK(m.at("K", "R") == 1.0);
}

TEST_CASE("random corpora: mass conservation and brute-force tallies") {
  PortableRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<WorkRecord> works;
    std::map<std::pair<std::string, std::string>, double> refs;
    const int nworks = 1 + static_cast<int>(rng.below(60));
    for (int w = 0; w < nworks; ++w) {
      const std::string j = "J" + std::to_string(rng.below(5));
      std::vector<std::string> a, r;
      for (std::uint64_t k = 0, m = 1 + rng.below(4); k < m; ++k) a.push_back("A" + std::to_string(rng.below(10)));
      for (std::uint64_t k = 0, m = 1 + rng.below(5); k < m; ++k) {
        r.push_back("R" + std::to_string(rng.below(12)));
        refs[{j, r.back()}] += 1;
      }
      works.push_back(article("w" + std::to_string(w), j, a, r));
    }
    const auto authors = build_author_incidence(works);
    CHECK(authors.total() == doctest::Approx(static_cast<double>(nworks)).epsilon(1e-12));
    const auto count = build_reference_incidence(works);
    for (const auto& [key, c] : refs) CHECK(count.at(key.first, key.second) == c);
    CHECK(count.total() == doctest::Approx(std::accumulate(refs.begin(), refs.end(), 0.0,
                                                           [](double s, const auto& kv) { return s + kv.second; })));
    // idempotent
    CHECK(format_incidence_csv(build_author_incidence(works)) == format_incidence_csv(authors));
  }
}

TEST_CASE("incidence csv round trip") {
  const auto m = build_author_incidence({article("w1", "J", {"a", "b", "c"}, {"r"}), article("w2", "K", {"a"}, {"r"})});
  const auto back = parse_incidence_csv(format_incidence_csv(m));
  CHECK(back.mode() == IncidenceMode::Fractional);
  CHECK(back.at("J", "a") == 1.0 / 3.0);
  CHECK(back.at("K", "a") == 1.0);
  CHECK(back.rows() == m.rows());
}

TEST_CASE("works jsonl parsing") {
  const std::string text =
      R"({"id":"w1","journal":"J","authors":["a","b"],"references":["r"],"type":"article","ref_count":1})"
      "\n\n"
      R"({"id":"w2","journal":"K","authors":["a"],"references":[],"type":"editorial"})"
      "\n";
  const auto works = parse_works_jsonl(text);
  REQUIRE(works.size() == 2);
  CHECK(works[0].is_research_article);
  CHECK(works[0].has_references);
  CHECK_FALSE(works[1].has_references);
  CHECK(parse_works_jsonl(format_work_jsonl(works[0]))[0].authors == works[0].authors);
  CHECK_THROWS_AS(parse_works_jsonl("{\"id\":1}"), Error);
  CHECK_THROWS_AS(parse_works_jsonl("not json"), Error);
}

TEST_CASE("editor pairs csv") {
  const auto pairs = parse_editor_pairs_csv("journal_id,editor_id\nJ1,E1\r\nJ2, E2\n");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[1].second == "E2");
  CHECK_THROWS_AS(parse_editor_pairs_csv("J1;E1\n"), Error);
}

TEST_CASE("embeddings jsonl") {
  const auto set = parse_embeddings_jsonl(
      "{\"journal\":\"J\",\"doc\":\"d1\",\"vec\":[1,0]}\n{\"journal\":\"J\",\"doc\":\"d2\",\"vec\":[0,1]}\n");
  CHECK(set.dim == 2);
  CHECK(set.journals.at("J").size() == 2);
  CHECK_THROWS_AS(parse_embeddings_jsonl("{\"journal\":\"J\",\"vec\":[1,0]}\n{\"journal\":\"K\",\"vec\":[1]}\n"),
                  Error);
  try {
    parse_embeddings_jsonl("{\"journal\":\"J\",\"vec\":[1,\"x\"]}\n");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

TEST_CASE("incidence validation") {
  SparseRows v(1, 1);
  v.insert(0, 0) = 2.0;
  CHECK_THROWS_AS(IncidenceMatrix(NodeRoster({"J"}), {"E"}, v, IncidenceMode::Binary), Error);
  v.coeffRef(0, 0) = -1.0;
  CHECK_THROWS_AS(IncidenceMatrix(NodeRoster({"J"}), {"E"}, v, IncidenceMode::Count), Error);
}
