#include "doctest.h"
#include "helpers.hpp"
#include "netfuse/align.hpp"
#include "netfuse/depstats.hpp"

using namespace netfuse;

namespace {

SimilarityMatrix constant(std::vector<std::string> ids, double v) {
  const auto n = static_cast<Eigen::Index>(ids.size());
  Dense m = Dense::Constant(n, n, v);
  m.diagonal().setOnes();
  return SimilarityMatrix(NodeRoster(std::move(ids)), m);
}

oracle::Period as_period(const SimilarityMatrix& s) { return {s.roster().ids(), th::to_mat(s.values())}; }

}  // namespace

TEST_CASE("intersect") {
  const auto out = intersect({constant({"A", "B", "C"}, 0.5), constant({"B", "C", "D"}, 0.2)});
  CHECK(out[0].roster().ids() == std::vector<std::string>{"B", "C"});
  CHECK(out[1](0, 1) == 0.2);
  const auto same = intersect({constant({"A", "B"}, 0.5), constant({"A", "B"}, 0.3)});
  CHECK(same[1](0, 1) == 0.3);
  try {
    intersect({constant({"A", "B"}, 0.5), constant({"C", "D"}, 0.5)});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyIntersection);
  }
  CHECK_THROWS_AS(intersect({constant({"A", "B"}, 0.5)}), Error);
}

TEST_CASE("impute: zeros for entering or leaving journals, means across gaps") {
  Dense a(3, 3), c(3, 3);
  a << 1, 0.4, 0.7, 0.4, 1, 0.5, 0.7, 0.5, 1;
  c << 1, 0.2, 0.9, 0.2, 1, 0.1, 0.9, 0.1, 1;
  const SimilarityMatrix p2006(NodeRoster({"A", "G", "X"}), a);
  const SimilarityMatrix p2012 = constant({"A", "N", "X"}, 0.6);  // G missing, N only here
  const SimilarityMatrix p2019(NodeRoster({"A", "G", "X"}), c);
  const auto out = impute({p2006, p2012, p2019});
  const auto& r = out[1].roster();
  CHECK(r.ids() == std::vector<std::string>{"A", "G", "N", "X"});
  CHECK(out[1](r.index_of("A"), r.index_of("G")) == doctest::Approx(0.3));
  CHECK(out[1](r.index_of("G"), r.index_of("X")) == doctest::Approx(0.3));
  CHECK(out[1](r.index_of("G"), r.index_of("N")) == 0.0);  // never together
  CHECK(out[0](r.index_of("N"), r.index_of("A")) == 0.0);
  CHECK(out[2](r.index_of("N"), r.index_of("X")) == 0.0);
  CHECK(out[0](r.index_of("N"), r.index_of("N")) == 1.0);
}

TEST_CASE("impute matches the entrywise oracle on random churn") {
  PortableRng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SimilarityMatrix> periods;
    for (int t = 0; t < 3; ++t) {
      const auto full = th::random_similarity(12, rng);
      std::vector<std::string> keep;
      for (const auto& id : full.roster().ids())
        if (rng.uniform01() < 0.75) keep.push_back(id);
      if (keep.size() < 2) keep = {"n0000", "n0001"};
      periods.push_back(full.restrict_to(NodeRoster(keep)));
    }
    const auto out = impute(periods);
    std::vector<oracle::Period> op;
    for (const auto& p : periods) op.push_back(as_period(p));
    for (std::size_t t = 0; t < 3; ++t) {
      CHECK(out[t].roster() == out[0].roster());
      for (std::size_t i = 0; i < out[t].size(); ++i)
        for (std::size_t j = 0; j < out[t].size(); ++j)
          CHECK(out[t](i, j) == oracle::imputed(op, t, out[t].roster().id(i), out[t].roster().id(j)));
    }
  }
}

TEST_CASE("full overlap: impute and intersect are the identity") {
  PortableRng rng(2);
  const std::vector<SimilarityMatrix> ps{th::random_similarity(8, rng), th::random_similarity(8, rng)};
  for (const auto mode : {AlignMode::Impute, AlignMode::Intersect}) {
    const auto out = align(ps, mode);
    for (std::size_t t = 0; t < 2; ++t) CHECK((out[t].values().array() == ps[t].values().array()).all());
  }
}

TEST_CASE("gdc of aligned identical matrices is 1") {
  PortableRng rng(3);
  const auto s = th::random_similarity(20, rng);
  const auto part = s.restrict_to(NodeRoster(std::vector<std::string>(s.roster().ids().begin(), s.roster().ids().end() - 3)));
  const auto out = impute({s, part, s});
  const auto d0 = rows_to_distance(SampleMatrix::from_similarity(out[0]));
  const auto d2 = rows_to_distance(SampleMatrix::from_similarity(out[2]));
  CHECK(std::abs(dcor(d0, d2) - 1) < 1e-12);
  CHECK(parse_align_mode("impute") == AlignMode::Impute);
}
