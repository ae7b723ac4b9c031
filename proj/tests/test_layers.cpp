#include "doctest.h"
#include "helpers.hpp"
#include "netfuse/layers.hpp"

using namespace netfuse;

namespace {

IncidenceMatrix incidence(const std::vector<std::string>& rows, const std::vector<std::vector<double>>& cells,
                          IncidenceMode mode = IncidenceMode::Count) {
  const auto nc = static_cast<Eigen::Index>(cells[0].size());
  SparseRows v(static_cast<Eigen::Index>(rows.size()), nc);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < nc; ++j)
      if (cells[i][static_cast<std::size_t>(j)] != 0) v.insert(static_cast<Eigen::Index>(i), j) = cells[i][static_cast<std::size_t>(j)];
  std::vector<std::string> cols;
  for (Eigen::Index j = 0; j < nc; ++j) cols.push_back("e" + std::to_string(j));
  return IncidenceMatrix(NodeRoster(rows), cols, v, mode);
}

double oracle_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double ab = 0, aa = 0, bb = 0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    ab += a(k) * b(k);
    aa += a(k) * a(k);
    bb += b(k) * b(k);
  }
  return ab / std::sqrt(aa * bb);
}

std::size_t oracle_medoid(const std::vector<Eigen::VectorXd>& v) {
  std::size_t best = 0;
  double best_total = 1e300;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double total = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
      if (j != i) total += 1 - oracle_cosine(v[i], v[j]);
    if (total < best_total - 1e-12) {
      best = i;
      best_total = total;
    }
  }
  return best;
}

Eigen::VectorXd unit(int d, PortableRng& rng) {
  Eigen::VectorXd v(d);
  for (int k = 0; k < d; ++k) v(k) = rng.normal();
  return v.normalized();
}

}  // namespace

TEST_CASE("cosine of incidence rows") {
  const auto c = cosine_rows(incidence({"a", "b", "c", "d"}, {{1, 1, 0}, {0, 1, 1}, {1, 1, 0}, {0, 0, 5}}));
  const Dense& m = c.matrix.values();
  CHECK(m(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m(0, 2) == 1.0);
  CHECK(m(0, 3) == 0.0);
  CHECK(m(1, 3) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK((m.diagonal().array() == 1.0).all());
}

TEST_CASE("zero rows: error, drop, zero") {
  const auto inc = incidence({"a", "b", "z"}, {{1, 0}, {1, 1}, {0, 0}});
  try {
    cosine_rows(inc, ZeroRowPolicy::Error);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroRow);
    CHECK(std::string(e.what()).find("z") != std::string::npos);
  }
  const auto dropped = cosine_rows(inc, ZeroRowPolicy::Drop);
  CHECK(dropped.matrix.size() == 2);
  CHECK(dropped.dropped == std::vector<std::string>{"z"});
  const auto zeroed = cosine_rows(inc, ZeroRowPolicy::Zero);
  CHECK(zeroed.matrix.zero_rows()[2]);
  const auto s = to_proper_similarity(zeroed.matrix);
  CHECK(s(2, 0) == 0.0);
  CHECK(s(2, 2) == 1.0);
}

TEST_CASE("cosine is invariant to rescaling a row") {
  PortableRng rng(5);
  std::vector<std::vector<double>> cells(6, std::vector<double>(9));
  for (auto& r : cells)
    for (auto& v : r) v = rng.uniform01() < 0.5 ? 0.0 : std::floor(1 + 4 * rng.uniform01());
  for (auto& r : cells) r[0] += 1;
  const Dense base = cosine_rows(incidence(th::ids(6), cells)).matrix.values();
  for (auto& v : cells[2]) v *= 7.25;
  const Dense scaled = cosine_rows(incidence(th::ids(6), cells)).matrix.values();
  CHECK((base - scaled).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("transform endpoints and monotonicity") {
  CHECK(std::abs(proper_similarity(1.0) - 1.0) <= 1e-15);
  CHECK(std::abs(proper_similarity(-1.0) - 0.0) <= 1e-15);
  CHECK(std::abs(proper_similarity(0.0) - (1 - std::sqrt(2.0) / 2)) <= 1e-15);
  CHECK_THROWS_AS(proper_similarity(1.1), Error);
  CHECK_NOTHROW(proper_similarity(1 + 1e-13));
  double prev = -1;
  for (int i = 0; i <= 2000; ++i) {
    const double s = proper_similarity(-1 + i / 1000.0);
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("1 - S is a metric on unit vectors") {
  PortableRng rng(17);
  for (int d : {3, 50, 384}) {
    double worst = -1;
    for (int t = 0; t < 3000; ++t) {
      const auto x = unit(d, rng), y = unit(d, rng), z = unit(d, rng);
      const auto dist = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return 1 - proper_similarity(std::clamp(a.dot(b), -1.0, 1.0));
      };
      worst = std::max(worst, dist(x, z) - dist(x, y) - dist(y, z));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("medoid") {
  CHECK(medoid({Eigen::Vector2d(3, 4)}).index == 0);
  const double r = 1 / std::sqrt(2.0);
  CHECK(medoid({Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(r, r)}).index == 2);
  CHECK(medoid({Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0)}).index == 1);
  CHECK_THROWS_AS(medoid({}), Error);
  CHECK_THROWS_AS(medoid({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)}), Error);

  PortableRng rng(23);
  for (int t = 0; t < 200; ++t) {
    std::vector<Eigen::VectorXd> v;
    const int m = 1 + static_cast<int>(rng.below(9));
    for (int i = 0; i < m; ++i) v.push_back(unit(4, rng) * (0.5 + rng.uniform01()));
    if (t % 5 == 0 && m > 2) v[2] = v[0];
    CHECK(medoid(v).index == oracle_medoid(v));
  }
}

TEST_CASE("abstract layer composes medoid, cosine, transform") {
  EmbeddingSet same;
  same.dim = 2;
  same.journals["A"] = {{"d", Eigen::Vector2d(1, 1)}};
  same.journals["B"] = {{"d", Eigen::Vector2d(2, 2)}};
  CHECK((abstract_layer(same).values().array() == 1.0).all());

  EmbeddingSet ortho;
  ortho.dim = 2;
  ortho.journals["A"] = {{"d", Eigen::Vector2d(1, 0)}};
  ortho.journals["B"] = {{"d", Eigen::Vector2d(0, 1)}};
  CHECK(abstract_layer(ortho)(0, 1) == doctest::Approx(1 - std::sqrt(2.0) / 2).epsilon(1e-15));

  PortableRng rng(29);
  EmbeddingSet emb;
  emb.dim = 5;
  for (const char* j : {"J1", "J2", "J3"})
    for (int d = 0; d < 4; ++d) emb.journals[j].push_back({std::to_string(d), unit(5, rng)});
  const SimilarityMatrix s = abstract_layer(emb);
  std::vector<Eigen::VectorXd> med;
  for (const auto& [j, docs] : emb.journals) {
    std::vector<Eigen::VectorXd> v;
    for (const auto& d : docs) v.push_back(d.vec);
    med.push_back(v[oracle_medoid(v)]);
  }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const double c = i == j ? 1.0 : oracle_cosine(med[i], med[j]);
      CHECK(s(i, j) == doctest::Approx(1 - 0.5 * std::sqrt(2 * (1 - c))).epsilon(1e-12));
    }

  EmbeddingSet empty;
  empty.dim = 2;
  empty.journals["A"] = {};
  CHECK_THROWS_AS(abstract_layer(empty), Error);
}

TEST_CASE("incidence layers: transform by default, raw cosine on request") {
  const auto inc = incidence({"a", "b"}, {{1, 1, 0}, {0, 1, 1}});
  const BuiltLayer t = layer_from_incidence(inc);
  CHECK(t.matrix(0, 1) == doctest::Approx(1 - 0.5 * std::sqrt(2 * 0.5)));
  LayerOptions raw;
  raw.raw_cosine = true;
  CHECK(layer_from_incidence(inc, raw).matrix(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("layer kinds parse") {
  for (const auto k : kAllLayerKinds) CHECK(parse_layer_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_layer_kind("texts"), Error);
}
