#include "netfuse/layers.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace netfuse {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Editors: return "editors";
    case LayerKind::Authors: return "authors";
    case LayerKind::References: return "references";
    case LayerKind::Abstracts: return "abstracts";
  }
  return "unknown";
}

LayerKind parse_layer_kind(std::string_view s) {
  for (auto k : kAllLayerKinds)
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown layer kind '" + std::string(s) + "'");
}

ZeroRowPolicy parse_zero_row_policy(std::string_view s) {
  if (s == "drop") return ZeroRowPolicy::Drop;
  if (s == "zero") return ZeroRowPolicy::Zero;
  if (s == "error") return ZeroRowPolicy::Error;
  throw Error(ErrorCode::InvalidArgument, "unknown zero-row policy '" + std::string(s) + "'");
}

namespace {

// Cosines this close to +-1 are parallel rows up to rounding. Snapping them
// matters because the similarity transform has infinite slope at C = 1.
constexpr double kParallelTol = 1e-13;

// Copies the upper triangle onto the lower one, pins the diagonal to 1 and
// clamps rounding excursions beyond [-1,1].
void tidy_cosine(Dense& c) {
  const Eigen::Index n = c.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = std::clamp(c(i, j), -1.0, 1.0);
      if (1.0 - std::abs(v) <= kParallelTol) v = v > 0 ? 1.0 : -1.0;
      c(i, j) = v;
      c(j, i) = v;
    }
  }
}

}  // namespace

CosineLayer cosine_rows(const IncidenceMatrix& inc, ZeroRowPolicy policy) {
  const SparseRows& v = inc.values();
  std::vector<double> norms(static_cast<std::size_t>(v.rows()), 0.0);
  for (Eigen::Index r = 0; r < v.outerSize(); ++r) {
    double s = 0.0;
    for (SparseRows::InnerIterator it(v, r); it; ++it) s += it.value() * it.value();
    norms[static_cast<std::size_t>(r)] = std::sqrt(s);
  }

  std::vector<std::string> kept_ids;
  std::vector<std::string> dropped;
  std::vector<Eigen::Index> kept_rows;
  std::vector<bool> zero_flags;
  for (std::size_t r = 0; r < norms.size(); ++r) {
    const std::string& id = inc.rows().id(r);
    if (norms[r] > 0.0) {
      kept_ids.push_back(id);
      kept_rows.push_back(static_cast<Eigen::Index>(r));
      zero_flags.push_back(false);
      continue;
    }
    switch (policy) {
      case ZeroRowPolicy::Error: throw Error(ErrorCode::ZeroRow, "journal '" + id + "' has no entities");
      case ZeroRowPolicy::Drop: dropped.push_back(id); break;
      case ZeroRowPolicy::Zero:
        kept_ids.push_back(id);
        kept_rows.push_back(static_cast<Eigen::Index>(r));
        zero_flags.push_back(true);
        break;
    }
  }
  if (!dropped.empty()) {
    std::string list;
    for (const auto& id : dropped) list += " " + id;
    spdlog::info("cosine_rows: dropped {} zero-row journal(s):{}", dropped.size(), list);
  }

  const auto n = static_cast<Eigen::Index>(kept_rows.size());
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index a = 0; a < n; ++a) {
    const Eigen::Index r = kept_rows[static_cast<std::size_t>(a)];
    const double norm = norms[static_cast<std::size_t>(r)];
    if (norm == 0.0) continue;
    for (SparseRows::InnerIterator it(v, r); it; ++it) trips.emplace_back(a, it.col(), it.value() / norm);
  }
  SparseRows unit(n, v.cols());
  unit.setFromTriplets(trips.begin(), trips.end());
  SparseRows gram = unit * SparseRows(unit.transpose());
  Dense c = Dense(gram);
  tidy_cosine(c);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!zero_flags[static_cast<std::size_t>(i)]) continue;
    c.row(i).setZero();
    c.col(i).setZero();
    c(i, i) = 1.0;
  }
  return {CosineMatrix(NodeRoster(std::move(kept_ids)), std::move(c), std::move(zero_flags)), std::move(dropped)};
}

double proper_similarity(double cosine) {
  if (!(std::abs(cosine) <= 1.0 + 1e-12))
    throw Error(ErrorCode::RangeError, "cosine value " + std::to_string(cosine) + " outside [-1,1]");
  const double c = std::clamp(cosine, -1.0, 1.0);
  return 1.0 - 0.5 * std::sqrt(2.0 * (1.0 - c));
}

SimilarityMatrix to_proper_similarity(const CosineMatrix& c) {
  const auto n = static_cast<Eigen::Index>(c.size());
  const auto& zero = c.zero_rows();
  Dense s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = proper_similarity(c.values()(i, j));
      if (zero[static_cast<std::size_t>(i)] || zero[static_cast<std::size_t>(j)]) v = 0.0;
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return SimilarityMatrix(c.roster(), std::move(s));
}

SimilarityMatrix raw_cosine_similarity(const CosineMatrix& c) {
  const auto n = static_cast<Eigen::Index>(c.size());
  Dense s = c.values();
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (s(i, j) < -1e-12)
        throw Error(ErrorCode::RangeError, "raw cosine entry (" + c.roster().id(i) + "," + c.roster().id(j) +
                                               ") is negative; apply the proper-similarity transform instead");
      s(i, j) = std::clamp(s(i, j), 0.0, 1.0);
    }
  }
  return SimilarityMatrix(c.roster(), std::move(s));
}

Medoid medoid(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty()) throw Error(ErrorCode::EmptyJournal, "no vectors to take a medoid of");
  const auto d = vectors.front().size();
  const auto m = static_cast<Eigen::Index>(vectors.size());
  Dense unit(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& v = vectors[static_cast<std::size_t>(i)];
    if (v.size() != d) throw Error(ErrorCode::InvalidArgument, "vectors differ in dimension");
    const double norm = v.norm();
    if (!(norm > 0.0)) throw Error(ErrorCode::ZeroVector, "vector " + std::to_string(i) + " has zero norm");
    unit.row(i) = v.transpose() / norm;
  }
  if (m == 1) return {0, vectors.front()};
  Dense gram = unit * unit.transpose();
  std::size_t best = 0;
  double best_total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
      if (j != i) total += 1.0 - gram(i, j);
    if (i == 0 || total < best_total - 1e-12 * std::max(1.0, std::abs(best_total))) {
      best = static_cast<std::size_t>(i);
      best_total = total;
    }
  }
  return {best, vectors[best]};
}

CosineMatrix medoid_cosine(const EmbeddingSet& emb) {
  std::vector<std::string> ids;
  std::vector<Eigen::VectorXd> medoids;
  for (const auto& [journal, docs] : emb.journals) {
    if (docs.empty()) throw Error(ErrorCode::EmptyJournal, "journal '" + journal + "' has no embeddings");
    std::vector<Eigen::VectorXd> vecs;
    vecs.reserve(docs.size());
    for (const auto& d : docs) vecs.push_back(d.vec);
    try {
      medoids.push_back(medoid(vecs).vector);
    } catch (const Error& e) {
      throw Error(e.code(), "journal '" + journal + "': " + e.what());
    }
    ids.push_back(journal);
  }
  const auto n = static_cast<Eigen::Index>(ids.size());
  Dense unit(n, static_cast<Eigen::Index>(emb.dim));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& v = medoids[static_cast<std::size_t>(i)];
    unit.row(i) = v.transpose() / v.norm();
  }
  Dense c = unit * unit.transpose();
  tidy_cosine(c);
  return CosineMatrix(NodeRoster(std::move(ids)), std::move(c));
}

SimilarityMatrix abstract_layer(const EmbeddingSet& emb) { return to_proper_similarity(medoid_cosine(emb)); }

BuiltLayer layer_from_incidence(const IncidenceMatrix& inc, const LayerOptions& opts) {
  auto cos = cosine_rows(inc, opts.zero_row);
  SimilarityMatrix s = opts.raw_cosine ? raw_cosine_similarity(cos.matrix) : to_proper_similarity(cos.matrix);
  return {std::move(s), std::move(cos.dropped)};
}

}  // namespace netfuse
