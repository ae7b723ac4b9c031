#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netfuse/core_model.hpp"
#include "netfuse/ingest.hpp"

namespace netfuse {

enum class LayerKind { Editors, Authors, References, Abstracts };
std::string_view to_string(LayerKind kind);
LayerKind parse_layer_kind(std::string_view s);
inline constexpr LayerKind kAllLayerKinds[] = {LayerKind::Editors, LayerKind::Authors, LayerKind::References,
                                               LayerKind::Abstracts};

// What to do with a journal whose incidence row is all zero.
enum class ZeroRowPolicy { Error, Drop, Zero };
ZeroRowPolicy parse_zero_row_policy(std::string_view s);

struct CosineLayer {
  CosineMatrix matrix;
  std::vector<std::string> dropped;  // journals removed under ZeroRowPolicy::Drop
};

// Pairwise cosine between incidence rows.
CosineLayer cosine_rows(const IncidenceMatrix& inc, ZeroRowPolicy policy = ZeroRowPolicy::Drop);

// Entrywise S = 1 - sqrt(2(1 - C)) / 2. Zero-flagged rows get 0 off the diagonal.
double proper_similarity(double cosine);
SimilarityMatrix to_proper_similarity(const CosineMatrix& c);
// Cosine values used as similarities directly; rejects negative entries.
SimilarityMatrix raw_cosine_similarity(const CosineMatrix& c);

struct Medoid {
  std::size_t index;
  Eigen::VectorXd vector;
};

// argmin_i sum_j (1 - cos(v_i, v_j)); near-ties (1e-12) go to the lower index.
Medoid medoid(const std::vector<Eigen::VectorXd>& vectors);

CosineMatrix medoid_cosine(const EmbeddingSet& emb);
SimilarityMatrix abstract_layer(const EmbeddingSet& emb);

struct LayerOptions {
  ZeroRowPolicy zero_row = ZeroRowPolicy::Drop;
  bool raw_cosine = false;  // only honoured for nonnegative (incidence) layers
};

struct BuiltLayer {
  SimilarityMatrix matrix;
  std::vector<std::string> dropped;
};

BuiltLayer layer_from_incidence(const IncidenceMatrix& inc, const LayerOptions& opts = {});

}  // namespace netfuse
