#include "netfuse/snf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netfuse {

std::string_view to_string(SnfMode mode) { return mode == SnfMode::Kernel ? "kernel" : "direct"; }

SnfMode parse_snf_mode(std::string_view s) {
  if (s == "kernel") return SnfMode::Kernel;
  if (s == "direct") return SnfMode::Direct;
  throw Error(ErrorCode::InvalidArgument, "unknown SNF mode '" + std::string(s) + "'");
}

void SnfParams::validate(std::size_t n) const {
  if (k < 1 || static_cast<std::size_t>(k) >= n)
    throw Error(ErrorCode::InvalidArgument,
                "SNF neighbourhood k=" + std::to_string(k) + " must satisfy 1 <= k < n=" + std::to_string(n));
  if (iters < 1) throw Error(ErrorCode::InvalidArgument, "SNF needs at least one iteration");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "SNF alpha must be positive");
}

AffinityMatrix::AffinityMatrix(NodeRoster roster_, Dense values_) : roster(std::move(roster_)), values(std::move(values_)) {
  if (values.rows() != values.cols() || static_cast<std::size_t>(values.rows()) != roster.size())
    throw Error(ErrorCode::InvalidArgument, "affinity matrix shape does not match roster");
  check_finite(roster, values, "affinity matrix");
  check_symmetric(roster, values, 1e-10, "affinity matrix");
  if ((values.array() < 0.0).any()) throw Error(ErrorCode::RangeError, "affinity matrix has negative entries");
}

std::vector<Eigen::Index> nearest(const Eigen::Ref<const Eigen::RowVectorXd>& key, Eigen::Index self, int k) {
  std::vector<Eigen::Index> idx;
  idx.reserve(static_cast<std::size_t>(key.size()));
  for (Eigen::Index j = 0; j < key.size(); ++j)
    if (j != self) idx.push_back(j);
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk), idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
  idx.resize(kk);
  return idx;
}

AffinityMatrix affinity_kernel(const SimilarityMatrix& s, int k, double alpha) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.size());
  SnfParams{k, alpha, 1, SnfMode::Kernel}.validate(static_cast<std::size_t>(n));
  Dense d = (1.0 - s.values().array()).matrix();
  d.diagonal().setZero();

  Eigen::VectorXd knn_mean(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (auto j : nearest(d.row(i), i, k)) sum += d(i, j);
    knn_mean(i) = sum / static_cast<double>(k);
  }

  Dense w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double eps = std::max((knn_mean(i) + knn_mean(j) + d(i, j)) / 3.0, 1e-12);
      const double v = std::exp(-d(i, j) * d(i, j) / (alpha * eps));
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return AffinityMatrix(s.roster(), std::move(w));
}

AffinityMatrix direct_affinity(const SimilarityMatrix& s) { return AffinityMatrix(s.roster(), s.values()); }

Dense normalize_p(const Dense& w) {
  const Eigen::Index n = w.rows();
  Dense p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    if (!(off > 0.0))
      throw Error(ErrorCode::IsolatedNode, "row " + std::to_string(i) + " has zero off-diagonal affinity");
    p.row(i) = w.row(i) / (2.0 * off);
    p(i, i) = 0.5;
  }
  return p;
}

SparseStochastic local_kernel(const Dense& w, int k) {
  const Eigen::Index n = w.rows();
  if (k < 1 || k >= n)
    throw Error(ErrorCode::InvalidArgument, "local kernel needs 1 <= k < n, got k=" + std::to_string(k));
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd neg = -w.row(i);
    auto nb = nearest(neg, i, k);
    std::sort(nb.begin(), nb.end());
    double sum = 0.0;
    for (auto j : nb) sum += w(i, j);
    if (!(sum > 0.0))
      throw Error(ErrorCode::IsolatedNode, "row " + std::to_string(i) + " has no positive neighbour affinity");
    for (auto j : nb) trips.emplace_back(i, j, w(i, j) / sum);
  }
  SparseStochastic s(n, n);
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

SimilarityMatrix fuse(const Multiplex& m, const SnfParams& p, SnfTrace* trace) {
  const std::size_t layers = m.size();
  if (layers < 2) throw Error(ErrorCode::InvalidArgument, "fusion needs at least two layers");
  const std::size_t n = m.roster().size();
  p.validate(n);

  std::vector<Dense> status;
  std::vector<SparseStochastic> local;
  for (std::size_t v = 0; v < layers; ++v) {
    const AffinityMatrix w = p.mode == SnfMode::Kernel ? affinity_kernel(m[v], p.k, p.alpha) : direct_affinity(m[v]);
    status.push_back(normalize_p(w.values));
    local.push_back(local_kernel(w.values, p.k));
  }

  const double others = static_cast<double>(layers - 1);
  for (int t = 0; t < p.iters; ++t) {
    std::vector<Dense> next(layers);
    for (std::size_t v = 0; v < layers; ++v) {
      Dense mean = Dense::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t u = 0; u < layers; ++u)
        if (u != v) mean += status[u];
      mean /= others;
      // S * mean * S^T; only its symmetric part is kept, so the transpose
      // S * (S * mean)^T is equivalent and keeps both products sparse-times-dense.
      const Dense left = local[v] * mean;
      const Dense q = local[v] * left.transpose();
      const Dense sym = 0.5 * (q + q.transpose());
      next[v] = normalize_p(sym);
    }
    status = std::move(next);
  }

  Dense fused = Dense::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& s : status) fused += s;
  fused /= static_cast<double>(layers);
  fused = 0.5 * (fused + fused.transpose()).eval();
  fused.diagonal().setZero();
  const double top = fused.maxCoeff();
  if (top > 0.0) fused /= top;
  fused = fused.cwiseMax(0.0).cwiseMin(1.0);
  fused.diagonal().setOnes();
  if (trace) trace->final_status = std::move(status);
  return SimilarityMatrix(m.roster(), std::move(fused));
}

}  // namespace netfuse
