#pragma once

#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "netfuse/core_model.hpp"

namespace netfuse {

enum class SnfMode { Kernel, Direct };
std::string_view to_string(SnfMode mode);
SnfMode parse_snf_mode(std::string_view s);

struct SnfParams {
  int k = 20;          // neighbourhood size
  double alpha = 0.5;  // kernel bandwidth multiplier
  int iters = 20;      // diffusion rounds T
  SnfMode mode = SnfMode::Kernel;

  // Throws InvalidArgument unless k < n, iters >= 1, alpha > 0.
  void validate(std::size_t n) const;
};

// Nonnegative, symmetric (1e-10) affinity matrix.
struct AffinityMatrix {
  NodeRoster roster;
  Dense values;

  AffinityMatrix(NodeRoster roster, Dense values);
};

using SparseStochastic = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// The k other nodes closest to i: smallest `key` first, ties by index.
std::vector<Eigen::Index> nearest(const Eigen::Ref<const Eigen::RowVectorXd>& key, Eigen::Index self, int k);

// W(i,j) = exp(-d^2 / (alpha * eps_ij)), d = 1 - s and
// eps_ij = (mean kNN distance of i + same for j + d_ij) / 3, floored at 1e-12.
AffinityMatrix affinity_kernel(const SimilarityMatrix& s, int k, double alpha);
// Similarities used as affinities unchanged.
AffinityMatrix direct_affinity(const SimilarityMatrix& s);

// P(i,j) = W(i,j) / (2 sum_{l != i} W(i,l)), P(i,i) = 1/2.
Dense normalize_p(const Dense& w);
// Row-normalised W restricted to each node's k strongest neighbours (self excluded).
SparseStochastic local_kernel(const Dense& w, int k);

struct SnfTrace {
  std::vector<Dense> final_status;  // P^(v) after the last round
};

SimilarityMatrix fuse(const Multiplex& m, const SnfParams& p, SnfTrace* trace = nullptr);

}  // namespace netfuse
