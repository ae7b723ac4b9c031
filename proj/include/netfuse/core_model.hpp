#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "netfuse/error.hpp"

namespace netfuse {

using Dense = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Ordered set of unique node ids (journal ids) with an id -> position index.
class NodeRoster {
 public:
  NodeRoster() = default;

  // Keeps the given order. Throws DuplicateId / InvalidArgument.
  explicit NodeRoster(std::vector<std::string> ids);

  // Lexicographic order; duplicates are rejected.
  static NodeRoster sorted(std::vector<std::string> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t i) const { return ids_.at(i); }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  std::size_t index_of(const std::string& id) const;
  // -1 when absent
  std::ptrdiff_t find(const std::string& id) const;

  friend bool operator==(const NodeRoster& a, const NodeRoster& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Symmetric, unit-diagonal similarity matrix with entries in [0,1].
class SimilarityMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  SimilarityMatrix(NodeRoster roster, Dense values);

  const NodeRoster& roster() const noexcept { return roster_; }
  const Dense& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return roster_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }

  // Submatrix over the given ids, in the given order.
  SimilarityMatrix restrict_to(const NodeRoster& sub) const;

 private:
  NodeRoster roster_;
  Dense values_;
};

// Raw cosine matrix, entries in [-1,1]. Rows flagged as zero (no entities)
// keep diagonal 1 and zero off-diagonals.
class CosineMatrix {
 public:
  CosineMatrix(NodeRoster roster, Dense values, std::vector<bool> zero_rows = {});

  const NodeRoster& roster() const noexcept { return roster_; }
  const Dense& values() const noexcept { return values_; }
  const std::vector<bool>& zero_rows() const noexcept { return zero_rows_; }
  std::size_t size() const noexcept { return roster_.size(); }

 private:
  NodeRoster roster_;
  Dense values_;
  std::vector<bool> zero_rows_;
};

struct NamedLayer {
  std::string name;
  SimilarityMatrix matrix;
};

// Layers sharing one roster, in input order.
class Multiplex {
 public:
  const NodeRoster& roster() const noexcept { return roster_; }
  const std::vector<NamedLayer>& layers() const noexcept { return layers_; }
  std::size_t size() const noexcept { return layers_.size(); }
  const SimilarityMatrix& operator[](std::size_t i) const { return layers_.at(i).matrix; }

 private:
  friend Multiplex validate_multiplex(std::vector<NamedLayer> layers);
  NodeRoster roster_;
  std::vector<NamedLayer> layers_;
};

// Throws RosterMismatch naming the first differing ids.
Multiplex validate_multiplex(std::vector<NamedLayer> layers);
Multiplex validate_multiplex(const std::vector<SimilarityMatrix>& layers);

// Shared entry checks; `what` names the matrix in error messages.
void check_finite(const NodeRoster& roster, const Dense& m, const std::string& what);
void check_symmetric(const NodeRoster& roster, const Dense& m, double tol, const std::string& what);

}  // namespace netfuse
