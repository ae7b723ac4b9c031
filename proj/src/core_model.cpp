#include "netfuse/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace netfuse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::RosterMismatch: return "RosterMismatch";
    case ErrorCode::AsymmetricMatrix: return "AsymmetricMatrix";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::HttpError: return "HttpError";
    case ErrorCode::UnknownIssn: return "UnknownIssn";
    case ErrorCode::ZeroAuthors: return "ZeroAuthors";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::EmptyJournal: return "EmptyJournal";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::SampleTooSmall: return "SampleTooSmall";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::DegenerateConditioning: return "DegenerateConditioning";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::StageError: return "StageError";
  }
  return "Unknown";
}

NodeRoster::NodeRoster(std::vector<std::string> ids) : ids_(std::move(ids)) {
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].empty()) {
      throw Error(ErrorCode::InvalidArgument, "empty node id at position " + std::to_string(i));
    }
    if (!index_.emplace(ids_[i], i).second) {
      throw Error(ErrorCode::DuplicateId, "node id '" + ids_[i] + "' appears twice");
    }
  }
}

NodeRoster NodeRoster::sorted(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  return NodeRoster(std::move(ids));
}

std::size_t NodeRoster::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::RosterMismatch, "unknown node id '" + id + "'");
  return it->second;
}

std::ptrdiff_t NodeRoster::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

namespace {

std::string cell(const NodeRoster& r, std::size_t i, std::size_t j) {
  return "(" + r.id(i) + "," + r.id(j) + ")";
}

void check_shape(const NodeRoster& roster, const Dense& m, const std::string& what) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != roster.size()) {
    std::ostringstream os;
    os << what << ": matrix is " << m.rows() << "x" << m.cols() << " but roster has "
       << roster.size() << " ids";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

void check_finite(const NodeRoster& roster, const Dense& m, const std::string& what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j)))
        throw Error(ErrorCode::NonFiniteEntry, what + ": entry " + cell(roster, i, j) + " is not finite");
}

void check_symmetric(const NodeRoster& roster, const Dense& m, double tol, const std::string& what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": entry " << cell(roster, i, j) << " = " << m(i, j) << " but mirror = " << m(j, i);
        throw Error(ErrorCode::AsymmetricMatrix, os.str());
      }
}

SimilarityMatrix::SimilarityMatrix(NodeRoster roster, Dense values)
    : roster_(std::move(roster)), values_(std::move(values)) {
  const std::string what = "similarity matrix";
  check_shape(roster_, values_, what);
  check_finite(roster_, values_, what);
  check_symmetric(roster_, values_, kSymmetryTol, what);
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    if (values_(i, i) != 1.0) {
      std::ostringstream os;
      os.precision(17);
      os << what << ": diagonal entry " << cell(roster_, i, i) << " = " << values_(i, i) << ", expected 1";
      throw Error(ErrorCode::RangeError, os.str());
    }
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double v = values_(i, j);
      if (v < 0.0 || v > 1.0) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": entry " << cell(roster_, i, j) << " = " << v << " outside [0,1]";
        throw Error(ErrorCode::RangeError, os.str());
      }
    }
  }
}

SimilarityMatrix SimilarityMatrix::restrict_to(const NodeRoster& sub) const {
  std::vector<Eigen::Index> idx;
  idx.reserve(sub.size());
  for (const auto& id : sub.ids()) idx.push_back(static_cast<Eigen::Index>(roster_.index_of(id)));
  Dense out(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = values_(idx[a], idx[b]);
  return SimilarityMatrix(sub, std::move(out));
}

CosineMatrix::CosineMatrix(NodeRoster roster, Dense values, std::vector<bool> zero_rows)
    : roster_(std::move(roster)), values_(std::move(values)), zero_rows_(std::move(zero_rows)) {
  const std::string what = "cosine matrix";
  check_shape(roster_, values_, what);
  check_finite(roster_, values_, what);
  check_symmetric(roster_, values_, SimilarityMatrix::kSymmetryTol, what);
  if (zero_rows_.empty()) zero_rows_.assign(roster_.size(), false);
  if (zero_rows_.size() != roster_.size())
    throw Error(ErrorCode::InvalidArgument, what + ": zero-row flags do not match roster size");
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double v = values_(i, j);
      if (v < -1.0 - 1e-12 || v > 1.0 + 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": entry " << cell(roster_, i, j) << " = " << v << " outside [-1,1]";
        throw Error(ErrorCode::RangeError, os.str());
      }
    }
  }
}

Multiplex validate_multiplex(std::vector<NamedLayer> layers) {
  if (layers.empty()) throw Error(ErrorCode::EmptyInput, "multiplex needs at least one layer");
  const NodeRoster& ref = layers.front().matrix.roster();
  for (std::size_t l = 1; l < layers.size(); ++l) {
    const NodeRoster& r = layers[l].matrix.roster();
    if (r == ref) continue;
    std::vector<std::string> mismatched;
    for (const auto& id : r.ids())
      if (!ref.contains(id)) mismatched.push_back(id);
    for (const auto& id : ref.ids())
      if (!r.contains(id)) mismatched.push_back(id);
    std::string msg = "layer " + std::to_string(l) + " ('" + layers[l].name + "') roster differs from layer 0";
    if (mismatched.empty()) {
      msg += ": same ids in a different order";
    } else {
      msg += "; mismatched ids:";
      for (const auto& id : mismatched) msg += " " + id;
    }
    throw Error(ErrorCode::RosterMismatch, msg);
  }
  Multiplex m;
  m.roster_ = ref;
  m.layers_ = std::move(layers);
  return m;
}

Multiplex validate_multiplex(const std::vector<SimilarityMatrix>& layers) {
  std::vector<NamedLayer> named;
  named.reserve(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) named.push_back({"layer" + std::to_string(i), layers[i]});
  return validate_multiplex(std::move(named));
}

}  // namespace netfuse
