#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "netfuse/core_model.hpp"

namespace netfuse {

// n samples (rows) x p features. `name` labels the matrix in reports.
struct SampleMatrix {
  NodeRoster rows;
  Dense values;
  std::string name;

  SampleMatrix(NodeRoster rows, Dense values, std::string name = {});
  // Rows labelled "0".."n-1".
  static SampleMatrix unlabeled(Dense values, std::string name = {});
  // Each row of the similarity matrix is one sample's feature vector.
  static SampleMatrix from_similarity(const SimilarityMatrix& s, std::string name = {});

  std::size_t n() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

// Symmetric, zero diagonal.
struct DistanceMatrix {
  Dense values;
  std::size_t n() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

enum class DcorKind { Dcor, DcorStar, Pdcor };
std::string_view to_string(DcorKind kind);

struct DcorReport {
  double value = 0.0;
  DcorKind kind = DcorKind::Dcor;
  std::vector<std::string> conditioned_on;
};

DistanceMatrix rows_to_distance(const SampleMatrix& m);
// d(i,j) = 1 - s(i,j); the "--as distance" reading of a similarity matrix.
DistanceMatrix distance_from_similarity(const SimilarityMatrix& s);

Dense double_center(const DistanceMatrix& d);
// U-centred matrix (zero diagonal); requires n >= 4.
Dense u_center(const DistanceMatrix& d);
// (A . B) = sum_{i != j} A_ij B_ij / (n (n - 3))
double u_inner(const Dense& a, const Dense& b);

// Székely-Rizzo-Bakirov distance correlation, in [0,1].
double dcor(const DistanceMatrix& x, const DistanceMatrix& y);
DcorReport dcor(const SampleMatrix& x, const SampleMatrix& y);

// Bias-corrected distance correlation R*; can be slightly negative.
double dcor_star(const DistanceMatrix& x, const DistanceMatrix& y);
DcorReport dcor_star(const SampleMatrix& x, const SampleMatrix& y);

// Matrix of pairwise R* over the given distance matrices (U-centring done once each).
Dense dcor_star_matrix(const std::vector<const DistanceMatrix*>& ds);

// Partial correlation recursion on a matrix of R* values: conditions a and b
// on `given` (indices into r), eliminating the last conditioner first so that
// R(a,b | g1..gm) is built from quantities conditioned on g1..g(m-1).
double partial_from_correlations(const Dense& r, std::size_t a, std::size_t b, const std::vector<std::size_t>& given);

double pdcor(const DistanceMatrix& x, const DistanceMatrix& y, const DistanceMatrix& z);
DcorReport pdcor(const SampleMatrix& x, const SampleMatrix& y, const SampleMatrix& z);

double pdcor_multi(const DistanceMatrix& x, const DistanceMatrix& y, const std::vector<const DistanceMatrix*>& given);
DcorReport pdcor_multi(const SampleMatrix& x, const SampleMatrix& y, const std::vector<SampleMatrix>& given);

}  // namespace netfuse
