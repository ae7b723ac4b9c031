#pragma once

#include <string_view>
#include <vector>

#include "netfuse/core_model.hpp"

namespace netfuse {

enum class AlignMode { Intersect, Impute };
std::string_view to_string(AlignMode mode);
AlignMode parse_align_mode(std::string_view s);

// Restricts every period to the journals present in all of them (lexicographic order).
std::vector<SimilarityMatrix> intersect(const std::vector<SimilarityMatrix>& periods);

// Expands every period to the union roster. Entries involving a journal
// missing in period t are the mean of the nearest earlier and later periods
// in which both journals exist, or 0 when no such flanking pair exists.
std::vector<SimilarityMatrix> impute(const std::vector<SimilarityMatrix>& periods);

std::vector<SimilarityMatrix> align(const std::vector<SimilarityMatrix>& periods, AlignMode mode);

}  // namespace netfuse
