#include "netfuse/align.hpp"

#include <set>

namespace netfuse {

std::string_view to_string(AlignMode mode) { return mode == AlignMode::Intersect ? "intersect" : "impute"; }

AlignMode parse_align_mode(std::string_view s) {
  if (s == "intersect") return AlignMode::Intersect;
  if (s == "impute") return AlignMode::Impute;
  throw Error(ErrorCode::InvalidArgument, "unknown alignment mode '" + std::string(s) + "'");
}

std::vector<SimilarityMatrix> intersect(const std::vector<SimilarityMatrix>& periods) {
  if (periods.size() < 2) throw Error(ErrorCode::InvalidArgument, "alignment needs at least two periods");
  std::vector<std::string> common;
  for (const auto& id : periods.front().roster().ids()) {
    bool everywhere = true;
    for (std::size_t t = 1; t < periods.size() && everywhere; ++t) everywhere = periods[t].roster().contains(id);
    if (everywhere) common.push_back(id);
  }
  if (common.empty()) throw Error(ErrorCode::EmptyIntersection, "no journal is present in every period");
  const NodeRoster roster = NodeRoster::sorted(std::move(common));
  std::vector<SimilarityMatrix> out;
  out.reserve(periods.size());
  for (const auto& p : periods) out.push_back(p.restrict_to(roster));
  return out;
}

std::vector<SimilarityMatrix> impute(const std::vector<SimilarityMatrix>& periods) {
  if (periods.size() < 2) throw Error(ErrorCode::InvalidArgument, "imputation needs at least two periods");
  std::set<std::string> all;
  for (const auto& p : periods) all.insert(p.roster().ids().begin(), p.roster().ids().end());
  const NodeRoster roster(std::vector<std::string>(all.begin(), all.end()));
  const std::size_t n = roster.size();
  const std::size_t periods_n = periods.size();

  // pos[t][i]: index of union node i in period t, or -1
  std::vector<std::vector<std::ptrdiff_t>> pos(periods_n, std::vector<std::ptrdiff_t>(n));
  for (std::size_t t = 0; t < periods_n; ++t)
    for (std::size_t i = 0; i < n; ++i) pos[t][i] = periods[t].roster().find(roster.id(i));

  const auto both = [&](std::size_t t, std::size_t i, std::size_t j) { return pos[t][i] >= 0 && pos[t][j] >= 0; };
  const auto value = [&](std::size_t t, std::size_t i, std::size_t j) { return periods[t](pos[t][i], pos[t][j]); };

  std::vector<SimilarityMatrix> out;
  out.reserve(periods_n);
  for (std::size_t t = 0; t < periods_n; ++t) {
    Dense m = Dense::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double v = 0.0;
        if (both(t, i, j)) {
          v = value(t, i, j);
        } else {
          std::ptrdiff_t earlier = -1;
          for (std::ptrdiff_t s = static_cast<std::ptrdiff_t>(t) - 1; s >= 0 && earlier < 0; --s)
            if (both(static_cast<std::size_t>(s), i, j)) earlier = s;
          std::ptrdiff_t later = -1;
          for (std::size_t s = t + 1; s < periods_n && later < 0; ++s)
            if (both(s, i, j)) later = static_cast<std::ptrdiff_t>(s);
          if (earlier >= 0 && later >= 0)
            v = 0.5 * (value(static_cast<std::size_t>(earlier), i, j) + value(static_cast<std::size_t>(later), i, j));
        }
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
    out.emplace_back(roster, std::move(m));
  }
  return out;
}

std::vector<SimilarityMatrix> align(const std::vector<SimilarityMatrix>& periods, AlignMode mode) {
  return mode == AlignMode::Intersect ? intersect(periods) : impute(periods);
}

}  // namespace netfuse
