#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netfuse/core_model.hpp"
#include "netfuse/rng.hpp"

namespace netfuse {

// Block-structured similarity: within-block entries uniform in
// [within_lo, within_hi], between-block in [between_lo, between_hi].
struct BlockSpec {
  double within_lo = 0.6;
  double within_hi = 0.9;
  double between_lo = 0.0;
  double between_hi = 0.3;
};

SimilarityMatrix planted_similarity(const NodeRoster& roster, const std::vector<int>& block, const BlockSpec& spec,
                                    PortableRng& rng);

// Multi-period bibliographic corpus with planted fields, for demos and tests.
struct CorpusSpec {
  int journals = 120;
  int fields = 4;
  std::vector<std::string> periods{"2006", "2012", "2019"};
  double churn = 0.1;            // share of journals entering or leaving between periods
  double gap = 0.05;             // share active in the first and last period only
  int editors_per_journal = 8;
  int works_per_journal = 12;
  int authors_per_work = 3;
  int refs_per_work = 6;
  int docs_per_journal = 5;
  int embedding_dim = 16;
  double cross_field = 0.15;     // probability an entity is drawn from another field
  std::uint64_t seed = 20240601;
  // pipeline settings written into run.json
  int snf_k = 20;
  int consensus_runs = 1000;
};

struct CorpusLayout {
  std::filesystem::path config;  // run.json
  std::vector<int> field;        // planted field of journal i (ids "J0000"...)
  std::vector<std::vector<bool>> active;  // [period][journal]
};

std::string synthetic_journal_id(int i);
CorpusLayout write_synthetic_corpus(const CorpusSpec& spec, const std::filesystem::path& dir);

}  // namespace netfuse
