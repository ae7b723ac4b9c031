#include "netfuse/synth.hpp"

#include <cstdio>

#include "json.hpp"
#include "netfuse/ingest.hpp"
#include "netfuse/matrix_io.hpp"

namespace netfuse {

SimilarityMatrix planted_similarity(const NodeRoster& roster, const std::vector<int>& block, const BlockSpec& spec,
                                    PortableRng& rng) {
  const auto n = static_cast<Eigen::Index>(roster.size());
  if (block.size() != roster.size()) throw Error(ErrorCode::InvalidArgument, "block labels do not match roster");
  Dense m = Dense::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool same = block[static_cast<std::size_t>(i)] == block[static_cast<std::size_t>(j)];
      const double lo = same ? spec.within_lo : spec.between_lo;
      const double hi = same ? spec.within_hi : spec.between_hi;
      const double v = lo + (hi - lo) * rng.uniform01();
      m(i, j) = v;
      m(j, i) = v;
    }
  return SimilarityMatrix(roster, std::move(m));
}

std::string synthetic_journal_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "J%04d", i);
  return buf;
}

namespace {

std::string entity(const char* prefix, int field, int k) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%d_%04d", prefix, field, k);
  return buf;
}

}  // namespace

CorpusLayout write_synthetic_corpus(const CorpusSpec& spec, const std::filesystem::path& dir) {
  if (spec.journals < 4 || spec.fields < 1 || spec.periods.empty())
    throw Error(ErrorCode::InvalidArgument, "synthetic corpus needs >= 4 journals, >= 1 field, >= 1 period");
  PortableRng rng(spec.seed);
  const int n = spec.journals;
  const auto periods = static_cast<int>(spec.periods.size());
  CorpusLayout layout;
  layout.field.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) layout.field[static_cast<std::size_t>(j)] = j % spec.fields;

  // activity windows: most journals span all periods; some start late, end
  // early, or skip the middle period
  layout.active.assign(static_cast<std::size_t>(periods), std::vector<bool>(static_cast<std::size_t>(n), true));
  for (int j = 0; j < n; ++j) {
    const double u = rng.uniform01();
    if (periods >= 2 && u < spec.churn / 2) {
      layout.active[0][static_cast<std::size_t>(j)] = false;  // enters later
    } else if (periods >= 2 && u < spec.churn) {
      layout.active[static_cast<std::size_t>(periods - 1)][static_cast<std::size_t>(j)] = false;  // leaves
    } else if (periods >= 3 && u < spec.churn + spec.gap) {
      layout.active[1][static_cast<std::size_t>(j)] = false;  // missing middle
    }
  }

  const int editor_pool = std::max(4, spec.editors_per_journal * n / spec.fields / 2);
  const int author_pool = std::max(8, spec.works_per_journal * spec.authors_per_work * n / spec.fields / 3);
  const int ref_pool = std::max(8, spec.works_per_journal * spec.refs_per_work * n / spec.fields / 4);
  const auto pick_field = [&](int own) {
    return rng.uniform01() < spec.cross_field ? static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.fields)))
                                              : own;
  };

  std::vector<Eigen::VectorXd> centroid;
  for (int f = 0; f < spec.fields; ++f) {
    Eigen::VectorXd c(spec.embedding_dim);
    for (int d = 0; d < spec.embedding_dim; ++d) c(d) = rng.normal();
    centroid.push_back(c.normalized());
  }

  nlohmann::json config;
  config["seed"] = 7;
  config["periods"] = nlohmann::json::array();
  std::filesystem::create_directories(dir);
  int work_counter = 0;
  for (int t = 0; t < periods; ++t) {
    const std::string& name = spec.periods[static_cast<std::size_t>(t)];
    std::string works, editors = "journal_id,editor_id\n", embeddings;
    for (int j = 0; j < n; ++j) {
      if (!layout.active[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)]) continue;
      const std::string jid = synthetic_journal_id(j);
      const int own = layout.field[static_cast<std::size_t>(j)];
      for (int e = 0; e < spec.editors_per_journal; ++e) {
        const int f = pick_field(own);
        editors += jid + "," + entity("E", f, static_cast<int>(rng.below(static_cast<std::uint64_t>(editor_pool)))) + "\n";
      }
      for (int w = 0; w < spec.works_per_journal; ++w) {
        std::vector<std::string> authors, refs;
        const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.authors_per_work)));
        for (int a = 0; a < m; ++a)
          authors.push_back(entity("A", pick_field(own), static_cast<int>(rng.below(static_cast<std::uint64_t>(author_pool)))));
        const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.refs_per_work + 1)));
        for (int k = 0; k < r; ++k)
          refs.push_back(entity("R", pick_field(own), static_cast<int>(rng.below(static_cast<std::uint64_t>(ref_pool)))));
        // a few editorials that the filter must drop
        const std::string type = rng.uniform01() < 0.05 ? "editorial" : "article";
        char wid[32];
        std::snprintf(wid, sizeof wid, "W%07d", work_counter++);
        works += format_work_jsonl(make_work(wid, jid, std::move(authors), std::move(refs), type)) + "\n";
      }
      for (int d = 0; d < spec.docs_per_journal; ++d) {
        nlohmann::json line;
        line["journal"] = jid;
        line["doc"] = jid + "-d" + std::to_string(d);
        std::vector<double> vec(static_cast<std::size_t>(spec.embedding_dim));
        const auto& c = centroid[static_cast<std::size_t>(own)];
        for (int k = 0; k < spec.embedding_dim; ++k) vec[static_cast<std::size_t>(k)] = c(k) + 0.35 * rng.normal();
        line["vec"] = vec;
        embeddings += line.dump() + "\n";
      }
    }
    write_file(dir / name / "works.jsonl", works);
    write_file(dir / name / "editors.csv", editors);
    write_file(dir / name / "embeddings.jsonl", embeddings);
    config["periods"].push_back({{"name", name},
                                 {"works", name + "/works.jsonl"},
                                 {"editors", name + "/editors.csv"},
                                 {"embeddings", name + "/embeddings.jsonl"}});
  }
  config["layers"] = {{"zero_row", "drop"}, {"raw_cosine", false}};
  config["snf"] = {{"k", spec.snf_k}, {"alpha", 0.5}, {"iters", 20}, {"mode", "kernel"}};
  config["louvain"] = {{"best_of", 1}, {"resolution", 1.0}};
  config["consensus"] = {{"runs", spec.consensus_runs}, {"threshold", 0.8}, {"denominator", "exposure"}};
  config["alignment"] = "impute";
  config["aggregate"] = {{"top_frac", 0.1}, {"format", "graphml"}};
  config["gdc"] = {{"representation", "rows"}};
  layout.config = dir / "run.json";
  write_file(layout.config, config.dump(2) + "\n");
  return layout;
}

}  // namespace netfuse
