#include "netfuse/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <set>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "netfuse/checksum.hpp"
#include "netfuse/community.hpp"
#include "netfuse/depstats.hpp"
#include "netfuse/ingest.hpp"
#include "netfuse/matrix_io.hpp"
#include "netfuse/parallel.hpp"
#include "netfuse/rng.hpp"

namespace netfuse {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::uint64_t kConsensusTag = 0xC0;
constexpr std::uint64_t kLayerLouvainTag = 0x100;

fs::path resolve(const PipelineConfig& c, const fs::path& p) { return p.is_absolute() ? p : c.base_dir / p; }

std::string extension(GraphFormat f) {
  switch (f) {
    case GraphFormat::GraphML: return ".graphml";
    case GraphFormat::Gexf: return ".gexf";
    case GraphFormat::Csv: return ".csv";
  }
  return ".txt";
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Collects one stage's artifacts. Files are written with a ".partial" suffix
// and only renamed into place by commit(), so a failed stage leaves its
// partial outputs behind for inspection.
class Stage {
 public:
  Stage(std::string name, fs::path out_dir) : out_dir_(std::move(out_dir)) { record_.name = std::move(name); }

  void input(const std::string& key, const std::string& sha) { record_.inputs[key] = sha; }

  void uses(const StageRecord& earlier) {
    for (const auto& [path, sha] : earlier.outputs) record_.inputs[path] = sha;
  }

  void write(const std::string& rel, const std::string& data) {
    write_file(out_dir_ / (rel + ".partial"), data);
    record_.outputs[rel] = sha256_hex(data);
    pending_.push_back(rel);
  }

  StageRecord commit() {
    for (const auto& rel : pending_) fs::rename(out_dir_ / (rel + ".partial"), out_dir_ / rel);
    pending_.clear();
    return record_;
  }

  const std::string& name() const { return record_.name; }

 private:
  fs::path out_dir_;
  StageRecord record_;
  std::vector<std::string> pending_;
};

template <typename Fn>
StageRecord run_stage(const std::string& name, const fs::path& out_dir, Fn&& fn) {
  spdlog::info("stage {}: start", name);
  const auto start = std::chrono::steady_clock::now();
  Stage stage(name, out_dir);
  try {
    fn(stage);
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
  StageRecord r = stage.commit();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  spdlog::info("stage {}: done in {:.2f}s", name, r.seconds);
  return r;
}

std::string layer_name(std::size_t i) {
  return i < 4 ? std::string(to_string(kAllLayerKinds[i])) : std::string("fused");
}

struct PeriodData {
  std::vector<WorkRecord> works;
  std::vector<std::pair<std::string, std::string>> editor_pairs;
  EmbeddingSet embeddings;
  std::size_t works_read = 0;
  std::size_t authorless = 0;
  std::vector<SimilarityMatrix> layers;  // editors, authors, references, abstracts on a common roster
  std::optional<SimilarityMatrix> fused;
};

std::string chain_step(const std::string& previous, const StageRecord& s) {
  json j;
  j["name"] = s.name;
  j["inputs"] = s.inputs;
  j["outputs"] = s.outputs;
  return sha256_hex(previous + "\n" + j.dump());
}

}  // namespace

void PipelineConfig::validate() const {
  if (periods.empty()) throw Error(ErrorCode::InvalidArgument, "config lists no periods");
  std::set<std::string> names;
  for (const auto& p : periods) {
    if (p.name.empty() || p.name.find_first_of("/\\") != std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "invalid period name '" + p.name + "'");
    if (!names.insert(p.name).second) throw Error(ErrorCode::InvalidArgument, "duplicate period '" + p.name + "'");
  }
  if (snf.k < 1 || snf.iters < 1 || !(snf.alpha > 0))
    throw Error(ErrorCode::InvalidArgument, "snf needs k >= 1, iters >= 1, alpha > 0");
  if (runs < 1) throw Error(ErrorCode::InvalidArgument, "consensus runs must be >= 1");
  if (!(threshold > 0 && threshold <= 1)) throw Error(ErrorCode::InvalidArgument, "threshold must be in (0,1]");
  if (!(top_fraction > 0 && top_fraction <= 1)) throw Error(ErrorCode::InvalidArgument, "top_frac must be in (0,1]");
  if (louvain_best_of < 1) throw Error(ErrorCode::InvalidArgument, "louvain best_of must be >= 1");
  if (!(resolution > 0)) throw Error(ErrorCode::InvalidArgument, "resolution must be > 0");
  for (const auto& p : periods)
    for (const auto& f : {p.works, p.editors, p.embeddings}) {
      const fs::path full = resolve(*this, f);
      if (!fs::is_regular_file(full))
        throw StageError("ingest", "period " + p.name + ": missing input file " + full.string());
    }
}

PipelineConfig parse_pipeline_config(std::string_view text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  PipelineConfig c;
  c.base_dir = base_dir;
  try {
    for (const auto& p : j.at("periods"))
      c.periods.push_back({p.at("name").get<std::string>(), p.at("works").get<std::string>(),
                           p.at("editors").get<std::string>(), p.at("embeddings").get<std::string>()});
    c.seed = j.value("seed", c.seed);
    if (j.contains("layers")) {
      const auto& l = j["layers"];
      c.layers.zero_row = parse_zero_row_policy(l.value("zero_row", std::string("drop")));
      c.layers.raw_cosine = l.value("raw_cosine", false);
    }
    if (j.contains("snf")) {
      const auto& s = j["snf"];
      c.snf.k = s.value("k", c.snf.k);
      c.snf.alpha = s.value("alpha", c.snf.alpha);
      c.snf.iters = s.value("iters", c.snf.iters);
      c.snf.mode = parse_snf_mode(s.value("mode", std::string("kernel")));
    }
    if (j.contains("louvain")) {
      c.louvain_best_of = j["louvain"].value("best_of", c.louvain_best_of);
      c.resolution = j["louvain"].value("resolution", c.resolution);
    }
    if (j.contains("consensus")) {
      const auto& s = j["consensus"];
      c.runs = s.value("runs", c.runs);
      c.threshold = s.value("threshold", c.threshold);
      c.denominator = parse_denominator(s.value("denominator", std::string("exposure")));
    }
    if (j.contains("alignment")) c.alignment = parse_align_mode(j["alignment"].get<std::string>());
    if (j.contains("aggregate")) {
      c.top_fraction = j["aggregate"].value("top_frac", c.top_fraction);
      c.format = parse_graph_format(j["aggregate"].value("format", std::string("graphml")));
    }
    if (j.contains("gdc")) c.gdc_as_distance = j["gdc"].value("representation", std::string("rows")) == "distance";
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  return parse_pipeline_config(read_file(path), path.parent_path());
}

std::string format_pipeline_config(const PipelineConfig& c) {
  json j;
  j["periods"] = json::array();
  for (const auto& p : c.periods)
    j["periods"].push_back({{"name", p.name},
                            {"works", p.works.generic_string()},
                            {"editors", p.editors.generic_string()},
                            {"embeddings", p.embeddings.generic_string()}});
  j["seed"] = c.seed;
  j["layers"] = {{"zero_row", c.layers.zero_row == ZeroRowPolicy::Drop   ? "drop"
                              : c.layers.zero_row == ZeroRowPolicy::Zero ? "zero"
                                                                         : "error"},
                 {"raw_cosine", c.layers.raw_cosine}};
  j["snf"] = {{"k", c.snf.k}, {"alpha", c.snf.alpha}, {"iters", c.snf.iters}, {"mode", to_string(c.snf.mode)}};
  j["louvain"] = {{"best_of", c.louvain_best_of}, {"resolution", c.resolution}};
  j["consensus"] = {{"runs", c.runs}, {"threshold", c.threshold}, {"denominator", to_string(c.denominator)}};
  j["alignment"] = to_string(c.alignment);
  j["aggregate"] = {{"top_frac", c.top_fraction}, {"format", to_string(c.format)}};
  j["gdc"] = {{"representation", c.gdc_as_distance ? "distance" : "rows"}};
  return j.dump(2) + "\n";
}

std::string RunManifest::to_json() const {
  json j;
  j["tool"] = "netfuse";
  j["version"] = tool_version;
  j["prng"] = prng;
  j["config_sha256"] = config_sha256;
  j["seeds"] = seeds;
  j["stages"] = json::array();
  for (const auto& s : stages)
    j["stages"].push_back({{"name", s.name}, {"inputs", s.inputs}, {"outputs", s.outputs}, {"chain", s.chain}});
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    m.tool_version = j.at("version").get<std::string>();
    m.prng = j.at("prng").get<std::string>();
    m.config_sha256 = j.at("config_sha256").get<std::string>();
    m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    for (const auto& s : j.at("stages")) {
      StageRecord r;
      r.name = s.at("name").get<std::string>();
      r.inputs = s.at("inputs").get<std::map<std::string, std::string>>();
      r.outputs = s.at("outputs").get<std::map<std::string, std::string>>();
      r.chain = s.at("chain").get<std::string>();
      m.stages.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("manifest: ") + e.what());
  }
  return m;
}

RunManifest run_pipeline(const PipelineConfig& config, const fs::path& out_dir, const PipelineOptions& opts) {
  config.validate();
  const int jobs = std::max(1, opts.jobs);
  const std::size_t np = config.periods.size();
  std::vector<PeriodData> data(np);

  RunManifest manifest;
  manifest.tool_version = std::string(kToolVersion);
  manifest.prng = std::string(kPrngAlgorithm);
  const std::string config_text = format_pipeline_config(config);
  manifest.config_sha256 = sha256_hex(config_text);
  manifest.seeds["master"] = config.seed;
  const std::uint64_t consensus_seed = derive_seed(config.seed, kConsensusTag, 0);
  manifest.seeds["consensus"] = consensus_seed;
  const auto louvain_seed = [&](std::size_t period, std::size_t layer) {
    return derive_seed(config.seed, kLayerLouvainTag + period, layer);
  };
  for (std::size_t t = 0; t < np; ++t)
    for (std::size_t l = 0; l < 5; ++l)
      manifest.seeds["louvain/" + config.periods[t].name + "/" + layer_name(l)] = louvain_seed(t, l);
  fs::create_directories(out_dir);
  // a manifest left by an earlier run must not vouch for this one
  fs::remove(out_dir / "manifest.json");
  fs::remove(out_dir / "timings.json");

  // ingest
  manifest.stages.push_back(run_stage("ingest", out_dir, [&](Stage& st) {
    st.write("config.json", config_text);
    for (std::size_t t = 0; t < np; ++t) {
      const auto& p = config.periods[t];
      for (const auto& f : {p.works, p.editors, p.embeddings}) st.input(f.generic_string(), sha256_file(resolve(config, f)));
    }
    std::vector<std::string> summaries(np);
    parallel_for(np, jobs, [&](std::size_t t, std::size_t) {
      const auto& p = config.periods[t];
      PeriodData& d = data[t];
      const auto all = parse_works_jsonl(read_file(resolve(config, p.works)), p.works.string());
      d.works_read = all.size();
      d.works = filter_works(all);
      d.editor_pairs = parse_editor_pairs_csv(read_file(resolve(config, p.editors)), p.editors.string());
      d.embeddings = parse_embeddings_jsonl(read_file(resolve(config, p.embeddings)), p.embeddings.string());
      std::size_t docs = 0;
      for (const auto& [j, v] : d.embeddings.journals) docs += v.size();
      std::set<std::string> journals, editors, authors, refs;
      for (const auto& [j, e] : d.editor_pairs) {
        journals.insert(j);
        editors.insert(e);
      }
      for (const auto& w : d.works) {
        journals.insert(w.journal);
        authors.insert(w.authors.begin(), w.authors.end());
        refs.insert(w.references.begin(), w.references.end());
        if (w.authors.empty()) ++d.authorless;
      }
      json s;
      s["period"] = p.name;
      s["works_read"] = d.works_read;
      s["works_kept"] = d.works.size();
      s["works_without_authors"] = d.authorless;
      s["journals"] = journals.size();
      s["editors"] = editors.size();
      s["authors"] = authors.size();
      s["references"] = refs.size();
      s["abstracts"] = docs;
      s["embedding_dim"] = d.embeddings.dim;
      summaries[t] = s.dump(2) + "\n";
    });
    for (std::size_t t = 0; t < np; ++t) st.write("ingest/" + config.periods[t].name + "/summary.json", summaries[t]);
  }));

  // layers
  manifest.stages.push_back(run_stage("layers", out_dir, [&](Stage& st) {
    st.uses(manifest.stages.back());
    std::vector<std::map<std::string, std::string>> files(np);
    parallel_for(np, jobs, [&](std::size_t t, std::size_t) {
      const std::string& name = config.periods[t].name;
      PeriodData& d = data[t];
      std::vector<WorkRecord> with_authors;
      for (const auto& w : d.works)
        if (!w.authors.empty()) with_authors.push_back(w);
      if (d.authorless) spdlog::warn("period {}: {} works without authors left out of the authors layer", name, d.authorless);
      const IncidenceMatrix incidence[] = {build_editor_incidence(d.editor_pairs), build_author_incidence(with_authors),
                                           build_reference_incidence(d.works)};
      std::vector<SimilarityMatrix> built;
      json info;
      for (std::size_t l = 0; l < 3; ++l) {
        files[t]["ingest/" + name + "/" + layer_name(l) + "_incidence.csv"] = format_incidence_csv(incidence[l]);
        BuiltLayer b = layer_from_incidence(incidence[l], config.layers);
        info[layer_name(l)]["dropped_zero_rows"] = b.dropped;
        built.push_back(std::move(b.matrix));
      }
      built.push_back(abstract_layer(d.embeddings));
      // the multiplex needs one roster: keep journals present in every layer
      std::vector<std::string> common;
      for (const auto& id : built[0].roster().ids())
        if (std::all_of(built.begin() + 1, built.end(), [&](const SimilarityMatrix& m) { return m.roster().contains(id); }))
          common.push_back(id);
      const NodeRoster roster = NodeRoster::sorted(common);
      if (roster.size() < 2) throw Error(ErrorCode::EmptyInput, "period " + name + ": fewer than 2 journals in all layers");
      for (std::size_t l = 0; l < 4; ++l) {
        std::vector<std::string> excluded;
        for (const auto& id : built[l].roster().ids())
          if (!roster.contains(id)) excluded.push_back(id);
        info[layer_name(l)]["journals"] = built[l].roster().size();
        info[layer_name(l)]["not_in_all_layers"] = excluded;
        d.layers.push_back(built[l].restrict_to(roster));
        files[t]["layers/" + name + "/" + layer_name(l) + ".csv"] =
            format_matrix_csv(roster, d.layers.back().values(), true);
      }
      info["roster_size"] = roster.size();
      files[t]["layers/" + name + "/roster.json"] = info.dump(2) + "\n";
      if (roster.size() < common.size()) spdlog::warn("period {}: roster trimmed", name);
      spdlog::info("period {}: {} journals in the multiplex", name, roster.size());
    });
    for (const auto& f : files)
      for (const auto& [rel, text] : f) st.write(rel, text);
  }));

  // fuse
  manifest.stages.push_back(run_stage("fuse", out_dir, [&](Stage& st) {
    st.uses(manifest.stages.back());
    parallel_for(np, jobs, [&](std::size_t t, std::size_t) {
      std::vector<NamedLayer> named;
      for (std::size_t l = 0; l < 4; ++l) named.push_back({layer_name(l), data[t].layers[l]});
      const Multiplex m = validate_multiplex(std::move(named));
      data[t].fused = fuse(m, config.snf);
    });
    for (std::size_t t = 0; t < np; ++t)
      st.write("fused/" + config.periods[t].name + ".csv",
               format_matrix_csv(data[t].fused->roster(), data[t].fused->values(), true));
  }));

  const auto gdc_input = [&](const SimilarityMatrix& s) {
    return config.gdc_as_distance ? distance_from_similarity(s) : rows_to_distance(SampleMatrix::from_similarity(s));
  };

  // stats: GDC among layers, per-layer communities, fused-vs-layer GDC and PDC
  manifest.stages.push_back(run_stage("stats", out_dir, [&](Stage& st) {
    st.uses(manifest.stages[manifest.stages.size() - 2]);
    st.uses(manifest.stages.back());
    std::vector<std::map<std::string, std::string>> files(np);
    parallel_for(np, jobs, [&](std::size_t t, std::size_t) {
      const std::string& name = config.periods[t].name;
      std::vector<const SimilarityMatrix*> mats;
      for (const auto& l : data[t].layers) mats.push_back(&l);
      mats.push_back(&*data[t].fused);
      std::vector<DistanceMatrix> dist;
      for (const auto* m : mats) dist.push_back(gdc_input(*m));
      json r;
      r["period"] = name;
      r["journals"] = mats[0]->size();
      r["gdc_representation"] = config.gdc_as_distance ? "distance" : "rows";
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
          r["gdc_layers"][layer_name(a)][layer_name(b)] = a == b ? 1.0 : dcor(dist[a], dist[b]);
      for (std::size_t l = 0; l < 4; ++l) {
        r["gdc_fused_layer"][layer_name(l)] = dcor(dist[4], dist[l]);
        std::vector<const DistanceMatrix*> given;
        json names = json::array();
        for (std::size_t o = 0; o < 4; ++o)
          if (o != l) {
            given.push_back(&dist[o]);
            names.push_back(layer_name(o));
          }
        try {
          r["pdc_fused_layer"][layer_name(l)] = {{"value", pdcor_multi(dist[4], dist[l], given)}, {"conditioned_on", names}};
        } catch (const Error& e) {
          r["pdc_fused_layer"][layer_name(l)] = {{"value", nullptr}, {"conditioned_on", names}, {"error", e.what()}};
        }
      }
      LouvainOptions lo;
      lo.resolution = config.resolution;
      for (std::size_t l = 0; l < 5; ++l) {
        const WeightedGraph g = graph_from_similarity(*mats[l]);
        const Partition p = louvain_best_of(g, louvain_seed(t, l), config.louvain_best_of, lo);
        r["communities"][layer_name(l)] = {{"count", p.communities()}, {"modularity", p.modularity}};
        files[t]["stats/" + name + "/" + layer_name(l) + "_partition.csv"] =
            format_partition_csv(mats[l]->roster(), p.assignment);
      }
      files[t]["stats/" + name + "/report.json"] = r.dump(2) + "\n";
    });
    for (const auto& f : files)
      for (const auto& [rel, text] : f) st.write(rel, text);
  }));

  // consensus over the fused matrices of all periods
  ConsensusResult result;
  manifest.stages.push_back(run_stage("consensus", out_dir, [&](Stage& st) {
    for (const auto& [path, sha] : manifest.stages[2].outputs) st.input(path, sha);
    std::vector<SimilarityMatrix> fused;
    for (const auto& d : data) fused.push_back(*d.fused);
    EnsembleOptions eo;
    eo.denominator = config.denominator;
    eo.jobs = jobs;
    eo.louvain.resolution = config.resolution;
    const CooccurrenceGraph c = run_ensemble(fused, config.runs, consensus_seed, eo);
    const WeightedGraph g = threshold_graph(c, config.threshold);
    result = final_partition(g, final_seed(consensus_seed), eo.louvain);
    result.threshold = config.threshold;
    result.runs_per_matrix = config.runs;

    st.write("consensus/communities.csv", format_partition_csv(result.members, result.partition.assignment));
    std::string iso;
    for (const auto& id : result.isolates) iso += id + "\n";
    st.write("consensus/isolates.txt", iso);
    st.write("consensus/coocc.csv", format_cooccurrence_csv(c));

    std::vector<ExportNode> nodes;
    for (std::size_t i = 0; i < c.size(); ++i) {
      ExportNode n;
      n.id = n.label = c.roster().id(i);
      const auto k = result.members.find(n.id);
      n.isolate = k < 0;
      if (k >= 0) n.community = result.partition.assignment[static_cast<std::size_t>(k)];
      nodes.push_back(std::move(n));
    }
    std::vector<ExportEdge> edges;
    for (const auto& e : g.edges()) edges.push_back({g.roster().id(e.i), g.roster().id(e.j), e.weight});
    st.write("consensus/graph" + extension(config.format), format_graph(nodes, edges, config.format));

    json s;
    s["journals"] = c.size();
    s["members"] = result.members.size();
    s["isolates"] = result.isolates.size();
    s["communities"] = result.partition.communities();
    s["modularity"] = result.partition.modularity;
    s["threshold"] = config.threshold;
    s["runs_per_matrix"] = config.runs;
    s["denominator"] = to_string(config.denominator);
    s["classified_share"] = c.size() ? static_cast<double>(result.members.size()) / static_cast<double>(c.size()) : 0.0;
    st.write("consensus/summary.json", s.dump(2) + "\n");
  }));

  // align fused matrices across periods and compare them
  std::vector<SimilarityMatrix> aligned;
  manifest.stages.push_back(run_stage("align", out_dir, [&](Stage& st) {
    for (const auto& [path, sha] : manifest.stages[2].outputs) st.input(path, sha);
    std::vector<SimilarityMatrix> fused;
    for (const auto& d : data) fused.push_back(*d.fused);
    json r;
    for (const AlignMode mode : {AlignMode::Intersect, AlignMode::Impute}) {
      const std::string key(to_string(mode));
      try {
        std::vector<SimilarityMatrix> a = align(fused, mode);
        r[key]["journals"] = a[0].size();
        std::vector<DistanceMatrix> dist;
        for (const auto& m : a) dist.push_back(gdc_input(m));
        for (std::size_t x = 0; x < np; ++x)
          for (std::size_t y = x + 1; y < np; ++y)
            r[key]["gdc"].push_back({{"a", config.periods[x].name},
                                     {"b", config.periods[y].name},
                                     {"value", number_or_null(a[0].size() >= 2 ? dcor(dist[x], dist[y]) : NAN)}});
        if (mode == config.alignment) aligned = std::move(a);
      } catch (const Error& e) {
        if (mode == config.alignment) throw;
        r[key]["error"] = e.what();
      }
    }
    st.write("reports/intertemporal.json", r.dump(2) + "\n");
    for (std::size_t t = 0; t < np; ++t)
      st.write("aligned/" + std::string(to_string(config.alignment)) + "/" + config.periods[t].name + ".csv",
               format_matrix_csv(aligned[t].roster(), aligned[t].values(), true));
  }));

  // aggregate: group-level networks per period and layer, per-community PDC
  manifest.stages.push_back(run_stage("aggregate", out_dir, [&](Stage& st) {
    st.uses(manifest.stages[1]);
    st.uses(manifest.stages[2]);
    st.uses(manifest.stages[4]);
    st.uses(manifest.stages[5]);
    std::map<std::string, int> community;
    for (std::size_t i = 0; i < result.members.size(); ++i)
      community[result.members.id(i)] = result.partition.assignment[i];

    const auto group_network = [&](const SimilarityMatrix& s) {
      std::vector<std::string> ids;
      std::vector<int> assignment;
      for (const auto& id : s.roster().ids())
        if (auto it = community.find(id); it != community.end()) {
          ids.push_back(id);
          assignment.push_back(it->second);
        }
      std::vector<ExportNode> nodes;
      std::vector<ExportEdge> edges;
      if (ids.empty()) return format_graph(nodes, edges, config.format);
      const GroupMatrix gm = shrink(s, NodeRoster(ids), assignment);
      group_graph(gm, top_edges(gm, config.top_fraction), nodes, edges);
      return format_graph(nodes, edges, config.format);
    };

    std::vector<std::map<std::string, std::string>> files(np);
    std::vector<json> pdc(np);
    parallel_for(np, jobs, [&](std::size_t t, std::size_t) {
      const std::string& name = config.periods[t].name;
      for (std::size_t l = 0; l < 4; ++l)
        files[t]["aggregate/" + name + "/" + layer_name(l) + extension(config.format)] = group_network(data[t].layers[l]);
      files[t]["aggregate/" + name + "/fused" + extension(config.format)] = group_network(*data[t].fused);

      const NodeRoster& roster = data[t].fused->roster();
      std::map<int, std::vector<std::string>> present;
      for (const auto& id : roster.ids())
        if (auto it = community.find(id); it != community.end()) present[it->second].push_back(id);
      for (const auto& [cid, ids] : present) {
        json entry;
        entry["community"] = cid;
        entry["journals"] = ids.size();
        const NodeRoster sub(ids);
        std::vector<DistanceMatrix> dist;
        if (ids.size() >= 5) {
          for (const auto& m : data[t].layers) dist.push_back(gdc_input(m.restrict_to(sub)));
          dist.push_back(gdc_input(data[t].fused->restrict_to(sub)));
        }
        for (std::size_t l = 0; l < 4; ++l) {
          if (dist.empty()) {
            entry["pdc"][layer_name(l)] = nullptr;
            continue;
          }
          std::vector<const DistanceMatrix*> given;
          for (std::size_t o = 0; o < 4; ++o)
            if (o != l) given.push_back(&dist[o]);
          try {
            entry["pdc"][layer_name(l)] = number_or_null(pdcor_multi(dist[4], dist[l], given));
          } catch (const Error& e) {
            entry["pdc"][layer_name(l)] = nullptr;
            entry["errors"][layer_name(l)] = e.what();
          }
        }
        if (dist.empty()) entry["note"] = "fewer than 5 journals in this period";
        pdc[t].push_back(std::move(entry));
      }
    });

    json all;
    for (std::size_t t = 0; t < np; ++t) all[config.periods[t].name] = pdc[t].is_null() ? json::array() : pdc[t];
    st.write("reports/community_pdc.json", all.dump(2) + "\n");

    json sizes = json::array();
    std::map<int, std::vector<std::string>> members;
    for (const auto& [id, cid] : community) members[cid].push_back(id);
    for (const auto& [cid, ids] : members) sizes.push_back({{"community", cid}, {"size", ids.size()}, {"journals", ids}});
    st.write("reports/communities.json", sizes.dump(2) + "\n");

    // pooled network on the aligned fused matrices
    Dense mean = Dense::Zero(static_cast<Eigen::Index>(aligned[0].size()), static_cast<Eigen::Index>(aligned[0].size()));
    for (const auto& a : aligned) mean += a.values();
    mean /= static_cast<double>(aligned.size());
    mean.diagonal().setOnes();
    st.write("aggregate/pooled_fused" + extension(config.format),
             group_network(SimilarityMatrix(aligned[0].roster(), std::move(mean))));
    for (std::size_t t = 0; t < np; ++t)
      for (const auto& [rel, text] : files[t]) st.write(rel, text);
  }));

  std::string chain = sha256_hex(manifest.config_sha256);
  for (auto& s : manifest.stages) {
    s.chain = chain_step(chain, s);
    chain = s.chain;
  }
  write_file(out_dir / "manifest.json", manifest.to_json());
  json timings = json::array();
  for (const auto& s : manifest.stages) timings.push_back({{"stage", s.name}, {"seconds", s.seconds}});
  write_file(out_dir / "timings.json", timings.dump(2) + "\n");
  return manifest;
}

std::vector<std::string> verify_manifest(const fs::path& out_dir) {
  std::vector<std::string> problems;
  const RunManifest m = RunManifest::from_json(read_file(out_dir / "manifest.json"));
  std::string chain = sha256_hex(m.config_sha256);
  std::map<std::string, std::string> produced;
  for (const auto& s : m.stages) {
    for (const auto& [rel, sha] : s.outputs) {
      const fs::path p = out_dir / rel;
      if (!fs::exists(p)) {
        problems.push_back("missing output " + rel);
        continue;
      }
      if (sha256_file(p) != sha) problems.push_back("checksum mismatch for " + rel);
      produced[rel] = sha;
    }
    for (const auto& [rel, sha] : s.inputs)
      if (auto it = produced.find(rel); it != produced.end() && it->second != sha)
        problems.push_back("stage " + s.name + " consumed " + rel + " with a different checksum");
    const std::string expected = chain_step(chain, s);
    if (expected != s.chain) problems.push_back("chain broken at stage " + s.name);
    chain = s.chain;
  }
  if (auto it = produced.find("config.json"); it == produced.end() || it->second != m.config_sha256)
    problems.push_back("config hash does not match config.json");
  return problems;
}

}  // namespace netfuse
