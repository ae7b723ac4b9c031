#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "netfuse/aggregate.hpp"
#include "netfuse/align.hpp"
#include "netfuse/community.hpp"
#include "netfuse/consensus.hpp"
#include "netfuse/depstats.hpp"
#include "netfuse/fetch.hpp"
#include "netfuse/ingest.hpp"
#include "netfuse/layers.hpp"
#include "netfuse/matrix_io.hpp"
#include "netfuse/pipeline.hpp"
#include "netfuse/rng.hpp"
#include "netfuse/snf.hpp"
#include "netfuse/synth.hpp"

namespace fs = std::filesystem;
using namespace netfuse;
using json = nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<SimilarityMatrix> read_matrices(const std::string& list) {
  std::vector<SimilarityMatrix> out;
  for (const auto& p : split_list(list)) out.push_back(read_similarity(p));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no matrices given");
  return out;
}

IncidenceMatrix read_incidence(LayerKind kind, const fs::path& input) {
  const std::string text = read_file(input);
  if (text.rfind("#incidence", 0) == 0) return parse_incidence_csv(text, input.string());
  switch (kind) {
    case LayerKind::Editors: return build_editor_incidence(parse_editor_pairs_csv(text, input.string()));
    case LayerKind::Authors: return build_author_incidence(filter_works(parse_works_jsonl(text, input.string())));
    case LayerKind::References: return build_reference_incidence(filter_works(parse_works_jsonl(text, input.string())));
    case LayerKind::Abstracts: break;
  }
  throw Error(ErrorCode::InvalidArgument, "abstracts layers are built from embeddings");
}

DistanceMatrix distance_for(const std::string& path, bool as_distance) {
  const SimilarityMatrix s = read_similarity(path);
  return as_distance ? distance_from_similarity(s) : rows_to_distance(SampleMatrix::from_similarity(s));
}

void print_report(double value, DcorKind kind, const std::vector<std::string>& given) {
  json j;
  j["kind"] = to_string(kind);
  j["value"] = value;
  j["conditioned_on"] = given;
  std::cout << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netfuse: multilayer journal similarity networks"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  bool show_version = false;
  std::string log_level = "info";
  app.add_flag("--version", show_version, "Print tool and PRNG identifiers");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build incidence matrices and the four layers from input files");
  std::string works_path, editors_path, emb_path, out_dir;
  LayerOptions layer_opts;
  std::string zero_row = "drop";
  ingest->add_option("--works", works_path, "works JSONL")->required();
  ingest->add_option("--editors", editors_path, "journal_id,editor_id CSV")->required();
  ingest->add_option("--embeddings", emb_path, "embeddings JSONL")->required();
  ingest->add_option("--out-dir", out_dir)->required();
  ingest->add_option("--zero-row", zero_row, "error|drop|zero")->capture_default_str();
  ingest->add_flag("--raw-cosine", layer_opts.raw_cosine, "Skip the cosine-to-similarity transform on incidence layers");

  // fetch
  auto* fetch = app.add_subcommand("fetch", "Download works for a list of ISSNs from an OpenAlex-compatible API");
  FetchOptions fo;
  std::string issn_list, fetch_out;
  fetch->add_option("--issns", issn_list, "Comma-separated ISSNs")->required();
  fetch->add_option("--from", fo.year_from)->required();
  fetch->add_option("--to", fo.year_to)->required();
  fetch->add_option("--api-base", fo.api_base)->capture_default_str();
  fetch->add_option("--per-page", fo.per_page)->capture_default_str();
  fetch->add_option("--out", fetch_out, "works JSONL")->required();

  // build-layer
  auto* build = app.add_subcommand("build-layer", "Build one similarity layer");
  std::string kind_str, input_path, out_path;
  build->add_option("--kind", kind_str, "editors|authors|references|abstracts")->required();
  build->add_option("--input", input_path, "pairs CSV, works JSONL, embeddings JSONL or incidence CSV")->required();
  build->add_option("--zero-row", zero_row, "error|drop|zero")->capture_default_str();
  build->add_flag("--raw-cosine", layer_opts.raw_cosine);
  build->add_option("--out", out_path)->required();

  // dcor / pdcor
  std::string x_path, y_path, given_list, as = "rows";
  bool bias_corrected = false;
  auto* dcor_cmd = app.add_subcommand("dcor", "Distance correlation between two matrices");
  dcor_cmd->add_option("--x", x_path)->required();
  dcor_cmd->add_option("--y", y_path)->required();
  dcor_cmd->add_flag("--bias-corrected", bias_corrected, "Report R* instead of dCor");
  dcor_cmd->add_option("--as", as, "rows: rows are samples; distance: use 1 - s as distances")
      ->check(CLI::IsMember({"rows", "distance"}))
      ->capture_default_str();
  auto* pdcor_cmd = app.add_subcommand("pdcor", "Partial distance correlation given one or more matrices");
  pdcor_cmd->add_option("--x", x_path)->required();
  pdcor_cmd->add_option("--y", y_path)->required();
  pdcor_cmd->add_option("--given", given_list, "Comma-separated conditioning matrices")->required();
  pdcor_cmd->add_option("--as", as)->check(CLI::IsMember({"rows", "distance"}))->capture_default_str();

  // fuse
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse layers with similarity network fusion");
  std::string layers_list, mode_str = "kernel";
  SnfParams snf;
  fuse_cmd->add_option("--layers", layers_list, "Comma-separated layer matrices")->required();
  fuse_cmd->add_option("--k", snf.k)->capture_default_str();
  fuse_cmd->add_option("--alpha", snf.alpha)->capture_default_str();
  fuse_cmd->add_option("--iters", snf.iters)->capture_default_str();
  fuse_cmd->add_option("--mode", mode_str, "kernel|direct")->capture_default_str();
  fuse_cmd->add_option("--out", out_path)->required();

  // louvain
  auto* louvain_cmd = app.add_subcommand("louvain", "Louvain communities of a similarity matrix");
  std::string matrix_path;
  std::uint64_t seed = 42;
  int best_of = 1;
  LouvainOptions lo;
  louvain_cmd->add_option("--matrix", matrix_path)->required();
  louvain_cmd->add_option("--seed", seed)->capture_default_str();
  louvain_cmd->add_option("--best-of", best_of, "Keep the best of this many seeded runs")->capture_default_str();
  louvain_cmd->add_option("--resolution", lo.resolution)->capture_default_str();
  louvain_cmd->add_option("--out", out_path)->required();

  // consensus
  auto* consensus_cmd = app.add_subcommand("consensus", "Ensemble clustering over several matrices");
  std::string matrices_list, out_partition, out_isolates, out_coocc, denominator = "exposure";
  int runs = 1000, jobs = 1;
  double tau = 0.8;
  std::uint64_t master = 7;
  consensus_cmd->add_option("--matrices", matrices_list)->required();
  consensus_cmd->add_option("--runs", runs)->capture_default_str();
  consensus_cmd->add_option("--threshold", tau)->capture_default_str();
  consensus_cmd->add_option("--seed", master)->capture_default_str();
  consensus_cmd->add_option("--denominator", denominator, "exposure|total")->capture_default_str();
  consensus_cmd->add_option("--jobs", jobs)->capture_default_str();
  consensus_cmd->add_option("--out-partition", out_partition)->required();
  consensus_cmd->add_option("--out-isolates", out_isolates)->required();
  consensus_cmd->add_option("--out-coocc", out_coocc);

  // align
  auto* align_cmd = app.add_subcommand("align", "Align period matrices onto a common roster");
  std::string align_mode;
  align_cmd->add_option("--mode", align_mode, "intersect|impute")->required();
  align_cmd->add_option("--matrices", matrices_list)->required();
  align_cmd->add_option("--out-dir", out_dir)->required();

  // aggregate
  auto* aggregate_cmd = app.add_subcommand("aggregate", "Group-level network from a matrix and a partition");
  std::string partition_path, format = "graphml";
  double top_frac = 0.10;
  aggregate_cmd->add_option("--matrix", matrix_path)->required();
  aggregate_cmd->add_option("--partition", partition_path)->required();
  aggregate_cmd->add_option("--top-frac", top_frac)->capture_default_str();
  aggregate_cmd->add_option("--format", format, "graphml|gexf|csv")->capture_default_str();
  aggregate_cmd->add_option("--out", out_path)->required();

  // pipeline
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run every stage from one JSON config");
  std::string config_path;
  pipeline_cmd->add_option("--config", config_path)->required();
  pipeline_cmd->add_option("--jobs", jobs)->capture_default_str();
  pipeline_cmd->add_option("--out-dir", out_dir)->required();

  auto* verify_cmd = app.add_subcommand("verify-manifest", "Re-hash a pipeline output directory against its manifest");
  verify_cmd->add_option("--out-dir", out_dir)->required();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic multi-period corpus and run.json");
  CorpusSpec cs;
  synth_cmd->add_option("--out-dir", out_dir)->required();
  synth_cmd->add_option("--journals", cs.journals)->capture_default_str();
  synth_cmd->add_option("--fields", cs.fields)->capture_default_str();
  synth_cmd->add_option("--seed", cs.seed)->capture_default_str();
  synth_cmd->add_option("--churn", cs.churn)->capture_default_str();
  synth_cmd->add_option("--gap", cs.gap, "share absent in the middle periods only")->capture_default_str();
  synth_cmd->add_option("--runs", cs.consensus_runs, "consensus runs written to run.json")->capture_default_str();
  synth_cmd->add_option("--k", cs.snf_k, "SNF neighbours written to run.json")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("netfuse"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (show_version) {
    std::cout << "netfuse " << kToolVersion << "\nprng " << kPrngAlgorithm << "\n";
    return 0;
  }

  try {
    if (*ingest) {
      layer_opts.zero_row = parse_zero_row_policy(zero_row);
      const auto works = filter_works(parse_works_jsonl(read_file(works_path), works_path));
      const IncidenceMatrix inc[] = {build_editor_incidence(parse_editor_pairs_csv(read_file(editors_path), editors_path)),
                                     build_author_incidence(works), build_reference_incidence(works)};
      for (std::size_t l = 0; l < 3; ++l) {
        const std::string kind(to_string(kAllLayerKinds[l]));
        write_file(fs::path(out_dir) / (kind + "_incidence.csv"), format_incidence_csv(inc[l]));
        const BuiltLayer b = layer_from_incidence(inc[l], layer_opts);
        for (const auto& id : b.dropped) spdlog::warn("{} layer: dropped journal {} with no entities", kind, id);
        write_similarity(fs::path(out_dir) / ("layer_" + kind + ".csv"), b.matrix);
      }
      write_similarity(fs::path(out_dir) / "layer_abstracts.csv",
                       abstract_layer(parse_embeddings_jsonl(read_file(emb_path), emb_path)));
    } else if (*fetch) {
      fo.issns = split_list(issn_list);
      if (const char* token = std::getenv("NETFUSE_API_TOKEN")) fo.token = token;
      std::string out;
      for (const auto& w : fetch_works(fo)) out += format_work_jsonl(w) + "\n";
      write_file(fetch_out, out);
    } else if (*build) {
      layer_opts.zero_row = parse_zero_row_policy(zero_row);
      const LayerKind kind = parse_layer_kind(kind_str);
      if (kind == LayerKind::Abstracts) {
        write_similarity(out_path, abstract_layer(parse_embeddings_jsonl(read_file(input_path), input_path)));
      } else {
        const BuiltLayer b = layer_from_incidence(read_incidence(kind, input_path), layer_opts);
        for (const auto& id : b.dropped) spdlog::warn("dropped journal {} with no entities", id);
        write_similarity(out_path, b.matrix);
      }
    } else if (*dcor_cmd) {
      const DistanceMatrix x = distance_for(x_path, as == "distance");
      const DistanceMatrix y = distance_for(y_path, as == "distance");
      if (x.n() != y.n()) throw Error(ErrorCode::RosterMismatch, "matrices differ in size");
      if (read_labeled_matrix(x_path).roster != read_labeled_matrix(y_path).roster)
        throw Error(ErrorCode::RosterMismatch, "matrices have different rosters");
      if (bias_corrected)
        print_report(dcor_star(x, y), DcorKind::DcorStar, {});
      else
        print_report(dcor(x, y), DcorKind::Dcor, {});
    } else if (*pdcor_cmd) {
      const auto given_paths = split_list(given_list);
      const NodeRoster roster = read_labeled_matrix(x_path).roster;
      std::vector<std::string> all{y_path};
      all.insert(all.end(), given_paths.begin(), given_paths.end());
      for (const auto& p : all)
        if (read_labeled_matrix(p).roster != roster) throw Error(ErrorCode::RosterMismatch, p + " has a different roster");
      const DistanceMatrix x = distance_for(x_path, as == "distance");
      const DistanceMatrix y = distance_for(y_path, as == "distance");
      std::vector<DistanceMatrix> g;
      for (const auto& p : given_paths) g.push_back(distance_for(p, as == "distance"));
      std::vector<const DistanceMatrix*> gp;
      for (const auto& d : g) gp.push_back(&d);
      std::vector<std::string> names;
      for (const auto& p : given_paths) names.push_back(fs::path(p).filename().string());
      const double v = gp.empty() ? dcor_star(x, y) : pdcor_multi(x, y, gp);
      print_report(v, gp.empty() ? DcorKind::DcorStar : DcorKind::Pdcor, names);
    } else if (*fuse_cmd) {
      snf.mode = parse_snf_mode(mode_str);
      std::vector<NamedLayer> layers;
      for (const auto& p : split_list(layers_list)) layers.push_back({fs::path(p).stem().string(), read_similarity(p)});
      write_similarity(out_path, fuse(validate_multiplex(std::move(layers)), snf));
    } else if (*louvain_cmd) {
      const SimilarityMatrix s = read_similarity(matrix_path);
      const Partition p = louvain_best_of(graph_from_similarity(s), seed, best_of, lo);
      write_file(out_path, format_partition_csv(s.roster(), p.assignment));
      spdlog::info("{} communities, modularity {}", p.communities(), p.modularity);
    } else if (*consensus_cmd) {
      EnsembleOptions eo;
      eo.denominator = parse_denominator(denominator);
      eo.jobs = jobs;
      const auto matrices = read_matrices(matrices_list);
      const CooccurrenceGraph c = run_ensemble(matrices, runs, master, eo);
      const ConsensusResult r = final_partition(threshold_graph(c, tau), final_seed(master), eo.louvain);
      write_file(out_partition, format_partition_csv(r.members, r.partition.assignment));
      std::string iso;
      for (const auto& id : r.isolates) iso += id + "\n";
      write_file(out_isolates, iso);
      if (!out_coocc.empty()) write_file(out_coocc, format_cooccurrence_csv(c));
      spdlog::info("{} communities over {} journals, {} isolates", r.partition.communities(), r.members.size(),
                   r.isolates.size());
    } else if (*align_cmd) {
      const auto paths = split_list(matrices_list);
      const auto aligned = align(read_matrices(matrices_list), parse_align_mode(align_mode));
      for (std::size_t t = 0; t < aligned.size(); ++t)
        write_similarity(fs::path(out_dir) / fs::path(paths[t]).filename(), aligned[t]);
    } else if (*aggregate_cmd) {
      const SimilarityMatrix s = read_similarity(matrix_path);
      const LabeledPartition part = parse_partition_csv(read_file(partition_path), partition_path);
      const GroupMatrix g = shrink(s, part.roster, part.assignment);
      std::vector<ExportNode> nodes;
      std::vector<ExportEdge> edges;
      group_graph(g, top_edges(g, top_frac), nodes, edges);
      export_graph(out_path, nodes, edges, parse_graph_format(format));
    } else if (*pipeline_cmd) {
      const PipelineConfig config = load_pipeline_config(config_path);
      PipelineOptions po;
      po.jobs = jobs;
      run_pipeline(config, out_dir, po);
    } else if (*verify_cmd) {
      const auto problems = verify_manifest(out_dir);
      for (const auto& p : problems) std::cerr << p << "\n";
      if (!problems.empty()) return 1;
      std::cout << "manifest ok\n";
    } else if (*synth_cmd) {
      write_synthetic_corpus(cs, out_dir);
    } else {
      std::cout << app.help();
    }
  } catch (const StageError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
