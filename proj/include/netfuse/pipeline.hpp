#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "netfuse/aggregate.hpp"
#include "netfuse/align.hpp"
#include "netfuse/consensus.hpp"
#include "netfuse/error.hpp"
#include "netfuse/layers.hpp"
#include "netfuse/snf.hpp"

namespace netfuse {

inline constexpr std::string_view kToolVersion = "1.0.0";

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error(ErrorCode::StageError, "stage " + stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PeriodInputs {
  std::string name;
  std::filesystem::path works;       // JSONL works (authors and references layers)
  std::filesystem::path editors;     // journal_id,editor_id pairs
  std::filesystem::path embeddings;  // JSONL abstract embeddings
};

struct PipelineConfig {
  std::filesystem::path base_dir;  // relative input paths resolve against this
  std::vector<PeriodInputs> periods;
  std::uint64_t seed = 7;
  LayerOptions layers;
  SnfParams snf;
  int louvain_best_of = 1;
  double resolution = 1.0;
  int runs = 1000;
  double threshold = 0.8;
  Denominator denominator = Denominator::Exposure;
  AlignMode alignment = AlignMode::Impute;
  double top_fraction = 0.10;
  GraphFormat format = GraphFormat::GraphML;
  bool gdc_as_distance = false;

  // Checks parameters and that every referenced file exists.
  void validate() const;
};

PipelineConfig parse_pipeline_config(std::string_view json, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
// Canonical JSON of the effective configuration (input paths as given).
std::string format_pipeline_config(const PipelineConfig& config);

struct StageRecord {
  std::string name;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path relative to out dir -> sha256
  std::string chain;                           // sha256(previous chain + stage record)
  double seconds = 0.0;                        // wall clock; kept out of the manifest file
};

struct RunManifest {
  std::string tool_version;
  std::string prng;
  std::string config_sha256;  // of the effective config as written to config.json
  std::map<std::string, std::uint64_t> seeds;
  std::vector<StageRecord> stages;

  // Deterministic serialisation (no timings).
  std::string to_json() const;
  static RunManifest from_json(std::string_view text);
};

struct PipelineOptions {
  int jobs = 1;
};

// Writes artifacts, manifest.json and timings.json under out_dir.
RunManifest run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir,
                         const PipelineOptions& opts = {});

// Problems found re-hashing out_dir against its manifest; empty when valid.
std::vector<std::string> verify_manifest(const std::filesystem::path& out_dir);

}  // namespace netfuse
