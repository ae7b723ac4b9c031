#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "netfuse/pipeline.hpp"

using namespace netfuse;
namespace fs = std::filesystem;

namespace {

const fs::path kBundled = fs::path(NETFUSE_DATA_DIR) / "synthetic" / "run.json";

CorpusLayout small_corpus(const fs::path& dir, int runs = 40) {
  CorpusSpec spec;
  spec.journals = 40;
  spec.consensus_runs = runs;
  spec.snf_k = 8;
  return write_synthetic_corpus(spec, dir);
}

}  // namespace

TEST_CASE("bundled configuration runs and verifies") {
  th::TempDir out("pipe-bundled");
  const auto manifest = run_pipeline(load_pipeline_config(kBundled), out.path);
  CHECK(verify_manifest(out.path).empty());
  CHECK(manifest.stages.size() == 7);
  CHECK(manifest.stages.front().name == "ingest");
  CHECK(manifest.stages.back().name == "aggregate");
  CHECK(manifest.tool_version == kToolVersion);
  CHECK(manifest.seeds.at("master") == 7);
  for (const char* f : {"config.json", "manifest.json", "timings.json", "fused/2006.csv", "consensus/communities.csv",
                        "consensus/isolates.txt", "reports/intertemporal.json", "aggregate/pooled_fused.graphml",
                        "aggregate/2012/fused.graphml", "stats/2019/report.json"})
    CHECK_MESSAGE(fs::exists(out.path / f), f);
  const auto back = RunManifest::from_json(th::tree_contents(out.path).at("manifest.json"));
  CHECK(back.to_json() == manifest.to_json());
}

TEST_CASE("missing input fails in ingest before any output") {
  th::TempDir in("pipe-missing");
  const auto layout = small_corpus(in.path);
  fs::remove(in.path / "2012" / "editors.csv");
  const fs::path out = in.path / "out";
  try {
    run_pipeline(load_pipeline_config(layout.config), out);
    FAIL("no throw");
  } catch (const StageError& e) {
    CHECK(e.stage() == "ingest");
    CHECK(std::string(e.what()).find("2012") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("invalid parameters are rejected") {
  th::TempDir in("pipe-params");
  const auto layout = small_corpus(in.path);
  auto config = load_pipeline_config(layout.config);
  config.threshold = 1.5;
  CHECK_THROWS_AS(config.validate(), Error);
  config = load_pipeline_config(layout.config);
  config.snf.k = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  CHECK_THROWS_AS(parse_pipeline_config("{\"periods\": 3}", in.path), Error);
  CHECK_THROWS_AS(parse_pipeline_config("not json", in.path), Error);
}

TEST_CASE("failed stage keeps earlier outputs and writes no manifest") {
  th::TempDir in("pipe-fail");
  const auto layout = small_corpus(in.path);
  std::ofstream(in.path / "2019" / "editors.csv") << "journal_id,editor_id\nJ0001,e1\n";
  const fs::path out = in.path / "out";
  try {
    run_pipeline(load_pipeline_config(layout.config), out);
    FAIL("no throw");
  } catch (const StageError& e) {
    CHECK(e.stage() == "layers");
  }
  CHECK(fs::exists(out / "ingest" / "2019" / "summary.json"));
  CHECK_FALSE(fs::exists(out / "layers"));
  CHECK_FALSE(fs::exists(out / "manifest.json"));
}

TEST_CASE("reruns and worker counts give identical bytes") {
  th::TempDir in("pipe-determinism");
  const auto layout = small_corpus(in.path);
  const auto config = load_pipeline_config(layout.config);
  run_pipeline(config, in.path / "a", {1});
  run_pipeline(config, in.path / "b", {1});
  run_pipeline(config, in.path / "c", {8});
  const auto a = th::tree_contents(in.path / "a", {"timings.json"});
  CHECK(a.size() > 30);
  CHECK(a == th::tree_contents(in.path / "b", {"timings.json"}));
  CHECK(a == th::tree_contents(in.path / "c", {"timings.json"}));

  auto other = config;
  other.seed = 8;
  run_pipeline(other, in.path / "d");
  const auto d = th::tree_contents(in.path / "d", {"timings.json"});
  CHECK(d.at("manifest.json") != a.at("manifest.json"));
}

TEST_CASE("verify_manifest detects tampering") {
  th::TempDir in("pipe-tamper");
  const auto layout = small_corpus(in.path);
  const fs::path out = in.path / "out";
  run_pipeline(load_pipeline_config(layout.config), out);
  REQUIRE(verify_manifest(out).empty());

  std::ofstream(out / "fused" / "2012.csv", std::ios::app) << "\n";
  auto problems = verify_manifest(out);
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].find("fused/2012.csv") != std::string::npos);

  run_pipeline(load_pipeline_config(layout.config), out);
  fs::remove(out / "consensus" / "isolates.txt");
  CHECK(verify_manifest(out).size() == 1);

  run_pipeline(load_pipeline_config(layout.config), out);
  auto j = nlohmann::json::parse(th::tree_contents(out).at("manifest.json"));
  j["stages"][2]["outputs"]["fused/2006.csv"] = std::string(64, '0');
  std::ofstream(out / "manifest.json", std::ios::trunc) << j.dump(2);
  problems = verify_manifest(out);
  CHECK(problems.size() >= 2);  // file checksum and chain

  std::ofstream(out / "config.json", std::ios::app) << " ";
  CHECK(verify_manifest(out).size() > problems.size());
}

TEST_CASE("config round trip") {
  const auto config = load_pipeline_config(kBundled);
  const auto text = format_pipeline_config(config);
  CHECK(format_pipeline_config(parse_pipeline_config(text, config.base_dir)) == text);
  CHECK(config.periods.size() == 3);
  CHECK(config.denominator == Denominator::Exposure);
}

TEST_CASE("command line") {
  const std::string cli = NETFUSE_CLI;
  auto r = th::run_command(cli + " --version");
  CHECK(r.status == 0);
  CHECK(r.output.find("netfuse 1.0.0") != std::string::npos);
  CHECK(r.output.find("mt19937_64") != std::string::npos);

  th::TempDir in("pipe-cli");
  const auto layout = small_corpus(in.path);
  r = th::run_command(cli + " pipeline --config " + layout.config.string() + " --out-dir " + (in.path / "out").string() +
                      " --jobs 2 --log-level warn");
  CHECK_MESSAGE(r.status == 0, r.output);
  r = th::run_command(cli + " verify-manifest --out-dir " + (in.path / "out").string());
  CHECK_MESSAGE(r.status == 0, r.output);

  fs::remove(in.path / "2006" / "works.jsonl");
  r = th::run_command(cli + " pipeline --config " + layout.config.string() + " --out-dir " + (in.path / "bad").string());
  CHECK(r.status == 3);
  CHECK(r.output.find("ingest") != std::string::npos);

  r = th::run_command(cli + " louvain --no-such-flag");
  CHECK(r.status != 0);
}
