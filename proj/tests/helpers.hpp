#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "netfuse/core_model.hpp"
#include "netfuse/rng.hpp"
#include "netfuse/synth.hpp"
#include "oracles.hpp"

namespace th {

inline netfuse::Dense to_dense(const oracle::Mat& m) {
  netfuse::Dense d(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.empty() ? 0 : m[0].size()));
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j) d(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return d;
}

inline oracle::Mat to_mat(const netfuse::Dense& d) {
  oracle::Mat m = oracle::zeros(static_cast<std::size_t>(d.rows()), static_cast<std::size_t>(d.cols()));
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d(i, j);
  return m;
}

inline double max_abs_diff(const oracle::Mat& a, const oracle::Mat& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
  return worst;
}

inline std::vector<std::string> ids(std::size_t n, const std::string& prefix = "n") {
  std::vector<std::string> out;
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%s%04zu", prefix.c_str(), i);
    out.push_back(buf);
  }
  return out;
}

inline netfuse::NodeRoster roster(std::size_t n, const std::string& prefix = "n") {
  return netfuse::NodeRoster(ids(n, prefix));
}

inline netfuse::Dense normal(Eigen::Index n, Eigen::Index p, netfuse::PortableRng& rng) {
  netfuse::Dense m(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = rng.normal();
  return m;
}

// Cosine similarity of random nonnegative vectors: a valid similarity matrix.
inline netfuse::SimilarityMatrix random_similarity(std::size_t n, netfuse::PortableRng& rng, int dim = 6) {
  netfuse::Dense x(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < dim; ++j) x(i, j) = rng.uniform01();
    x.row(i).normalize();
  }
  netfuse::Dense s = x * x.transpose();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < s.cols(); ++j) {
      s(i, j) = std::clamp(s(i, j), 0.0, 1.0);
      s(j, i) = s(i, j);
    }
    s(i, i) = 1.0;
  }
  return netfuse::SimilarityMatrix(roster(n), std::move(s));
}

// Three planted blocks; layer v cannot tell blocks v and v+1 apart, so every
// single layer shows only two groups while the layers jointly separate all three.
inline std::vector<netfuse::SimilarityMatrix> planted_multiplex(std::size_t n, netfuse::PortableRng& rng,
                                                               std::vector<int>* truth = nullptr) {
  std::vector<int> block(n);
  for (std::size_t i = 0; i < n; ++i) block[i] = static_cast<int>(3 * i / n);
  if (truth) *truth = block;
  std::vector<netfuse::SimilarityMatrix> layers;
  for (int v = 0; v < 3; ++v) {
    std::vector<int> seen(n);
    for (std::size_t i = 0; i < n; ++i) seen[i] = block[i] == (v + 1) % 3 ? v : block[i];
    layers.push_back(netfuse::planted_similarity(roster(n), seen, {0.55, 0.9, 0.0, 0.35}, rng));
  }
  return layers;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("netfuse-" + tag + "-" + std::to_string(static_cast<unsigned long long>(std::random_device{}())));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

struct CommandResult {
  int status = -1;
  std::string output;  // stdout and stderr
};

inline CommandResult run_command(const std::string& command) {
  CommandResult r;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

// Every regular file under dir keyed by relative path, except those named in skip.
inline std::map<std::string, std::string> tree_contents(const std::filesystem::path& dir,
                                                        const std::set<std::string>& skip = {}) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), dir).generic_string();
    if (skip.count(rel)) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[rel] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

}  // namespace th
