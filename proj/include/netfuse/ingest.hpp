#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "netfuse/core_model.hpp"

namespace netfuse {

struct WorkRecord {
  std::string id;
  std::string journal;
  std::vector<std::string> authors;
  std::vector<std::string> references;
  std::string type;
  bool is_research_article = false;
  bool has_references = false;
};

enum class IncidenceMode { Binary, Fractional, Count };
std::string_view to_string(IncidenceMode mode);

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Journal x entity weights. Rows and columns are both in lexicographic id order.
class IncidenceMatrix {
 public:
  IncidenceMatrix(NodeRoster rows, std::vector<std::string> cols, SparseRows values, IncidenceMode mode);

  const NodeRoster& rows() const noexcept { return rows_; }
  const std::vector<std::string>& cols() const noexcept { return cols_; }
  const SparseRows& values() const noexcept { return values_; }
  IncidenceMode mode() const noexcept { return mode_; }
  double at(const std::string& journal, const std::string& entity) const;
  double total() const { return values_.sum(); }

 private:
  NodeRoster rows_;
  std::vector<std::string> cols_;
  SparseRows values_;
  IncidenceMode mode_;
};

struct EmbeddedDoc {
  std::string doc;
  Eigen::VectorXd vec;
};

// Per journal, documents in file order. Every vector has dimension `dim`.
struct EmbeddingSet {
  std::size_t dim = 0;
  std::map<std::string, std::vector<EmbeddedDoc>> journals;
};

bool is_research_article_type(std::string_view type);
WorkRecord make_work(std::string id, std::string journal, std::vector<std::string> authors,
                     std::vector<std::string> references, std::string type);

// Keeps research articles with at least one reference.
std::vector<WorkRecord> filter_works(const std::vector<WorkRecord>& records);

IncidenceMatrix build_editor_incidence(const std::vector<std::pair<std::string, std::string>>& pairs);
// Each work credits 1/m to each of its m distinct authors.
IncidenceMatrix build_author_incidence(const std::vector<WorkRecord>& works);
IncidenceMatrix build_reference_incidence(const std::vector<WorkRecord>& works);

std::vector<WorkRecord> parse_works_jsonl(std::string_view text, const std::string& source = "<memory>");
std::vector<std::pair<std::string, std::string>> parse_editor_pairs_csv(std::string_view text,
                                                                        const std::string& source = "<memory>");
EmbeddingSet parse_embeddings_jsonl(std::string_view text, const std::string& source = "<memory>");

std::string format_work_jsonl(const WorkRecord& w);

// Sparse triplet CSV "journal,entity,weight" preceded by "#incidence,<mode>".
std::string format_incidence_csv(const IncidenceMatrix& m);
IncidenceMatrix parse_incidence_csv(std::string_view text, const std::string& source = "<memory>");

}  // namespace netfuse
