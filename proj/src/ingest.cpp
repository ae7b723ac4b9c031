#include "netfuse/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

#include "netfuse/matrix_io.hpp"

namespace netfuse {

using json = nlohmann::json;

std::string_view to_string(IncidenceMode mode) {
  switch (mode) {
    case IncidenceMode::Binary: return "binary";
    case IncidenceMode::Fractional: return "fractional";
    case IncidenceMode::Count: return "count";
  }
  return "unknown";
}

namespace {

IncidenceMode parse_mode(std::string_view s, const std::string& source) {
  if (s == "binary") return IncidenceMode::Binary;
  if (s == "fractional") return IncidenceMode::Fractional;
  if (s == "count") return IncidenceMode::Count;
  throw Error(ErrorCode::ParseError, source + ": unknown incidence mode '" + std::string(s) + "'");
}

using CellMap = std::map<std::pair<std::string, std::string>, double>;

IncidenceMatrix from_cells(const CellMap& cells, IncidenceMode mode) {
  std::set<std::string> journals;
  std::set<std::string> entities;
  for (const auto& [key, w] : cells) {
    journals.insert(key.first);
    entities.insert(key.second);
  }
  NodeRoster rows(std::vector<std::string>(journals.begin(), journals.end()));
  std::vector<std::string> cols(entities.begin(), entities.end());
  std::map<std::string, Eigen::Index> col_index;
  for (std::size_t c = 0; c < cols.size(); ++c) col_index.emplace(cols[c], static_cast<Eigen::Index>(c));

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(cells.size());
  for (const auto& [key, w] : cells)
    trips.emplace_back(static_cast<Eigen::Index>(rows.index_of(key.first)), col_index.at(key.second), w);
  SparseRows values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  values.setFromTriplets(trips.begin(), trips.end());
  return IncidenceMatrix(std::move(rows), std::move(cols), std::move(values), mode);
}

std::vector<std::string> string_list(const json& j, const char* key, const std::string& where) {
  std::vector<std::string> out;
  if (!j.contains(key) || j[key].is_null()) return out;
  if (!j[key].is_array()) throw Error(ErrorCode::ParseError, where + ": field '" + key + "' must be an array");
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw Error(ErrorCode::ParseError, where + ": field '" + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    std::string_view line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line, lineno);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

IncidenceMatrix::IncidenceMatrix(NodeRoster rows, std::vector<std::string> cols, SparseRows values,
                                 IncidenceMode mode)
    : rows_(std::move(rows)), cols_(std::move(cols)), values_(std::move(values)), mode_(mode) {
  if (static_cast<std::size_t>(values_.rows()) != rows_.size() ||
      static_cast<std::size_t>(values_.cols()) != cols_.size())
    throw Error(ErrorCode::InvalidArgument, "incidence matrix shape does not match its labels");
  values_.makeCompressed();
  for (Eigen::Index r = 0; r < values_.outerSize(); ++r) {
    for (SparseRows::InnerIterator it(values_, r); it; ++it) {
      const double w = it.value();
      if (!std::isfinite(w) || w < 0.0)
        throw Error(ErrorCode::RangeError, "incidence weight at (" + rows_.id(r) + "," + cols_[it.col()] +
                                               ") must be finite and nonnegative");
      if (mode_ == IncidenceMode::Binary && w != 0.0 && w != 1.0)
        throw Error(ErrorCode::RangeError, "binary incidence weight at (" + rows_.id(r) + "," + cols_[it.col()] +
                                               ") must be 0 or 1");
    }
  }
}

double IncidenceMatrix::at(const std::string& journal, const std::string& entity) const {
  const auto r = rows_.find(journal);
  auto it = std::lower_bound(cols_.begin(), cols_.end(), entity);
  if (r < 0 || it == cols_.end() || *it != entity) return 0.0;
  return values_.coeff(r, static_cast<Eigen::Index>(it - cols_.begin()));
}

bool is_research_article_type(std::string_view type) {
  return type == "article" || type == "research-article";
}

WorkRecord make_work(std::string id, std::string journal, std::vector<std::string> authors,
                     std::vector<std::string> references, std::string type) {
  WorkRecord w;
  w.id = std::move(id);
  w.journal = std::move(journal);
  w.authors = std::move(authors);
  w.references = std::move(references);
  w.type = std::move(type);
  w.is_research_article = is_research_article_type(w.type);
  w.has_references = !w.references.empty();
  return w;
}

std::vector<WorkRecord> filter_works(const std::vector<WorkRecord>& records) {
  std::vector<WorkRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [](const WorkRecord& w) { return w.is_research_article && w.has_references; });
  return out;
}

IncidenceMatrix build_editor_incidence(const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "no (journal, editor) pairs");
  CellMap cells;
  for (const auto& p : pairs) cells[p] = 1.0;
  return from_cells(cells, IncidenceMode::Binary);
}

IncidenceMatrix build_author_incidence(const std::vector<WorkRecord>& works) {
  CellMap cells;
  for (const auto& w : works) {
    // repeated author entries on one work count once
    std::vector<std::string> authors = w.authors;
    std::sort(authors.begin(), authors.end());
    authors.erase(std::unique(authors.begin(), authors.end()), authors.end());
    if (authors.empty()) throw Error(ErrorCode::ZeroAuthors, "work '" + w.id + "' has no authors");
    const double share = 1.0 / static_cast<double>(authors.size());
    for (const auto& a : authors) cells[{w.journal, a}] += share;
  }
  return from_cells(cells, IncidenceMode::Fractional);
}

IncidenceMatrix build_reference_incidence(const std::vector<WorkRecord>& works) {
  CellMap cells;
  for (const auto& w : works)
    for (const auto& r : w.references) cells[{w.journal, r}] += 1.0;
  return from_cells(cells, IncidenceMode::Count);
}

std::vector<WorkRecord> parse_works_jsonl(std::string_view text, const std::string& source) {
  std::vector<WorkRecord> out;
  for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    const std::string where = source + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("journal") || !j["id"].is_string() ||
        !j["journal"].is_string())
      throw Error(ErrorCode::ParseError, where + ": work needs string fields 'id' and 'journal'");
    std::string type = j.value("type", std::string{});
    auto w = make_work(j["id"].get<std::string>(), j["journal"].get<std::string>(), string_list(j, "authors", where),
                       string_list(j, "references", where), std::move(type));
    if (w.journal.empty()) throw Error(ErrorCode::ParseError, where + ": empty journal id");
    out.push_back(std::move(w));
  });
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_editor_pairs_csv(std::string_view text,
                                                                        const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(lineno) + ": expected journal_id,editor_id");
    auto journal = trim(line.substr(0, comma));
    auto editor = trim(line.substr(comma + 1));
    if (lineno == 1 && journal == "journal_id" && editor == "editor_id") return;
    if (journal.empty() || editor.empty())
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(lineno) + ": empty id");
    out.emplace_back(std::string(journal), std::string(editor));
  });
  return out;
}

EmbeddingSet parse_embeddings_jsonl(std::string_view text, const std::string& source) {
  EmbeddingSet set;
  for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    const std::string where = source + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("journal") || !j["journal"].is_string() || !j.contains("vec") ||
        !j["vec"].is_array())
      throw Error(ErrorCode::ParseError, where + ": embedding needs 'journal' and 'vec'");
    std::string doc;
    if (j.contains("doc")) doc = j["doc"].is_string() ? j["doc"].get<std::string>() : j["doc"].dump();
    const auto& arr = j["vec"];
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t k = 0; k < arr.size(); ++k) {
      if (!arr[k].is_number()) throw Error(ErrorCode::ParseError, where + ": non-numeric vector entry");
      v(static_cast<Eigen::Index>(k)) = arr[k].get<double>();
      if (!std::isfinite(v(static_cast<Eigen::Index>(k))))
        throw Error(ErrorCode::NonFiniteEntry, where + ": vector entry " + std::to_string(k) + " is not finite");
    }
    if (v.size() == 0) throw Error(ErrorCode::ParseError, where + ": empty vector");
    if (set.dim == 0) set.dim = static_cast<std::size_t>(v.size());
    if (static_cast<std::size_t>(v.size()) != set.dim)
      throw Error(ErrorCode::ParseError, where + ": vector has dimension " + std::to_string(v.size()) +
                                             ", expected " + std::to_string(set.dim));
    set.journals[j["journal"].get<std::string>()].push_back({std::move(doc), std::move(v)});
  });
  return set;
}

std::string format_work_jsonl(const WorkRecord& w) {
  json j{{"id", w.id},
         {"journal", w.journal},
         {"authors", w.authors},
         {"references", w.references},
         {"type", w.type},
         {"ref_count", w.references.size()}};
  return j.dump();
}

std::string format_incidence_csv(const IncidenceMatrix& m) {
  std::string out = "#incidence,";
  out += to_string(m.mode());
  out += "\njournal,entity,weight\n";
  const auto& v = m.values();
  for (Eigen::Index r = 0; r < v.outerSize(); ++r) {
    for (SparseRows::InnerIterator it(v, r); it; ++it) {
      if (it.value() == 0.0) continue;
      out += m.rows().id(static_cast<std::size_t>(r));
      out += ',';
      out += m.cols()[static_cast<std::size_t>(it.col())];
      out += ',';
      out += format_double(it.value());
      out += '\n';
    }
  }
  return out;
}

IncidenceMatrix parse_incidence_csv(std::string_view text, const std::string& source) {
  IncidenceMode mode = IncidenceMode::Count;
  CellMap cells;
  for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    const std::string where = source + ":" + std::to_string(lineno);
    if (line.starts_with("#incidence,")) {
      mode = parse_mode(trim(line.substr(11)), where);
      return;
    }
    if (line == "journal,entity,weight") return;
    auto c1 = line.find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw Error(ErrorCode::ParseError, where + ": expected journal,entity,weight");
    const std::string journal(trim(line.substr(0, c1)));
    const std::string entity(trim(line.substr(c1 + 1, c2 - c1 - 1)));
    const double w = parse_double(line.substr(c2 + 1), where);
    cells[{journal, entity}] += w;
  });
  if (cells.empty()) throw Error(ErrorCode::EmptyInput, source + ": no incidence entries");
  return from_cells(cells, mode);
}

}  // namespace netfuse
