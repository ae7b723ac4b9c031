#include "netfuse/matrix_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "netfuse/checksum.hpp"

namespace netfuse {

static_assert(std::endian::native == std::endian::little, "binary matrix format assumes a little-endian host");

namespace {

constexpr std::string_view kMagic = "NFSM1";
constexpr std::string_view kChecksumTag = "#sha256,";

void check_csv_id(const std::string& id) {
  if (id.find_first_of(",\"\r\n") != std::string::npos)
    throw Error(ErrorCode::InvalidArgument, "node id '" + id + "' cannot be written to CSV");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view bytes, std::size_t& pos, const std::string& source) {
  if (pos + sizeof(T) > bytes.size()) throw Error(ErrorCode::ParseError, source + ": truncated binary matrix");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& where) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseError, where + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

std::string format_matrix_csv(const NodeRoster& roster, const Dense& values, bool with_checksum) {
  std::string out;
  out.reserve(roster.size() * roster.size() * 20);
  for (const auto& id : roster.ids()) {
    check_csv_id(id);
    out += ',';
    out += id;
  }
  out += '\n';
  for (std::size_t i = 0; i < roster.size(); ++i) {
    out += roster.id(i);
    for (std::size_t j = 0; j < roster.size(); ++j) {
      out += ',';
      out += format_double(values(i, j));
    }
    out += '\n';
  }
  if (with_checksum) {
    const std::string digest = sha256_hex(out);
    out += kChecksumTag;
    out += digest;
    out += '\n';
  }
  return out;
}

LabeledMatrix parse_matrix_csv(std::string_view text, const std::string& source) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    std::string_view line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.starts_with(kChecksumTag)) {
      const std::string expected(line.substr(kChecksumTag.size()));
      const std::string actual = sha256_hex(text.substr(0, start));
      if (expected != actual)
        throw Error(ErrorCode::ParseError, source + ": checksum mismatch (file says " + expected + ")");
      break;
    }
    if (!line.empty()) lines.push_back(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::ParseError, source + ": empty matrix file");

  auto header = split(lines[0], ',');
  const std::size_t n = header.size() - 1;
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t j = 1; j < header.size(); ++j) ids.emplace_back(header[j]);
  NodeRoster roster(ids);
  if (lines.size() != n + 1)
    throw Error(ErrorCode::ParseError, source + ": header lists " + std::to_string(n) + " ids but body has " +
                                           std::to_string(lines.size() - 1) + " rows");
  Dense values(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto cells = split(lines[i + 1], ',');
    const std::string where = source + ":" + std::to_string(i + 2);
    if (cells.size() != n + 1)
      throw Error(ErrorCode::ParseError, where + ": expected " + std::to_string(n + 1) + " cells, got " +
                                             std::to_string(cells.size()));
    if (cells[0] != ids[i])
      throw Error(ErrorCode::ParseError, where + ": row id '" + std::string(cells[0]) + "' does not match column id '" +
                                             ids[i] + "'");
    for (std::size_t j = 0; j < n; ++j) values(i, j) = parse_double(cells[j + 1], where);
  }
  return {std::move(roster), std::move(values)};
}

std::string format_matrix_binary(const NodeRoster& roster, const Dense& values) {
  std::string out(kMagic);
  put<std::uint64_t>(out, roster.size());
  for (const auto& id : roster.ids()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out += id;
  }
  for (std::size_t i = 0; i < roster.size(); ++i)
    for (std::size_t j = 0; j < roster.size(); ++j) put<double>(out, values(i, j));
  return out;
}

LabeledMatrix parse_matrix_binary(std::string_view bytes, const std::string& source) {
  if (!bytes.starts_with(kMagic)) throw Error(ErrorCode::ParseError, source + ": missing NFSM1 magic");
  std::size_t pos = kMagic.size();
  const auto n = take<std::uint64_t>(bytes, pos, source);
  if (n > bytes.size()) throw Error(ErrorCode::ParseError, source + ": implausible node count");
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = take<std::uint32_t>(bytes, pos, source);
    if (pos + len > bytes.size()) throw Error(ErrorCode::ParseError, source + ": truncated id table");
    ids.emplace_back(bytes.substr(pos, len));
    pos += len;
  }
  if (bytes.size() - pos != n * n * sizeof(double))
    throw Error(ErrorCode::ParseError, source + ": body size does not match " + std::to_string(n) + "x" +
                                           std::to_string(n) + " doubles");
  Dense values(n, n);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j) values(i, j) = take<double>(bytes, pos, source);
  return {NodeRoster(std::move(ids)), std::move(values)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

LabeledMatrix read_labeled_matrix(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (std::string_view(bytes).starts_with(kMagic)) return parse_matrix_binary(bytes, path.string());
  return parse_matrix_csv(bytes, path.string());
}

SimilarityMatrix read_similarity(const std::filesystem::path& path) {
  auto m = read_labeled_matrix(path);
  return SimilarityMatrix(std::move(m.roster), std::move(m.values));
}

void write_similarity(const std::filesystem::path& path, const SimilarityMatrix& m, bool with_checksum) {
  if (path.extension() == ".nfsm")
    write_file(path, format_matrix_binary(m.roster(), m.values()));
  else
    write_file(path, format_matrix_csv(m.roster(), m.values(), with_checksum));
}

}  // namespace netfuse
