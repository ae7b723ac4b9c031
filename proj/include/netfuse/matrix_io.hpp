#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "netfuse/core_model.hpp"

namespace netfuse {

// Labeled square matrix as read from disk, before SimilarityMatrix validation.
struct LabeledMatrix {
  NodeRoster roster;
  Dense values;
};

// CSV: first row "",id1,...,idn; each following row id_i,v_i1,...,v_in.
// Numbers use the shortest representation that round-trips exactly.
// With `with_checksum` a final line "#sha256,<hex>" covers all preceding bytes.
std::string format_matrix_csv(const NodeRoster& roster, const Dense& values, bool with_checksum = false);
LabeledMatrix parse_matrix_csv(std::string_view text, const std::string& source = "<memory>");

// Binary: "NFSM1", u64 n, n x (u32 byte length, id bytes), n*n f64 row-major.
// All integers and doubles little-endian.
std::string format_matrix_binary(const NodeRoster& roster, const Dense& values);
LabeledMatrix parse_matrix_binary(std::string_view bytes, const std::string& source = "<memory>");

// Format is chosen by magic bytes on read, by extension (.nfsm => binary) on write.
LabeledMatrix read_labeled_matrix(const std::filesystem::path& path);
SimilarityMatrix read_similarity(const std::filesystem::path& path);
void write_similarity(const std::filesystem::path& path, const SimilarityMatrix& m, bool with_checksum = false);

std::string read_file(const std::filesystem::path& path);
// Writes atomically enough for our purposes: the target is replaced in one rename.
void write_file(const std::filesystem::path& path, std::string_view data);

std::string format_double(double v);
double parse_double(std::string_view s, const std::string& where);

}  // namespace netfuse
