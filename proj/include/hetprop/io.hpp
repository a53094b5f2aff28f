#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetprop/feature_matrix.hpp"
#include "hetprop/graph.hpp"
#include "hetprop/label_matrix.hpp"

namespace hetprop {

// ---------------------------------------------------------------------------
// UKGF feature files
//
//   offset 0   "UKGF"            4 bytes
//   offset 4   version = 1       u32 little-endian
//   offset 8   rows              u64 little-endian
//   offset 16  dim               u32 little-endian
//   offset 20  rows*dim float32  little-endian, row-major
// ---------------------------------------------------------------------------

inline constexpr char kFeatureMagic[4] = {'U', 'K', 'G', 'F'};
inline constexpr std::uint32_t kFeatureVersion = 1;
inline constexpr std::size_t kFeatureHeaderBytes = 20;

struct FeatureHeader {
  std::uint64_t rows = 0;
  std::uint32_t dim = 0;
};

void write_features(const std::filesystem::path& path, FeatureView m);
FeatureMatrix read_features(const std::filesystem::path& path);
// Validates magic, version and that the file length matches the header.
FeatureHeader read_feature_header(const std::filesystem::path& path);

// Streams rows into a UKGF file. The header is written up front; append()
// must supply exactly rows*dim floats in total before finish().
class FeatureWriter {
 public:
  FeatureWriter(const std::filesystem::path& path, std::uint64_t rows, std::uint32_t dim);
  ~FeatureWriter();
  FeatureWriter(const FeatureWriter&) = delete;
  FeatureWriter& operator=(const FeatureWriter&) = delete;

  void append(std::span<const float> values);
  void finish();

 private:
  std::FILE* file_ = nullptr;
  std::filesystem::path path_;
  std::uint64_t expected_ = 0;
  std::uint64_t written_ = 0;
};

// Read-only memory mapping of a UKGF file.
class MappedFeatures {
 public:
  explicit MappedFeatures(const std::filesystem::path& path);
  ~MappedFeatures();
  MappedFeatures(MappedFeatures&& other) noexcept;
  MappedFeatures& operator=(MappedFeatures&& other) noexcept;
  MappedFeatures(const MappedFeatures&) = delete;
  MappedFeatures& operator=(const MappedFeatures&) = delete;

  FeatureView view() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  void release();

  std::filesystem::path path_;
  void* base_ = nullptr;
  std::size_t length_ = 0;
  FeatureHeader header_;
};

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

// edges.tsv: src<TAB>dst<TAB>t0[,t1...]
std::vector<EdgeRecord> read_edges_tsv(const std::filesystem::path& path);
void write_edges_tsv(const std::filesystem::path& path, const HeteroGraph& g);
HeteroGraph load_graph(const std::filesystem::path& edges_tsv, std::uint64_t node_count,
                       std::uint32_t edge_type_count);

// labels.tsv: node_id<TAB>c0[,c1...]; absent nodes are unlabeled. The writer
// starts the file with "# classes=Q". A class_count of 0 takes Q from that
// line, or "max class id + 1" when it is missing.
inline constexpr std::string_view kClassesComment = "# classes=";
LabelMatrix read_labels_tsv(const std::filesystem::path& path, std::uint64_t node_count,
                            std::uint32_t class_count = 0);
void write_labels_tsv(const std::filesystem::path& path, const LabelMatrix& labels);

// Splits on a single character, keeping empty fields.
std::vector<std::string> split_fields(std::string_view line, char sep);

// Writes via a sibling temp file and renames into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view contents);

// ---------------------------------------------------------------------------
// Checksums
// ---------------------------------------------------------------------------

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::span<const std::byte> bytes);
  template <typename T>
  void update_values(std::span<const T> values) {
    update(std::as_bytes(values));
  }
  std::string hex_digest();

 private:
  void* ctx_;
};

}  // namespace hetprop
