#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hetprop/io.hpp"

static_assert(std::endian::native == std::endian::little,
              "UKGF files are little-endian; big-endian hosts are not supported");

namespace hetprop {

namespace fs = std::filesystem;

bool FeatureView::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](float x) { return std::isfinite(x); });
}

bool bitwise_equal(FeatureView a, FeatureView b) {
  if (a.rows() != b.rows() || a.dim() != b.dim()) return false;
  if (a.data().empty()) return true;
  return std::memcmp(a.data().data(), b.data().data(), a.data().size_bytes()) == 0;
}

double max_abs_diff(FeatureView a, FeatureView b) {
  if (a.rows() != b.rows() || a.dim() != b.dim()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(double(a.data()[i]) - double(b.data()[i])));
  }
  return worst;
}

namespace {

[[noreturn]] void io_error(const std::string& what, const fs::path& path) {
  throw std::runtime_error(what + ": " + path.string() + ": " + std::strerror(errno));
}

void write_header(std::FILE* f, const fs::path& path, std::uint64_t rows, std::uint32_t dim) {
  char header[kFeatureHeaderBytes];
  std::memcpy(header, kFeatureMagic, 4);
  std::memcpy(header + 4, &kFeatureVersion, 4);
  std::memcpy(header + 8, &rows, 8);
  std::memcpy(header + 16, &dim, 4);
  if (std::fwrite(header, 1, sizeof header, f) != sizeof header) io_error("write failed", path);
}

FeatureHeader parse_header(const char* bytes, std::uint64_t file_size, const fs::path& path) {
  if (file_size < kFeatureHeaderBytes) {
    throw std::runtime_error("UKGF: truncated header in " + path.string());
  }
  if (std::memcmp(bytes, kFeatureMagic, 4) != 0) {
    throw std::runtime_error("UKGF: bad magic in " + path.string());
  }
  std::uint32_t version = 0;
  std::memcpy(&version, bytes + 4, 4);
  if (version != kFeatureVersion) {
    throw std::runtime_error("UKGF: unsupported version " + std::to_string(version) + " in " +
                             path.string());
  }
  FeatureHeader h;
  std::memcpy(&h.rows, bytes + 8, 8);
  std::memcpy(&h.dim, bytes + 16, 4);
  const std::uint64_t expected = kFeatureHeaderBytes + h.rows * h.dim * sizeof(float);
  if (file_size != expected) {
    throw std::runtime_error("UKGF: " + path.string() + " has " + std::to_string(file_size) +
                             " bytes, header implies " + std::to_string(expected));
  }
  return h;
}

}  // namespace

void write_features(const fs::path& path, FeatureView m) {
  FeatureWriter w(path, m.rows(), static_cast<std::uint32_t>(m.dim()));
  w.append(m.data());
  w.finish();
}

FeatureHeader read_feature_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error("cannot open", path);
  char header[kFeatureHeaderBytes] = {};
  in.read(header, sizeof header);
  return parse_header(header, fs::file_size(path), path);
}

FeatureMatrix read_features(const fs::path& path) {
  FeatureHeader h = read_feature_header(path);
  std::ifstream in(path, std::ios::binary);
  in.seekg(kFeatureHeaderBytes);
  std::vector<float> data(h.rows * h.dim);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!in) io_error("short read", path);
  return FeatureMatrix(h.rows, h.dim, std::move(data));
}

FeatureWriter::FeatureWriter(const fs::path& path, std::uint64_t rows, std::uint32_t dim)
    : path_(path), expected_(rows * dim) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) io_error("cannot create", path);
  write_header(file_, path, rows, dim);
}

FeatureWriter::~FeatureWriter() {
  if (file_) std::fclose(file_);
}

void FeatureWriter::append(std::span<const float> values) {
  if (!file_) throw std::logic_error("FeatureWriter: append after finish");
  if (written_ + values.size() > expected_) {
    throw std::logic_error("FeatureWriter: more values than header declares");
  }
  if (!values.empty() && std::fwrite(values.data(), sizeof(float), values.size(), file_) != values.size()) {
    io_error("write failed", path_);
  }
  written_ += values.size();
}

void FeatureWriter::finish() {
  if (!file_) return;
  if (written_ != expected_) {
    throw std::logic_error("FeatureWriter: wrote " + std::to_string(written_) + " of " +
                           std::to_string(expected_) + " values");
  }
  const bool flushed = std::fflush(file_) == 0;
  const bool closed = std::fclose(file_) == 0;
  file_ = nullptr;
  if (!flushed || !closed) io_error("flush failed", path_);
}

MappedFeatures::MappedFeatures(const fs::path& path) : path_(path) {
  int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) io_error("cannot open", path);
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    io_error("cannot stat", path);
  }
  length_ = static_cast<std::size_t>(st.st_size);
  if (length_ > 0) {
    base_ = ::mmap(nullptr, length_, PROT_READ, MAP_SHARED, fd, 0);
  }
  ::close(fd);
  if (base_ == MAP_FAILED || base_ == nullptr) {
    base_ = nullptr;
    io_error("mmap failed", path);
  }
  try {
    header_ = parse_header(static_cast<const char*>(base_), length_, path);
  } catch (...) {
    release();
    throw;
  }
}

MappedFeatures::~MappedFeatures() { release(); }

MappedFeatures::MappedFeatures(MappedFeatures&& other) noexcept
    : path_(std::move(other.path_)), base_(other.base_), length_(other.length_), header_(other.header_) {
  other.base_ = nullptr;
  other.length_ = 0;
}

MappedFeatures& MappedFeatures::operator=(MappedFeatures&& other) noexcept {
  if (this != &other) {
    release();
    path_ = std::move(other.path_);
    base_ = other.base_;
    length_ = other.length_;
    header_ = other.header_;
    other.base_ = nullptr;
    other.length_ = 0;
  }
  return *this;
}

void MappedFeatures::release() {
  if (base_) ::munmap(base_, length_);
  base_ = nullptr;
  length_ = 0;
}

FeatureView MappedFeatures::view() const {
  const auto* floats = reinterpret_cast<const float*>(static_cast<const char*>(base_) + kFeatureHeaderBytes);
  return FeatureView(header_.rows, header_.dim,
                     std::span<const float>(floats, header_.rows * header_.dim));
}

// ---------------------------------------------------------------------------

std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

namespace {

template <typename T>
T parse_uint(std::string_view s, const fs::path& path, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": bad integer '" +
                             std::string(s) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_id_list(std::string_view s, const fs::path& path, std::size_t line_no) {
  std::vector<T> out;
  for (const auto& field : split_fields(s, ',')) out.push_back(parse_uint<T>(field, path, line_no));
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<EdgeRecord> read_edges_tsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) io_error("cannot open", path);
  std::vector<EdgeRecord> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line, '\t');
    if (fields.size() != 3) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 3 tab-separated fields");
    }
    edges.push_back({parse_uint<NodeId>(fields[0], path, line_no),
                     parse_uint<NodeId>(fields[1], path, line_no),
                     parse_id_list<TypeId>(fields[2], path, line_no)});
  }
  return edges;
}

void write_edges_tsv(const fs::path& path, const HeteroGraph& g) {
  std::ostringstream out;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    for (const Neighbor& nb : g.in_neighbors(v)) {
      out << nb.src << '\t' << v << '\t';
      for (std::size_t i = 0; i < nb.types.size(); ++i) {
        if (i) out << ',';
        out << nb.types[i];
      }
      out << '\n';
    }
  }
  write_text_atomic(path, out.str());
}

HeteroGraph load_graph(const fs::path& edges_tsv, std::uint64_t node_count,
                       std::uint32_t edge_type_count) {
  auto edges = read_edges_tsv(edges_tsv);
  return build_graph(edges, node_count, edge_type_count);
}

LabelMatrix read_labels_tsv(const fs::path& path, std::uint64_t node_count,
                            std::uint32_t class_count) {
  std::ifstream in(path);
  if (!in) io_error("cannot open", path);
  std::vector<std::vector<ClassId>> lists(node_count);
  std::uint32_t max_class_plus_one = 0;
  std::uint32_t declared = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.starts_with(kClassesComment)) {
      declared = parse_uint<std::uint32_t>(std::string_view(line).substr(kClassesComment.size()), path, line_no);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line, '\t');
    if (fields.size() != 2) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 2 tab-separated fields");
    }
    auto node = parse_uint<NodeId>(fields[0], path, line_no);
    if (node >= node_count) {
      throw std::out_of_range(path.string() + ":" + std::to_string(line_no) + ": node " +
                              std::to_string(node) + " >= node_count");
    }
    auto& dst = lists[node];
    for (ClassId c : parse_id_list<ClassId>(fields[1], path, line_no)) {
      dst.push_back(c);
      max_class_plus_one = std::max(max_class_plus_one, c + 1);
    }
  }
  if (!class_count) class_count = declared ? declared : max_class_plus_one;
  return LabelMatrix::from_lists(std::move(lists), class_count);
}

void write_labels_tsv(const fs::path& path, const LabelMatrix& labels) {
  std::ostringstream out;
  out << kClassesComment << labels.class_count() << '\n';
  for (NodeId v = 0; v < labels.node_count(); ++v) {
    auto l = labels.labels(v);
    if (l.empty()) continue;
    out << v << '\t';
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (i) out << ',';
      out << l[i];
    }
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

void write_text_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_error("cannot create", tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) io_error("write failed", tmp);
  }
  fs::rename(tmp, path);
}

}  // namespace hetprop
