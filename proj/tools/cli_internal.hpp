#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hetprop::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Settings shared by every subcommand. Config keys use the long flag name
// with '-' replaced by '_' (e.g. sample_target=1000).
struct RunConfig {
  fs::path dump;
  fs::path screen;
  fs::path graph;  // directory with edges.tsv, features.ukgf, relations.ukgf
  fs::path stack;  // directory with hop_k.ukgf
  fs::path labels;
  fs::path split;
  fs::path checkpoint;
  fs::path out;
  fs::path work;

  std::size_t dim = 128;
  std::size_t hidden = 256;
  std::uint32_t hops = 3;
  std::uint32_t epochs = 300;
  double lr = 0.01;
  double dropout = 0.0;
  std::size_t batch_size = 1024;
  double threshold = 0.5;
  std::uint32_t classes = 2000;
  std::uint32_t kmeans_iters = 100;
  std::uint64_t sample_target = 0;  // 0 skips sampling in `pipeline`
  std::uint64_t chunk = 0;          // destination block size; 0 propagates in memory
  std::string isolated = "zero";
  std::string combine = "mean";
  bool reverse = false;
  std::string model = "r_sagn";
  std::string part = "test";
  std::uint64_t seed = 0;

  unsigned threads = 0;
  bool json = false;
  bool force = false;
};

// Parses key=value lines ('#' comments, blank lines allowed) into cfg.
// Unknown keys and malformed values throw UsageError. Relative paths are
// resolved against the config file's directory.
void load_config_file(const fs::path& path, RunConfig& cfg);

// Makes every non-empty path absolute.
void resolve_paths(RunConfig& cfg);

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-stage seeds derived from the run seed.
enum class SeedUse : std::uint64_t { embed = 1, cluster, sample, split, model, shuffle };
std::uint64_t derive_seed(std::uint64_t seed, SeedUse use);

// ---------------------------------------------------------------------------
// Output directory helpers
// ---------------------------------------------------------------------------

// Exclusive advisory lock on <dir>/.lock for the lifetime of the object.
class DirLock {
 public:
  explicit DirLock(const fs::path& dir);
  ~DirLock();
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

// Files are written under <dir>/.staging-<stage> and moved into <dir> by
// commit(). Without a commit the staging area is removed.
class Staging {
 public:
  Staging(const fs::path& dir, const std::string& stage);
  ~Staging();
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;

  fs::path path(const std::string& name) const { return staging_ / name; }
  void commit();

 private:
  fs::path dir_;
  fs::path staging_;
  bool committed_ = false;
};

// Records what a stage consumed and produced, so an unchanged rerun can be
// skipped. Stored as <dir>/<stage>.manifest.json.
struct StageManifest {
  std::string stage;
  ordered_json params = ordered_json::object();
  ordered_json inputs = ordered_json::object();   // name -> sha256
  ordered_json outputs = ordered_json::object();  // file name (relative to dir) -> sha256

  void add_input(const std::string& name, const fs::path& file);
  void add_output(const fs::path& dir, const std::string& name);
  ordered_json to_json() const;
};

fs::path manifest_path(const fs::path& dir, const std::string& stage);
// True when the stored manifest has the same params and inputs and every
// listed output still has its recorded checksum.
bool up_to_date(const fs::path& dir, const StageManifest& wanted);
void write_manifest(const fs::path& dir, const StageManifest& m);
ordered_json read_json_file(const fs::path& path);

// Digest of a directory output (checkpoint): sha256 over sorted file names
// and contents.
std::string sha256_tree(const fs::path& dir);

// ---------------------------------------------------------------------------
// Subcommands. Each returns a JSON summary; `status` is "done" or
// "up to date".
// ---------------------------------------------------------------------------

ordered_json cmd_build(const RunConfig& cfg);
ordered_json cmd_embed(const RunConfig& cfg);
ordered_json cmd_annotate(const RunConfig& cfg);
ordered_json cmd_sample(const RunConfig& cfg);
ordered_json cmd_propagate(const RunConfig& cfg);
ordered_json cmd_train(const RunConfig& cfg);
ordered_json cmd_eval(const RunConfig& cfg);
ordered_json cmd_pipeline(const RunConfig& cfg);

// Human-readable rendering of a subcommand summary.
void print_summary(std::ostream& out, const ordered_json& summary);

}  // namespace hetprop::cli
