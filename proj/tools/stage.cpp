#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cli_internal.hpp"
#include "hetprop/io.hpp"

namespace hetprop::cli {

DirLock::DirLock(const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path lock = dir / ".lock";
  fd_ = ::open(lock.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd_ < 0) throw std::runtime_error("cannot open " + lock.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw std::runtime_error(dir.string() + " is in use by another hetprop process");
  }
}

DirLock::~DirLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

Staging::Staging(const fs::path& dir, const std::string& stage)
    : dir_(dir), staging_(dir / (".staging-" + stage)) {
  fs::remove_all(staging_);
  fs::create_directories(staging_);
}

Staging::~Staging() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void Staging::commit() {
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(staging_)) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  for (const fs::path& from : entries) {
    const fs::path to = dir_ / from.filename();
    fs::remove_all(to);
    fs::rename(from, to);
  }
  fs::remove_all(staging_);
  committed_ = true;
}

void StageManifest::add_input(const std::string& name, const fs::path& file) {
  inputs[name] = fs::is_directory(file) ? sha256_tree(file) : sha256_file(file);
}

void StageManifest::add_output(const fs::path& dir, const std::string& name) {
  const fs::path file = dir / name;
  outputs[name] = fs::is_directory(file) ? sha256_tree(file) : sha256_file(file);
}

ordered_json StageManifest::to_json() const {
  return {{"stage", stage}, {"params", params}, {"inputs", inputs}, {"outputs", outputs}};
}

fs::path manifest_path(const fs::path& dir, const std::string& stage) {
  return dir / (stage + ".manifest.json");
}

ordered_json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ordered_json::parse(in);
}

bool up_to_date(const fs::path& dir, const StageManifest& wanted) {
  const fs::path path = manifest_path(dir, wanted.stage);
  if (!fs::exists(path)) return false;
  ordered_json stored;
  try {
    stored = read_json_file(path);
  } catch (const std::exception&) {
    return false;
  }
  if (stored.value("params", ordered_json()) != wanted.params) return false;
  if (stored.value("inputs", ordered_json()) != wanted.inputs) return false;
  const auto outputs = stored.value("outputs", ordered_json::object());
  if (outputs.empty()) return false;
  for (const auto& [name, digest] : outputs.items()) {
    const fs::path file = dir / name;
    if (!fs::exists(file)) return false;
    const std::string actual = fs::is_directory(file) ? sha256_tree(file) : sha256_file(file);
    if (actual != digest.get<std::string>()) return false;
  }
  return true;
}

void write_manifest(const fs::path& dir, const StageManifest& m) {
  write_text_atomic(manifest_path(dir, m.stage), m.to_json().dump(2) + "\n");
}

std::string sha256_tree(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
  }
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const fs::path& f : files) {
    const std::string name = f.generic_string();
    const std::string digest = sha256_file(dir / f);
    h.update(std::as_bytes(std::span(name.data(), name.size() + 1)));
    h.update(std::as_bytes(std::span(digest.data(), digest.size())));
  }
  return h.hex_digest();
}

}  // namespace hetprop::cli
