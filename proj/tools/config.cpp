#include <charconv>
#include <fstream>
#include <functional>
#include <map>

#include "cli_internal.hpp"
#include "hetprop/kg/text.hpp"

namespace hetprop::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw UsageError("config: bad value for " + key + ": '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("config: bad boolean for " + key + ": '" + value + "'");
}

using Setter = std::function<void(const std::string& key, const std::string& value)>;

std::map<std::string, Setter> setters(RunConfig& cfg, const fs::path& base) {
  auto path = [&base](fs::path& field) {
    return [&field, base](const std::string&, const std::string& v) {
      fs::path p(v);
      field = p.is_absolute() ? p : base / p;
    };
  };
  auto number = [](auto& field) {
    return [&field](const std::string& k, const std::string& v) {
      field = parse_number<std::remove_reference_t<decltype(field)>>(k, v);
    };
  };
  auto text = [](std::string& field) { return [&field](const std::string&, const std::string& v) { field = v; }; };
  auto flag = [](bool& field) {
    return [&field](const std::string& k, const std::string& v) { field = parse_bool(k, v); };
  };
  return {
      {"dump", path(cfg.dump)},
      {"screen", path(cfg.screen)},
      {"graph", path(cfg.graph)},
      {"stack", path(cfg.stack)},
      {"labels", path(cfg.labels)},
      {"split", path(cfg.split)},
      {"checkpoint", path(cfg.checkpoint)},
      {"out", path(cfg.out)},
      {"work", path(cfg.work)},
      {"dim", number(cfg.dim)},
      {"hidden", number(cfg.hidden)},
      {"hops", number(cfg.hops)},
      {"epochs", number(cfg.epochs)},
      {"lr", number(cfg.lr)},
      {"dropout", number(cfg.dropout)},
      {"batch_size", number(cfg.batch_size)},
      {"threshold", number(cfg.threshold)},
      {"classes", number(cfg.classes)},
      {"kmeans_iters", number(cfg.kmeans_iters)},
      {"sample_target", number(cfg.sample_target)},
      {"chunk", number(cfg.chunk)},
      {"isolated", text(cfg.isolated)},
      {"combine", text(cfg.combine)},
      {"reverse", flag(cfg.reverse)},
      {"model", text(cfg.model)},
      {"part", text(cfg.part)},
      {"seed", number(cfg.seed)},
      {"threads", number(cfg.threads)},
  };
}

void absolutize(fs::path& p) {
  if (!p.empty()) p = fs::absolute(p).lexically_normal();
}

}  // namespace

void load_config_file(const fs::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  auto table = setters(cfg, base);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    auto it = table.find(key);
    if (it == table.end()) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(key, value);
  }
}

void resolve_paths(RunConfig& cfg) {
  for (fs::path* p : {&cfg.dump, &cfg.screen, &cfg.graph, &cfg.stack, &cfg.labels, &cfg.split,
                      &cfg.checkpoint, &cfg.out, &cfg.work}) {
    absolutize(*p);
  }
}

std::uint64_t derive_seed(std::uint64_t seed, SeedUse use) {
  return kg::splitmix64(seed ^ (static_cast<std::uint64_t>(use) * 0x9e3779b97f4a7c15ULL));
}

}  // namespace hetprop::cli
