#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hetprop/apm.hpp"
#include "hetprop/parallel.hpp"

namespace hetprop {

namespace fs = std::filesystem;

std::string hop_file_name(std::uint32_t k) { return "hop_" + std::to_string(k) + ".ukgf"; }

std::string propagation_fingerprint(const HeteroGraph& g, FeatureView rel_table, FeatureView x,
                                    const ApmConfig& cfg) {
  Sha256 h;
  const std::uint64_t shape[] = {g.node_count(), g.edge_type_count(), rel_table.rows(), rel_table.dim(),
                                 x.rows(), x.dim()};
  h.update_values(std::span<const std::uint64_t>(shape));
  h.update_values(g.in_offsets());
  h.update_values(g.in_sources());
  h.update_values(g.type_offsets());
  h.update_values(g.type_ids());
  h.update_values(rel_table.data());
  h.update_values(x.data());
  const std::string flags = to_string(cfg.isolated_policy) + "/" + to_string(cfg.type_combine) + "/" +
                            (cfg.add_reverse ? "reverse" : "directed");
  h.update(std::as_bytes(std::span<const char>(flags.data(), flags.size())));
  return h.hex_digest();
}

namespace {

constexpr const char* kSpillManifest = "spill_manifest.txt";

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

bool hop_file_usable(const fs::path& path, std::uint64_t rows, std::size_t dim) {
  if (!fs::exists(path)) return false;
  try {
    FeatureHeader h = read_feature_header(path);
    return h.rows == rows && h.dim == dim;
  } catch (const std::exception&) {
    return false;
  }
}

// Computes one hop block by block, streaming each finished block to disk.
void write_hop(const HeteroGraph& g, FeatureView rel_table, FeatureView c_k, const ApmConfig& cfg,
               std::uint64_t block_size, const fs::path& target) {
  const std::size_t d = c_k.dim();
  fs::path tmp = target;
  tmp += ".partial";
  {
    FeatureWriter writer(tmp, g.node_count(), static_cast<std::uint32_t>(d));
    std::vector<float> block;
    for (std::uint64_t first = 0; first < g.node_count(); first += block_size) {
      const std::uint64_t last = std::min<std::uint64_t>(first + block_size, g.node_count());
      block.assign((last - first) * d, 0.0f);
      parallel_for_ranges(last - first, cfg.workers, [&](std::uint64_t lo, std::uint64_t hi) {
        propagate_rows(g, rel_table, c_k, cfg, first + lo, first + hi,
                       std::span<float>(block).subspan(lo * d, (hi - lo) * d));
      });
      if (!FeatureView(last - first, d, block).all_finite()) {
        throw std::overflow_error("propagate_chunked: hop produced non-finite values");
      }
      writer.append(block);
    }
    writer.finish();
  }
  fs::rename(tmp, target);
}

}  // namespace

PropagationStack propagate_chunked(const HeteroGraph& g, FeatureView rel_table, FeatureView x,
                                   const ApmConfig& cfg, std::uint64_t block_size,
                                   const fs::path& spill_dir) {
  if (block_size < 1) throw std::invalid_argument("propagate_chunked: block_size must be >= 1");
  if (cfg.num_hops < 1) throw std::invalid_argument("propagate_chunked: num_hops must be >= 1");
  const HeteroGraph reversed = cfg.add_reverse ? add_reverse_edges(g) : HeteroGraph{};
  const HeteroGraph& graph = cfg.add_reverse ? reversed : g;
  if (x.rows() != graph.node_count() || rel_table.dim() != x.dim() ||
      rel_table.rows() < graph.edge_type_count()) {
    throw std::invalid_argument("propagate_chunked: shape mismatch between graph, features and relations");
  }
  if (!x.all_finite() || !rel_table.all_finite()) {
    throw std::invalid_argument("propagate_chunked: non-finite input");
  }

  fs::create_directories(spill_dir);
  const std::string fingerprint = propagation_fingerprint(g, rel_table, x, cfg);
  const fs::path manifest = spill_dir / kSpillManifest;
  // Hop files are only trusted when they were produced from the same inputs.
  bool reuse = false;
  if (fs::exists(manifest)) {
    auto kv = read_key_values(manifest);
    reuse = kv["fingerprint"] == fingerprint;
  }
  if (!reuse) {
    for (std::uint32_t k = 0; fs::exists(spill_dir / hop_file_name(k)); ++k) {
      fs::remove(spill_dir / hop_file_name(k));
    }
    std::ostringstream m;
    m << "fingerprint=" << fingerprint << "\n"
      << "nodes=" << x.rows() << "\n"
      << "dim=" << x.dim() << "\n";
    write_text_atomic(manifest, m.str());
  }

  const fs::path hop0 = spill_dir / hop_file_name(0);
  if (!reuse || !hop_file_usable(hop0, x.rows(), x.dim())) {
    fs::path tmp = hop0;
    tmp += ".partial";
    write_features(tmp, x);
    fs::rename(tmp, hop0);
  }

  PropagationStack stack;
  stack.push_back(MappedFeatures(hop0));
  for (std::uint32_t k = 1; k <= cfg.num_hops; ++k) {
    const fs::path target = spill_dir / hop_file_name(k);
    if (!hop_file_usable(target, x.rows(), x.dim())) {
      write_hop(graph, rel_table, stack.hop(k - 1), cfg, block_size, target);
    }
    stack.push_back(MappedFeatures(target));
  }
  return stack;
}

}  // namespace hetprop
