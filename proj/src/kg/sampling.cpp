#include "hetprop/kg/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hetprop::kg {

namespace {

// Undirected neighbor lists in CSR form.
struct UndirectedAdjacency {
  std::vector<std::uint64_t> offsets;
  std::vector<NodeId> targets;

  std::span<const NodeId> of(NodeId v) const {
    return std::span<const NodeId>(targets).subspan(offsets[v], offsets[v + 1] - offsets[v]);
  }
};

UndirectedAdjacency undirected(const HeteroGraph& g) {
  const std::uint64_t n = g.node_count();
  UndirectedAdjacency a;
  a.offsets.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) {
    for (const Neighbor& nb : g.in_neighbors(v)) {
      ++a.offsets[v + 1];
      if (nb.src != v) ++a.offsets[nb.src + 1];
    }
  }
  std::partial_sum(a.offsets.begin(), a.offsets.end(), a.offsets.begin());
  a.targets.resize(a.offsets.back());
  std::vector<std::uint64_t> fill(a.offsets.begin(), a.offsets.end() - 1);
  for (NodeId v = 0; v < n; ++v) {
    for (const Neighbor& nb : g.in_neighbors(v)) {
      a.targets[fill[v]++] = nb.src;
      if (nb.src != v) a.targets[fill[nb.src]++] = v;
    }
  }
  return a;
}

}  // namespace

HeteroGraph induced_subgraph(const HeteroGraph& g, const std::vector<NodeId>& nodes) {
  std::vector<EdgeRecord> edges;
  for (std::size_t new_dst = 0; new_dst < nodes.size(); ++new_dst) {
    for (const Neighbor& nb : g.in_neighbors(nodes[new_dst])) {
      auto it = std::lower_bound(nodes.begin(), nodes.end(), nb.src);
      if (it == nodes.end() || *it != nb.src) continue;
      edges.push_back({static_cast<NodeId>(it - nodes.begin()), new_dst,
                       std::vector<TypeId>(nb.types.begin(), nb.types.end())});
    }
  }
  return build_graph(edges, nodes.size(), g.edge_type_count());
}

SnowballSample snowball_sample(const HeteroGraph& g, const SnowballParams& p) {
  const std::uint64_t n = g.node_count();
  if (p.target > n) {
    throw std::invalid_argument("snowball_sample: target " + std::to_string(p.target) + " > node_count " +
                                std::to_string(n));
  }
  if (p.high_degree_fraction < 0.0 || p.high_degree_fraction > 1.0) {
    throw std::invalid_argument("snowball_sample: high_degree_fraction must be in [0,1]");
  }
  SnowballSample out;
  if (p.target == 0) {
    out.subgraph = induced_subgraph(g, out.nodes);
    return out;
  }

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<NodeId> any_node(0, n - 1);
  const UndirectedAdjacency adj = undirected(g);

  std::vector<char> visited(n, 0);
  std::vector<NodeId> order;
  order.reserve(p.target);
  auto record = [&](NodeId v) {
    if (visited[v]) return false;
    visited[v] = 1;
    order.push_back(v);
    return true;
  };
  auto done = [&] { return order.size() >= p.target; };

  // Seeds: top total-degree nodes (ties to the lower id), then uniform draws.
  const std::uint64_t num_seeds = std::min<std::uint64_t>(std::max<std::uint32_t>(p.num_seeds, 1), n);
  const auto num_high = static_cast<std::uint64_t>(std::llround(p.high_degree_fraction * double(num_seeds)));
  std::vector<NodeId> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), NodeId{0});
  auto total_degree = [&](NodeId v) { return g.in_degree(v) + g.out_degree(v); };
  std::partial_sort(by_degree.begin(), by_degree.begin() + std::ptrdiff_t(num_high), by_degree.end(),
                    [&](NodeId a, NodeId b) {
                      const auto da = total_degree(a), db = total_degree(b);
                      return da != db ? da > db : a < b;
                    });
  std::vector<NodeId> seeds(by_degree.begin(), by_degree.begin() + std::ptrdiff_t(num_high));
  std::vector<char> is_seed(n, 0);
  for (NodeId s : seeds) is_seed[s] = 1;
  while (seeds.size() < num_seeds) {
    NodeId v = any_node(rng);
    if (is_seed[v]) continue;
    is_seed[v] = 1;
    seeds.push_back(v);
  }

  struct Walker {
    NodeId start;
    NodeId at;
    std::uint32_t stall;
  };
  std::vector<Walker> walkers;
  for (NodeId s : seeds) {
    if (done()) break;
    record(s);
    walkers.push_back({s, s, 0});
  }

  auto fresh_unvisited = [&]() -> NodeId {
    for (int tries = 0; tries < 64; ++tries) {
      NodeId v = any_node(rng);
      if (!visited[v]) return v;
    }
    const NodeId offset = any_node(rng);
    for (NodeId i = 0; i < n; ++i) {
      NodeId v = (offset + i) % n;
      if (!visited[v]) return v;
    }
    return n;
  };

  std::uint32_t reseeds = 0;
  while (!done() && !out.filled) {
    for (Walker& w : walkers) {
      if (done()) break;
      auto nbrs = adj.of(w.at);
      if (coin(rng) < p.restart_prob) {
        w.at = w.start;
      } else if (!nbrs.empty()) {
        w.at = nbrs[std::uniform_int_distribution<std::size_t>(0, nbrs.size() - 1)(rng)];
      }
      if (record(w.at)) {
        w.stall = 0;
        continue;
      }
      if (nbrs.empty()) w.stall = p.stall_limit;
      if (++w.stall < p.stall_limit) continue;
      if (reseeds >= p.max_reseeds) {
        out.filled = true;
        break;
      }
      ++reseeds;
      const NodeId fresh = fresh_unvisited();
      record(fresh);
      w = {fresh, fresh, 0};
    }
  }

  if (!done()) {
    std::vector<NodeId> rest;
    for (NodeId v = 0; v < n; ++v)
      if (!visited[v]) rest.push_back(v);
    std::shuffle(rest.begin(), rest.end(), rng);
    for (NodeId v : rest) {
      if (done()) break;
      record(v);
    }
  }

  out.nodes = std::move(order);
  std::sort(out.nodes.begin(), out.nodes.end());
  out.subgraph = induced_subgraph(g, out.nodes);
  return out;
}

}  // namespace hetprop::kg
