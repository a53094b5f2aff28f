#include "hetprop/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hetprop {

NeighborRange HeteroGraph::in_neighbors(NodeId v) const {
  if (v >= node_count_) {
    throw std::out_of_range("in_neighbors: node " + std::to_string(v) + " >= node_count " +
                            std::to_string(node_count_));
  }
  return NeighborRange(this, in_offsets_[v], in_offsets_[v + 1]);
}

std::uint64_t HeteroGraph::in_degree(NodeId v) const {
  if (v >= node_count_) throw std::out_of_range("in_degree: node out of range");
  return in_offsets_[v + 1] - in_offsets_[v];
}

std::uint64_t HeteroGraph::out_degree(NodeId v) const {
  if (v >= node_count_) throw std::out_of_range("out_degree: node out of range");
  return out_degree_[v];
}

std::vector<EdgeRecord> HeteroGraph::edges() const {
  std::vector<EdgeRecord> out;
  out.reserve(edge_count());
  for (NodeId v = 0; v < node_count_; ++v) {
    for (std::uint64_t s = in_offsets_[v]; s < in_offsets_[v + 1]; ++s) {
      auto t = slot_types(s);
      out.push_back({in_src_[s], v, std::vector<TypeId>(t.begin(), t.end())});
    }
  }
  return out;
}

HeteroGraph build_graph(std::span<const EdgeRecord> edges, std::uint64_t node_count,
                        std::uint32_t edge_type_count) {
  for (const auto& e : edges) {
    if (e.src >= node_count || e.dst >= node_count) {
      throw std::out_of_range("build_graph: edge (" + std::to_string(e.src) + "," +
                              std::to_string(e.dst) + ") outside node_count " +
                              std::to_string(node_count));
    }
    if (e.types.empty()) {
      throw std::invalid_argument("build_graph: edge (" + std::to_string(e.src) + "," +
                                  std::to_string(e.dst) + ") has no types");
    }
    for (TypeId t : e.types) {
      if (t >= edge_type_count) {
        throw std::out_of_range("build_graph: type id " + std::to_string(t) +
                                " >= edge_type_count " + std::to_string(edge_type_count));
      }
    }
  }

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = edges[a];
    const auto& y = edges[b];
    return x.dst != y.dst ? x.dst < y.dst : x.src < y.src;
  });

  HeteroGraph g;
  g.node_count_ = node_count;
  g.edge_type_count_ = edge_type_count;
  g.in_offsets_.assign(node_count + 1, 0);
  g.out_degree_.assign(node_count, 0);

  std::vector<TypeId> merged;
  std::size_t i = 0;
  while (i < order.size()) {
    const auto& first = edges[order[i]];
    merged.clear();
    std::size_t j = i;
    while (j < order.size() && edges[order[j]].src == first.src &&
           edges[order[j]].dst == first.dst) {
      const auto& t = edges[order[j]].types;
      merged.insert(merged.end(), t.begin(), t.end());
      ++j;
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    g.in_src_.push_back(first.src);
    g.types_.insert(g.types_.end(), merged.begin(), merged.end());
    g.type_offsets_.push_back(g.types_.size());
    ++g.in_offsets_[first.dst + 1];
    ++g.out_degree_[first.src];
    i = j;
  }
  std::partial_sum(g.in_offsets_.begin(), g.in_offsets_.end(), g.in_offsets_.begin());
  return g;
}

HeteroGraph add_reverse_edges(const HeteroGraph& g) {
  std::vector<EdgeRecord> all = g.edges();
  const std::size_t forward = all.size();
  all.reserve(2 * forward);
  for (std::size_t i = 0; i < forward; ++i) {
    all.push_back({all[i].dst, all[i].src, all[i].types});
  }
  return build_graph(all, g.node_count(), g.edge_type_count());
}

HeteroGraph permute_nodes(const HeteroGraph& g, std::span<const NodeId> perm) {
  if (perm.size() != g.node_count()) throw std::invalid_argument("permute_nodes: size mismatch");
  std::vector<EdgeRecord> all = g.edges();
  for (auto& e : all) {
    e.src = perm[e.src];
    e.dst = perm[e.dst];
  }
  return build_graph(all, g.node_count(), g.edge_type_count());
}

}  // namespace hetprop
