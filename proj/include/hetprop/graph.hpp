#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <vector>

#include "hetprop/feature_matrix.hpp"

namespace hetprop {

// One input row of an edge list: a directed pair with one or more edge types.
struct EdgeRecord {
  NodeId src = 0;
  NodeId dst = 0;
  std::vector<TypeId> types;
};

struct Neighbor {
  NodeId src;
  std::span<const TypeId> types;
};

class HeteroGraph;

// Ascending-source range of the in-neighbors of one destination node.
class NeighborRange {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = Neighbor;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const HeteroGraph* g, std::uint64_t slot) : g_(g), slot_(slot) {}

    Neighbor operator*() const;
    iterator& operator++() {
      ++slot_;
      return *this;
    }
    iterator operator++(int) {
      auto copy = *this;
      ++slot_;
      return copy;
    }
    bool operator==(const iterator& other) const { return slot_ == other.slot_; }

   private:
    const HeteroGraph* g_ = nullptr;
    std::uint64_t slot_ = 0;
  };

  NeighborRange(const HeteroGraph* g, std::uint64_t first, std::uint64_t last)
      : g_(g), first_(first), last_(last) {}

  iterator begin() const { return {g_, first_}; }
  iterator end() const { return {g_, last_}; }
  std::size_t size() const { return last_ - first_; }
  bool empty() const { return first_ == last_; }

 private:
  const HeteroGraph* g_;
  std::uint64_t first_;
  std::uint64_t last_;
};

// Immutable directed multi-typed-edge graph, stored destination-major.
//
// Each distinct (src, dst) pair occupies one adjacency slot. Slots are sorted
// by (dst, src); slot s has a non-empty, sorted, deduplicated list of type ids.
class HeteroGraph {
 public:
  HeteroGraph() : in_offsets_(1, 0), type_offsets_(1, 0) {}

  std::uint64_t node_count() const { return node_count_; }
  std::uint64_t edge_count() const { return in_src_.size(); }
  std::uint32_t edge_type_count() const { return edge_type_count_; }

  NeighborRange in_neighbors(NodeId v) const;
  std::uint64_t in_degree(NodeId v) const;
  std::uint64_t out_degree(NodeId v) const;

  // Raw CSR arrays, for kernels and serialization.
  std::span<const std::uint64_t> in_offsets() const { return in_offsets_; }
  std::span<const NodeId> in_sources() const { return in_src_; }
  std::span<const std::uint64_t> type_offsets() const { return type_offsets_; }
  std::span<const TypeId> type_ids() const { return types_; }
  std::span<const TypeId> slot_types(std::uint64_t slot) const {
    return std::span<const TypeId>(types_).subspan(type_offsets_[slot],
                                                   type_offsets_[slot + 1] - type_offsets_[slot]);
  }

  // Flattened edge list in (dst, src) order.
  std::vector<EdgeRecord> edges() const;

  friend bool operator==(const HeteroGraph&, const HeteroGraph&) = default;

 private:
  friend HeteroGraph build_graph(std::span<const EdgeRecord>, std::uint64_t, std::uint32_t);

  std::uint64_t node_count_ = 0;
  std::uint32_t edge_type_count_ = 0;
  std::vector<std::uint64_t> in_offsets_;    // node_count + 1
  std::vector<NodeId> in_src_;               // edge_count
  std::vector<std::uint64_t> type_offsets_;  // edge_count + 1
  std::vector<TypeId> types_;
  std::vector<std::uint64_t> out_degree_;
};

inline Neighbor NeighborRange::iterator::operator*() const {
  return {g_->in_sources()[slot_], g_->slot_types(slot_)};
}

// Builds a graph from an edge list. Repeated (src, dst) pairs are merged into
// one slot carrying the union of their types. Input order does not matter.
// Throws std::out_of_range for bad indices, std::invalid_argument for an edge
// without types.
HeteroGraph build_graph(std::span<const EdgeRecord> edges, std::uint64_t node_count,
                        std::uint32_t edge_type_count);

// For every u->v with types T adds v->u with the same T.
HeteroGraph add_reverse_edges(const HeteroGraph& g);

// Relabels nodes: node i becomes perm[i].
HeteroGraph permute_nodes(const HeteroGraph& g, std::span<const NodeId> perm);

}  // namespace hetprop
