#pragma once

#include <cstdint>
#include <vector>

#include "hetprop/graph.hpp"

namespace hetprop::kg {

struct SnowballParams {
  std::uint64_t target = 0;
  std::uint32_t num_seeds = 16;
  double high_degree_fraction = 0.5;  // share of seeds taken from the top total-degree nodes
  double restart_prob = 0.15;         // per step, jump back to the walker's start node
  std::uint32_t stall_limit = 64;     // steps without a new node before a walker is re-seeded
  std::uint32_t max_reseeds = 1024;   // after this many re-seeds, fill uniformly
  std::uint64_t seed = 0;
};

struct SnowballSample {
  std::vector<NodeId> nodes;  // sampled original ids, ascending; new id = position
  HeteroGraph subgraph;       // induced on `nodes`, relabeled
  bool filled = false;        // walks could not reach `target`; the rest was drawn uniformly
};

// Random-walk snowball sample of exactly params.target nodes. Walkers start
// from the highest total-degree nodes plus uniformly drawn nodes, step to a
// uniform neighbor ignoring edge direction, and record first visits. Throws
// std::invalid_argument when target > node_count.
SnowballSample snowball_sample(const HeteroGraph& g, const SnowballParams& params);

// Subgraph induced on a sorted node set, relabeled to positions in `nodes`.
HeteroGraph induced_subgraph(const HeteroGraph& g, const std::vector<NodeId>& nodes);

}  // namespace hetprop::kg
