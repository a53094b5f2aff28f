#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "hetprop/training.hpp"

namespace hetprop::kg {

// Uniformly shuffles `nodes` by seed and cuts it into train/val/test with the
// given ratios (which must sum to 1). The train and val sizes are rounded to
// the nearest integer; test takes the remainder.
NodeSplit split_nodes(std::vector<NodeId> nodes, std::array<double, 3> ratios, std::uint64_t seed);

// split.tsv: node_id<TAB>train|val|test
void write_split_tsv(const std::filesystem::path& path, const NodeSplit& split);
NodeSplit read_split_tsv(const std::filesystem::path& path);

}  // namespace hetprop::kg
