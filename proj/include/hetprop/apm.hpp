#pragma once

// Edge-aware multi-hop feature propagation.
//
// One hop maps C (n x d) to C' (n x d). For a destination v with in-neighbors
// u_1 < u_2 < ... each in-edge carries an embedding e_vu (the combination of
// the relation-table rows of its types) and produces a message
//
//     m_vu = e_vu (elementwise*) C[u]
//
// scored by its L2 norm q_vu = ||m_vu||. The scores are softmax-normalized
// over v's in-edges only, and C'[v] = sum_u softmax(q)_vu * m_vu, summed in
// ascending u. Destinations without in-edges get zeros or keep C[v],
// depending on IsolatedPolicy.
//
// Storage is float32; every per-destination reduction runs in double and is
// rounded once on store, so results do not depend on how rows are split
// across workers.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hetprop/feature_matrix.hpp"
#include "hetprop/graph.hpp"
#include "hetprop/io.hpp"

namespace hetprop {

enum class IsolatedPolicy { zero, carry };
enum class TypeCombine { mean, sum };

struct ApmConfig {
  std::uint32_t num_hops = 3;
  IsolatedPolicy isolated_policy = IsolatedPolicy::zero;
  TypeCombine type_combine = TypeCombine::mean;
  bool add_reverse = false;
  // 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

std::string to_string(IsolatedPolicy p);
std::string to_string(TypeCombine c);
IsolatedPolicy parse_isolated_policy(std::string_view s);
TypeCombine parse_type_combine(std::string_view s);

// The sequence [C^0 = X, C^1, ..., C^K]. Hops are either owned in memory or
// memory-mapped from hop files.
class PropagationStack {
 public:
  void push_back(FeatureMatrix hop);
  void push_back(MappedFeatures hop);

  std::size_t size() const { return hops_.size(); }
  std::uint32_t num_hops() const { return hops_.empty() ? 0 : static_cast<std::uint32_t>(hops_.size() - 1); }
  FeatureView hop(std::size_t k) const;
  std::size_t rows() const { return hops_.empty() ? 0 : hop(0).rows(); }
  std::size_t dim() const { return hops_.empty() ? 0 : hop(0).dim(); }

 private:
  std::vector<std::variant<FeatureMatrix, MappedFeatures>> hops_;
};

bool bitwise_equal(const PropagationStack& a, const PropagationStack& b);

// Combined embedding of an edge carrying `types`, in double precision.
// Throws std::invalid_argument for an empty list, std::out_of_range for a bad
// type id.
std::vector<double> edge_embedding(FeatureView rel_table, std::span<const TypeId> types,
                                   TypeCombine combine);

// Computes rows [first, last) of the next hop into out (size (last-first)*d).
// This is the kernel every propagation path shares.
void propagate_rows(const HeteroGraph& g, FeatureView rel_table, FeatureView c_k,
                    const ApmConfig& cfg, NodeId first, NodeId last, std::span<float> out);

// Softmax coefficients of v's in-edges, in ascending-source order.
std::vector<double> attention_weights(const HeteroGraph& g, FeatureView rel_table,
                                      FeatureView c_k, const ApmConfig& cfg, NodeId v);

// Throws std::invalid_argument on shape mismatch or non-finite input.
FeatureMatrix propagate_one_hop(const HeteroGraph& g, FeatureView rel_table, FeatureView c_k,
                                const ApmConfig& cfg);

PropagationStack propagate(const HeteroGraph& g, FeatureView rel_table, FeatureView x,
                           const ApmConfig& cfg);

// Literal dense-tensor evaluation: materializes the n x n x d relation-aware
// adjacency and message tensors. Intended as a test oracle; throws
// std::length_error when node_count exceeds max_nodes.
inline constexpr std::uint64_t kDenseOracleMaxNodes = 200;
PropagationStack dense_oracle(const HeteroGraph& g, FeatureView rel_table, FeatureView x,
                              const ApmConfig& cfg,
                              std::uint64_t max_nodes = kDenseOracleMaxNodes);

// Disk-backed propagation. Destinations are processed in contiguous blocks of
// block_size; hop k is written to spill_dir/hop_{k}.ukgf and memory-mapped as
// the input of hop k+1. If spill_dir already holds a manifest for the same
// inputs and config, complete hop files are reused instead of recomputed.
PropagationStack propagate_chunked(const HeteroGraph& g, FeatureView rel_table, FeatureView x,
                                   const ApmConfig& cfg, std::uint64_t block_size,
                                   const std::filesystem::path& spill_dir);

std::string hop_file_name(std::uint32_t k);

// Fingerprint over graph structure, relation table, features and the config
// fields that affect results (workers excluded).
std::string propagation_fingerprint(const HeteroGraph& g, FeatureView rel_table, FeatureView x,
                                    const ApmConfig& cfg);

}  // namespace hetprop
