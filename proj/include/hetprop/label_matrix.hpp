#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hetprop/feature_matrix.hpp"

namespace hetprop {

// Multi-label assignment of nodes to classes. Each node holds a sorted,
// deduplicated (possibly empty) list of class ids. Nodes with an empty list
// are unlabeled.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::uint64_t node_count, std::uint32_t class_count);

  // Normalizes each list (sort + dedup). Throws std::out_of_range on a class
  // id >= class_count.
  static LabelMatrix from_lists(std::vector<std::vector<ClassId>> lists, std::uint32_t class_count);

  std::uint64_t node_count() const { return lists_.size(); }
  std::uint32_t class_count() const { return class_count_; }

  std::span<const ClassId> labels(NodeId v) const { return lists_.at(v); }
  void set_labels(NodeId v, std::vector<ClassId> classes);
  bool is_labeled(NodeId v) const { return !lists_.at(v).empty(); }
  std::vector<NodeId> labeled_nodes() const;

  // Class lists of the given nodes, in the given order.
  std::vector<std::vector<ClassId>> slice(std::span<const NodeId> nodes) const;

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;

 private:
  std::uint32_t class_count_ = 0;
  std::vector<std::vector<ClassId>> lists_;
};

}  // namespace hetprop
