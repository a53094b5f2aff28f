#include "hetprop/label_matrix.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hetprop {

namespace {

void normalize(std::vector<ClassId>& classes, std::uint32_t class_count) {
  for (ClassId c : classes) {
    if (c >= class_count) {
      throw std::out_of_range("LabelMatrix: class id " + std::to_string(c) + " >= class_count " +
                              std::to_string(class_count));
    }
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
}

}  // namespace

LabelMatrix::LabelMatrix(std::uint64_t node_count, std::uint32_t class_count)
    : class_count_(class_count), lists_(node_count) {}

LabelMatrix LabelMatrix::from_lists(std::vector<std::vector<ClassId>> lists,
                                    std::uint32_t class_count) {
  LabelMatrix m;
  m.class_count_ = class_count;
  for (auto& l : lists) normalize(l, class_count);
  m.lists_ = std::move(lists);
  return m;
}

void LabelMatrix::set_labels(NodeId v, std::vector<ClassId> classes) {
  normalize(classes, class_count_);
  lists_.at(v) = std::move(classes);
}

std::vector<NodeId> LabelMatrix::labeled_nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < lists_.size(); ++v) {
    if (!lists_[v].empty()) out.push_back(v);
  }
  return out;
}

std::vector<std::vector<ClassId>> LabelMatrix::slice(std::span<const NodeId> nodes) const {
  std::vector<std::vector<ClassId>> out;
  out.reserve(nodes.size());
  for (NodeId v : nodes) out.push_back(lists_.at(v));
  return out;
}

}  // namespace hetprop
