#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hetprop/feature_matrix.hpp"
#include "hetprop/kg/dump.hpp"
#include "hetprop/label_matrix.hpp"

namespace hetprop::kg {

inline constexpr const char* kInstanceOf = "P31";

struct HarvestResult {
  std::vector<std::string> parents;                // deduplicated union, first-appearance order
  std::vector<std::vector<std::string>> per_entity;  // instance-of targets of each record
};

// Collects the entity-valued `instance_of_property` claims of every record.
HarvestResult harvest_labels(const std::vector<EntityRecord>& records,
                             const std::string& instance_of_property = kInstanceOf);

struct KMeansResult {
  std::vector<ClassId> assignment;  // one cluster id per input row
  FeatureMatrix centroids;
  std::vector<double> objective;    // SSE after seeding, then after each iteration
  std::uint32_t iterations = 0;
  bool converged = false;           // assignment reached a fixpoint
};

// Lloyd's algorithm with k-means++ seeding and Euclidean distance. Stops at
// max_iters or when no assignment changes. Empty clusters keep their previous
// centroid. Throws std::invalid_argument when rows < k or k == 0.
KMeansResult cluster_labels(FeatureView embeddings, std::uint32_t k, std::uint64_t seed,
                            std::uint32_t max_iters);

// parent id -> high-level class id.
using AnnotationMap = std::unordered_map<std::string, ClassId>;

AnnotationMap make_annotation_map(const std::vector<std::string>& parents,
                                  const std::vector<ClassId>& assignment);

// Maps each entity's parents to classes. Throws std::out_of_range for a parent
// missing from the map.
LabelMatrix annotate(const std::vector<std::vector<std::string>>& per_entity, const AnnotationMap& map,
                     std::uint32_t class_count);

}  // namespace hetprop::kg
