#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetprop/feature_matrix.hpp"

namespace hetprop {

// Multi-label evaluation summary. precision/recall/f1 are micro-averaged over
// all (node, class) decisions.
struct EvalReport {
  double subset_accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t node_count = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Both arguments hold one sorted, deduplicated class list per node, in the
// same node order. Throws std::invalid_argument when the sizes differ.
// Ratios with a zero denominator are reported as 0.
EvalReport evaluate(const std::vector<std::vector<ClassId>>& predicted,
                    const std::vector<std::vector<ClassId>>& truth);

std::string to_json(const EvalReport& r);
EvalReport eval_report_from_json(const std::string& text);
// Aligned table: Acc. Prec. Rec. F1. (as percentages).
std::string to_table(const EvalReport& r, const std::string& row_name);

}  // namespace hetprop
