#include "hetprop/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <stdexcept>

#include <json.hpp>

namespace hetprop {

EvalReport evaluate(const std::vector<std::vector<ClassId>>& predicted,
                    const std::vector<std::vector<ClassId>>& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("evaluate: " + std::to_string(predicted.size()) + " predictions for " +
                                std::to_string(truth.size()) + " nodes");
  }
  std::uint64_t exact = 0, tp = 0, fp = 0, fn = 0;
  std::vector<ClassId> common;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& p = predicted[i];
    const auto& t = truth[i];
    if (p == t) ++exact;
    common.clear();
    std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(common));
    tp += common.size();
    fp += p.size() - common.size();
    fn += t.size() - common.size();
  }
  auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
  EvalReport r;
  r.node_count = truth.size();
  r.subset_accuracy = ratio(double(exact), double(truth.size()));
  r.precision = ratio(double(tp), double(tp + fp));
  r.recall = ratio(double(tp), double(tp + fn));
  r.f1 = ratio(2.0 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

std::string to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["subset_accuracy"] = r.subset_accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["node_count"] = r.node_count;
  return j.dump();
}

EvalReport eval_report_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  EvalReport r;
  r.subset_accuracy = j.at("subset_accuracy").get<double>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.node_count = j.at("node_count").get<std::uint64_t>();
  return r;
}

std::string to_table(const EvalReport& r, const std::string& row_name) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-10s %8s %8s %8s %8s\n", "Method", "Acc.", "Prec.", "Rec.", "F1.");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-10s %8.2f %8.2f %8.2f %8.2f\n", row_name.c_str(),
                100.0 * r.subset_accuracy, 100.0 * r.precision, 100.0 * r.recall, 100.0 * r.f1);
  out += buf;
  return out;
}

}  // namespace hetprop
