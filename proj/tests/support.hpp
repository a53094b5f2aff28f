#pragma once

// Generators and independent reference implementations shared by the unit
// tests and the acceptance binary. The references work from plain edge lists
// and nested loops, never from the library's CSR or kernels.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "hetprop/apm.hpp"
#include "hetprop/feature_matrix.hpp"
#include "hetprop/graph.hpp"
#include "hetprop/kg/text.hpp"

namespace hetprop::testing {

struct RandomGraph {
  std::vector<EdgeRecord> edges;
  HeteroGraph graph;
};

// Directed graph with n nodes and relation types [0, M). Roughly
// isolated_fraction of the nodes get no in-edges; every other node gets
// between 1 and max_in in-edges from uniform sources (self-loops and
// duplicate pairs allowed), each carrying 1..max_types distinct types.
inline RandomGraph random_graph(std::mt19937_64& rng, std::uint64_t n, std::uint32_t M,
                                double isolated_fraction = 0.2, std::uint32_t max_in = 5,
                                std::uint32_t max_types = 3) {
  RandomGraph out;
  std::uniform_int_distribution<NodeId> node(0, n - 1);
  std::uniform_int_distribution<TypeId> type(0, M - 1);
  std::uniform_int_distribution<std::uint32_t> in_count(1, max_in);
  std::uniform_int_distribution<std::uint32_t> type_count(1, std::min(max_types, M));
  std::bernoulli_distribution isolated(isolated_fraction);
  for (NodeId v = 0; v < n; ++v) {
    if (isolated(rng)) continue;
    const std::uint32_t k = in_count(rng);
    for (std::uint32_t e = 0; e < k; ++e) {
      std::set<TypeId> types;
      const std::uint32_t t = type_count(rng);
      while (types.size() < t) types.insert(type(rng));
      out.edges.push_back({node(rng), v, std::vector<TypeId>(types.begin(), types.end())});
    }
  }
  std::shuffle(out.edges.begin(), out.edges.end(), rng);
  out.graph = build_graph(out.edges, n, M);
  return out;
}

inline FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t dim, float lo = -1.0f,
                                   float hi = 1.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  FeatureMatrix m(rows, dim);
  for (float& x : m.data()) x = u(rng);
  return m;
}

// Path 0 -> 1 -> ... -> n-1, all edges of type 0.
inline HeteroGraph path_graph(std::uint64_t n) {
  std::vector<EdgeRecord> edges;
  for (NodeId v = 1; v < n; ++v) edges.push_back({v - 1, v, {0}});
  return build_graph(edges, n, 1);
}

using DoubleRows = std::vector<std::vector<double>>;

inline DoubleRows to_rows(FeatureView m) {
  DoubleRows out(m.rows(), std::vector<double>(m.dim()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out[i][j] = m(i, j);
  return out;
}

// One hop computed from an edge list: duplicate (src, dst) pairs are merged
// by type union, then every destination takes the softmax-weighted sum of its
// messages, in double throughout.
inline DoubleRows reference_hop(const std::vector<EdgeRecord>& edges, std::uint64_t n, const DoubleRows& rel,
                                const DoubleRows& c, const ApmConfig& cfg) {
  std::map<std::pair<NodeId, NodeId>, std::set<TypeId>> merged;  // (dst, src) -> types
  for (const EdgeRecord& e : edges) {
    merged[{e.dst, e.src}].insert(e.types.begin(), e.types.end());
    if (cfg.add_reverse) merged[{e.src, e.dst}].insert(e.types.begin(), e.types.end());
  }
  const std::size_t d = c.empty() ? 0 : c[0].size();
  DoubleRows out(n, std::vector<double>(d, 0.0));
  for (NodeId v = 0; v < n; ++v) {
    std::vector<std::vector<double>> messages;
    for (const auto& [key, types] : merged) {
      if (key.first != v) continue;
      std::vector<double> e(d, 0.0);
      for (TypeId t : types)
        for (std::size_t j = 0; j < d; ++j) e[j] += rel[t][j];
      if (cfg.type_combine == TypeCombine::mean)
        for (double& x : e) x /= double(types.size());
      std::vector<double> m(d);
      for (std::size_t j = 0; j < d; ++j) m[j] = e[j] * c[key.second][j];
      messages.push_back(std::move(m));
    }
    if (messages.empty()) {
      if (cfg.isolated_policy == IsolatedPolicy::carry) out[v] = c[v];
      continue;
    }
    std::vector<double> score;
    for (const auto& m : messages) {
      double s = 0.0;
      for (double x : m) s += x * x;
      score.push_back(std::sqrt(s));
    }
    const double top = *std::max_element(score.begin(), score.end());
    double total = 0.0;
    for (double& s : score) total += (s = std::exp(s - top));
    for (std::size_t i = 0; i < messages.size(); ++i)
      for (std::size_t j = 0; j < d; ++j) out[v][j] += score[i] / total * messages[i][j];
  }
  return out;
}

// [X, C^1, ..., C^K] with every hop rounded to float before the next one, as
// the library stores hops.
inline std::vector<DoubleRows> reference_propagate(const std::vector<EdgeRecord>& edges, std::uint64_t n,
                                                   FeatureView rel, FeatureView x, const ApmConfig& cfg) {
  const DoubleRows r = to_rows(rel);
  std::vector<DoubleRows> hops{to_rows(x)};
  for (std::uint32_t k = 0; k < cfg.num_hops; ++k) {
    DoubleRows next = reference_hop(edges, n, r, hops.back(), cfg);
    for (auto& row : next)
      for (double& v : row) v = double(float(v));
    hops.push_back(std::move(next));
  }
  return hops;
}

inline double max_abs_diff(const DoubleRows& a, FeatureView b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) worst = std::max(worst, std::abs(a[i][j] - double(b(i, j))));
  return worst;
}

// Fills the entity template by string concatenation.
inline std::string template_oracle(const kg::EntityRecord& e, const kg::NameTable& names) {
  auto look = [&](const std::string& id) {
    auto it = names.find(id);
    return it == names.end() ? id : it->second;
  };
  std::ostringstream s;
  s << e.label << " be " << e.description << ".";
  for (const auto& c : e.claims) s << " " << look(c.property) << " " << (c.is_entity ? look(c.value) : c.value) << ".";
  return s.str();
}

struct Confusion {
  double exact = 0, tp = 0, fp = 0, fn = 0;
};

// Per-(node, class) membership counting.
inline Confusion nested_loop_counts(const std::vector<std::vector<ClassId>>& pred,
                                    const std::vector<std::vector<ClassId>>& truth, std::uint32_t q) {
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    bool same = true;
    for (ClassId k = 0; k < q; ++k) {
      bool in_p = false, in_t = false;
      for (ClassId x : pred[i]) in_p = in_p || x == k;
      for (ClassId x : truth[i]) in_t = in_t || x == k;
      if (in_p && in_t) c.tp += 1;
      if (in_p && !in_t) c.fp += 1;
      if (!in_p && in_t) c.fn += 1;
      same = same && in_p == in_t;
    }
    if (same) c.exact += 1;
  }
  return c;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hetprop-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace hetprop::testing
