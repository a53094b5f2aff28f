#include "hetprop/apm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstring>
#include <stdexcept>
#include <string>

#include "hetprop/parallel.hpp"

namespace hetprop {

std::string to_string(IsolatedPolicy p) { return p == IsolatedPolicy::zero ? "zero" : "carry"; }
std::string to_string(TypeCombine c) { return c == TypeCombine::mean ? "mean" : "sum"; }

IsolatedPolicy parse_isolated_policy(std::string_view s) {
  if (s == "zero") return IsolatedPolicy::zero;
  if (s == "carry") return IsolatedPolicy::carry;
  throw std::invalid_argument("unknown isolated policy '" + std::string(s) + "' (zero|carry)");
}

TypeCombine parse_type_combine(std::string_view s) {
  if (s == "mean") return TypeCombine::mean;
  if (s == "sum") return TypeCombine::sum;
  throw std::invalid_argument("unknown type combine '" + std::string(s) + "' (mean|sum)");
}

void PropagationStack::push_back(FeatureMatrix hop) { hops_.emplace_back(std::move(hop)); }
void PropagationStack::push_back(MappedFeatures hop) { hops_.emplace_back(std::move(hop)); }

FeatureView PropagationStack::hop(std::size_t k) const {
  return std::visit([](const auto& h) { return h.view(); }, hops_.at(k));
}

bool bitwise_equal(const PropagationStack& a, const PropagationStack& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!bitwise_equal(a.hop(k), b.hop(k))) return false;
  }
  return true;
}

namespace {

void combine_into(FeatureView rel_table, std::span<const TypeId> types, TypeCombine combine,
                  std::span<double> out) {
  if (types.empty()) throw std::invalid_argument("edge_embedding: empty type list");
  std::fill(out.begin(), out.end(), 0.0);
  for (TypeId t : types) {
    if (t >= rel_table.rows()) {
      throw std::out_of_range("edge_embedding: type id " + std::to_string(t) + " >= " +
                              std::to_string(rel_table.rows()));
    }
    auto row = rel_table.row(t);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[j];
  }
  if (combine == TypeCombine::mean && types.size() > 1) {
    const double n = static_cast<double>(types.size());
    for (double& x : out) x /= n;
  }
}

void check_shapes(const HeteroGraph& g, FeatureView rel_table, FeatureView c_k) {
  if (c_k.rows() != g.node_count()) {
    throw std::invalid_argument("propagate: feature rows " + std::to_string(c_k.rows()) +
                                " != node_count " + std::to_string(g.node_count()));
  }
  if (rel_table.dim() != c_k.dim()) {
    throw std::invalid_argument("propagate: relation dim " + std::to_string(rel_table.dim()) +
                                " != feature dim " + std::to_string(c_k.dim()));
  }
  if (rel_table.rows() < g.edge_type_count()) {
    throw std::invalid_argument("propagate: relation table has " + std::to_string(rel_table.rows()) +
                                " rows for " + std::to_string(g.edge_type_count()) + " edge types");
  }
}

// Per-worker scratch reused across destinations.
struct Scratch {
  std::vector<double> embedding;
  std::vector<double> message;
  std::vector<double> scores;
  std::vector<double> acc;
};

// Fills s.scores with q_vu for every in-edge of v.
void score_edges(const HeteroGraph& g, FeatureView rel_table, FeatureView c_k, TypeCombine combine,
                 NodeId v, Scratch& s) {
  const std::size_t d = c_k.dim();
  s.scores.clear();
  for (const Neighbor& nb : g.in_neighbors(v)) {
    combine_into(rel_table, nb.types, combine, s.embedding);
    auto src = c_k.row(nb.src);
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double m = s.embedding[j] * src[j];
      sq += m * m;
    }
    s.scores.push_back(std::sqrt(sq));
  }
}

// Turns s.scores into softmax weights in place.
void softmax_in_place(std::vector<double>& scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double& q : scores) {
    q = std::exp(q - top);
    total += q;
  }
  for (double& q : scores) q /= total;
}

}  // namespace

std::vector<double> edge_embedding(FeatureView rel_table, std::span<const TypeId> types,
                                   TypeCombine combine) {
  std::vector<double> out(rel_table.dim());
  combine_into(rel_table, types, combine, out);
  return out;
}

void propagate_rows(const HeteroGraph& g, FeatureView rel_table, FeatureView c_k,
                    const ApmConfig& cfg, NodeId first, NodeId last, std::span<float> out) {
  const std::size_t d = c_k.dim();
  if (out.size() != (last - first) * d) throw std::invalid_argument("propagate_rows: bad output span");
  Scratch s;
  s.embedding.resize(d);
  s.message.resize(d);
  s.acc.resize(d);
  for (NodeId v = first; v < last; ++v) {
    float* dst = out.data() + (v - first) * d;
    if (g.in_degree(v) == 0) {
      if (cfg.isolated_policy == IsolatedPolicy::carry) {
        auto self = c_k.row(v);
        std::copy(self.begin(), self.end(), dst);
      } else {
        std::fill(dst, dst + d, 0.0f);
      }
      continue;
    }
    // Two passes over the in-edges: scores first, then the weighted sum. The
    // messages are recomputed rather than buffered so scratch stays O(d + deg).
    score_edges(g, rel_table, c_k, cfg.type_combine, v, s);
    softmax_in_place(s.scores);
    std::fill(s.acc.begin(), s.acc.end(), 0.0);
    std::size_t i = 0;
    for (const Neighbor& nb : g.in_neighbors(v)) {
      combine_into(rel_table, nb.types, cfg.type_combine, s.embedding);
      auto src = c_k.row(nb.src);
      const double w = s.scores[i++];
      for (std::size_t j = 0; j < d; ++j) s.acc[j] += w * (s.embedding[j] * src[j]);
    }
    for (std::size_t j = 0; j < d; ++j) dst[j] = static_cast<float>(s.acc[j]);
  }
}

std::vector<double> attention_weights(const HeteroGraph& g, FeatureView rel_table,
                                      FeatureView c_k, const ApmConfig& cfg, NodeId v) {
  check_shapes(g, rel_table, c_k);
  Scratch s;
  s.embedding.resize(c_k.dim());
  score_edges(g, rel_table, c_k, cfg.type_combine, v, s);
  if (!s.scores.empty()) softmax_in_place(s.scores);
  return s.scores;
}

namespace {

FeatureMatrix one_hop(const HeteroGraph& g, FeatureView rel_table, FeatureView c_k,
                      const ApmConfig& cfg) {
  check_shapes(g, rel_table, c_k);
  if (!c_k.all_finite()) throw std::invalid_argument("propagate: non-finite input features");
  if (!rel_table.all_finite()) throw std::invalid_argument("propagate: non-finite relation embeddings");
  const std::size_t d = c_k.dim();
  FeatureMatrix next(c_k.rows(), d);
  parallel_for_ranges(g.node_count(), cfg.workers, [&](std::uint64_t first, std::uint64_t last) {
    propagate_rows(g, rel_table, c_k, cfg, first, last, next.data().subspan(first * d, (last - first) * d));
  });
  if (!next.all_finite()) throw std::overflow_error("propagate: hop produced non-finite values");
  return next;
}

}  // namespace

FeatureMatrix propagate_one_hop(const HeteroGraph& g, FeatureView rel_table, FeatureView c_k,
                                const ApmConfig& cfg) {
  if (cfg.add_reverse) return one_hop(add_reverse_edges(g), rel_table, c_k, cfg);
  return one_hop(g, rel_table, c_k, cfg);
}

PropagationStack propagate(const HeteroGraph& g, FeatureView rel_table, FeatureView x,
                           const ApmConfig& cfg) {
  if (cfg.num_hops < 1) throw std::invalid_argument("propagate: num_hops must be >= 1");
  const HeteroGraph reversed = cfg.add_reverse ? add_reverse_edges(g) : HeteroGraph{};
  const HeteroGraph& graph = cfg.add_reverse ? reversed : g;
  check_shapes(graph, rel_table, x);

  PropagationStack stack;
  stack.push_back(FeatureMatrix(x.rows(), x.dim(), std::vector<float>(x.data().begin(), x.data().end())));
  for (std::uint32_t k = 0; k < cfg.num_hops; ++k) {
    stack.push_back(one_hop(graph, rel_table, stack.hop(k), cfg));
  }
  return stack;
}

// ---------------------------------------------------------------------------

PropagationStack dense_oracle(const HeteroGraph& g, FeatureView rel_table, FeatureView x,
                              const ApmConfig& cfg, std::uint64_t max_nodes) {
  if (g.node_count() > max_nodes) {
    throw std::length_error("dense_oracle: " + std::to_string(g.node_count()) +
                            " nodes exceeds guard " + std::to_string(max_nodes));
  }
  if (cfg.num_hops < 1) throw std::invalid_argument("dense_oracle: num_hops must be >= 1");
  const HeteroGraph graph = cfg.add_reverse ? add_reverse_edges(g) : g;
  check_shapes(graph, rel_table, x);

  const std::size_t n = graph.node_count();
  const std::size_t d = x.dim();
  auto at = [n, d](std::size_t v, std::size_t u, std::size_t j) { return (v * n + u) * d + j; };

  // A_r[v][u] holds the embedding of edge u -> v; mask marks structural edges.
  std::vector<double> relation_adj(n * n * d, 0.0);
  std::vector<char> mask(n * n, 0);
  for (const EdgeRecord& e : graph.edges()) {
    mask[e.dst * n + e.src] = 1;
    for (TypeId t : e.types) {
      for (std::size_t j = 0; j < d; ++j) relation_adj[at(e.dst, e.src, j)] += rel_table(t, j);
    }
    if (cfg.type_combine == TypeCombine::mean && e.types.size() > 1) {
      for (std::size_t j = 0; j < d; ++j) relation_adj[at(e.dst, e.src, j)] /= double(e.types.size());
    }
  }

  PropagationStack stack;
  stack.push_back(FeatureMatrix(x.rows(), d, std::vector<float>(x.data().begin(), x.data().end())));

  std::vector<double> lifted(n * n * d);
  std::vector<double> messages(n * n * d);
  std::vector<double> norms(n * n);
  std::vector<double> coeff(n * n);
  for (std::uint32_t k = 0; k < cfg.num_hops; ++k) {
    FeatureView c = stack.hop(k);
    // H[v][u] = C[u]: the source's features broadcast along destinations.
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t j = 0; j < d; ++j) lifted[at(v, u, j)] = c(u, j);
    // B = A_r (Hadamard) H
    for (std::size_t i = 0; i < messages.size(); ++i) messages[i] = relation_adj[i] * lifted[i];
    // Q = ||B||_2 over the feature axis
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t u = 0; u < n; ++u) {
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) sq += messages[at(v, u, j)] * messages[at(v, u, j)];
        norms[v * n + u] = std::sqrt(sq);
      }
    }
    // Row softmax restricted to structural edges.
    for (std::size_t v = 0; v < n; ++v) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u < n; ++u)
        if (mask[v * n + u]) top = std::max(top, norms[v * n + u]);
      double total = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        coeff[v * n + u] = mask[v * n + u] ? std::exp(norms[v * n + u] - top) : 0.0;
        total += coeff[v * n + u];
      }
      for (std::size_t u = 0; u < n; ++u)
        if (total > 0.0) coeff[v * n + u] /= total;
    }
    // C'[v] = sum_u Qhat[v][u] * B[v][u]
    FeatureMatrix next(n, d);
    for (std::size_t v = 0; v < n; ++v) {
      bool has_edge = false;
      for (std::size_t u = 0; u < n; ++u) has_edge = has_edge || mask[v * n + u];
      for (std::size_t j = 0; j < d; ++j) {
        if (!has_edge) {
          next(v, j) = cfg.isolated_policy == IsolatedPolicy::carry ? c(v, j) : 0.0f;
          continue;
        }
        double acc = 0.0;
        for (std::size_t u = 0; u < n; ++u) acc += coeff[v * n + u] * messages[at(v, u, j)];
        next(v, j) = static_cast<float>(acc);
      }
    }
    stack.push_back(std::move(next));
  }
  return stack;
}

}  // namespace hetprop
