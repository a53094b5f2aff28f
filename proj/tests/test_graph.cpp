#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <set>

#include "hetprop/graph.hpp"
#include "support.hpp"

using namespace hetprop;
using hetprop::testing::random_graph;

namespace {

// (dst, src) -> merged types, straight from the edge list.
std::map<std::pair<NodeId, NodeId>, std::set<TypeId>> scan(const std::vector<EdgeRecord>& edges) {
  std::map<std::pair<NodeId, NodeId>, std::set<TypeId>> out;
  for (const auto& e : edges) out[{e.dst, e.src}].insert(e.types.begin(), e.types.end());
  return out;
}

}  // namespace

TEST(Graph, MatchesEdgeScan) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto rg = random_graph(rng, 30, 6);
    const auto expected = scan(rg.edges);
    ASSERT_EQ(rg.graph.edge_count(), expected.size());
    std::map<std::pair<NodeId, NodeId>, std::set<TypeId>> seen;
    for (NodeId v = 0; v < rg.graph.node_count(); ++v) {
      NodeId last = 0;
      bool first = true;
      for (const Neighbor& nb : rg.graph.in_neighbors(v)) {
        if (!first) {
          EXPECT_LT(last, nb.src);
        }
        first = false;
        last = nb.src;
        EXPECT_TRUE(std::is_sorted(nb.types.begin(), nb.types.end()));
        seen[{v, nb.src}] = std::set<TypeId>(nb.types.begin(), nb.types.end());
      }
    }
    EXPECT_EQ(seen, expected);
  }
}

TEST(Graph, DegreesMatchEdgeScan) {
  std::mt19937_64 rng(12);
  auto rg = random_graph(rng, 40, 4);
  std::vector<std::uint64_t> in(40, 0), out(40, 0);
  for (const auto& [key, types] : scan(rg.edges)) {
    ++in[key.first];
    ++out[key.second];
  }
  for (NodeId v = 0; v < 40; ++v) {
    EXPECT_EQ(rg.graph.in_degree(v), in[v]);
    EXPECT_EQ(rg.graph.out_degree(v), out[v]);
  }
}

TEST(Graph, InputOrderDoesNotMatter) {
  std::mt19937_64 rng(13);
  auto rg = random_graph(rng, 25, 5);
  auto shuffled = rg.edges;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_EQ(build_graph(shuffled, 25, 5), rg.graph);
}

TEST(Graph, DuplicatePairsMergeTypes) {
  std::vector<EdgeRecord> edges{{0, 1, {2}}, {0, 1, {0, 2}}, {1, 0, {1}}};
  auto g = build_graph(edges, 2, 3);
  ASSERT_EQ(g.edge_count(), 2u);
  auto nb = *g.in_neighbors(1).begin();
  EXPECT_EQ(nb.src, 0u);
  EXPECT_EQ(std::vector<TypeId>(nb.types.begin(), nb.types.end()), (std::vector<TypeId>{0, 2}));
}

TEST(Graph, RejectsBadInput) {
  std::vector<EdgeRecord> bad_node{{0, 5, {0}}};
  EXPECT_THROW(build_graph(bad_node, 3, 1), std::out_of_range);
  std::vector<EdgeRecord> bad_type{{0, 1, {4}}};
  EXPECT_THROW(build_graph(bad_type, 3, 2), std::out_of_range);
  std::vector<EdgeRecord> no_type{{0, 1, {}}};
  EXPECT_THROW(build_graph(no_type, 3, 2), std::invalid_argument);
}

TEST(Graph, EmptyGraph) {
  auto g = build_graph({}, 0, 0);
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_EQ(g.edge_count(), 0u);
  auto h = build_graph({}, 4, 2);
  for (NodeId v = 0; v < 4; ++v) EXPECT_TRUE(h.in_neighbors(v).empty());
}

TEST(Graph, EdgesRoundTrip) {
  std::mt19937_64 rng(14);
  auto rg = random_graph(rng, 20, 3);
  auto flat = rg.graph.edges();
  EXPECT_EQ(build_graph(flat, 20, 3), rg.graph);
}

TEST(Graph, ReverseIsSymmetricAndIdempotent) {
  std::mt19937_64 rng(15);
  auto rg = random_graph(rng, 30, 4);
  auto r = add_reverse_edges(rg.graph);
  auto pairs = scan(r.edges());
  for (const auto& [key, types] : pairs) {
    auto back = pairs.find({key.second, key.first});
    ASSERT_NE(back, pairs.end());
  }
  EXPECT_EQ(add_reverse_edges(r), r);
}

TEST(Graph, PermutationRelabels) {
  std::mt19937_64 rng(16);
  auto rg = random_graph(rng, 15, 3);
  std::vector<NodeId> perm(15);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  auto p = permute_nodes(rg.graph, perm);
  auto expected = scan(rg.edges);
  std::map<std::pair<NodeId, NodeId>, std::set<TypeId>> mapped;
  for (const auto& [key, types] : expected) mapped[{perm[key.first], perm[key.second]}] = types;
  EXPECT_EQ(scan(p.edges()), mapped);
}
