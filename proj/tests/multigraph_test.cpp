#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace stmod;
using stmod::testing::load_fixture;

TEST(EdgeList, ParsesLabelsInFirstSeenOrder) {
  const auto g = from_edge_list("b a\na c\n");
  ASSERT_EQ(g.vertex_count(), 3u);
  EXPECT_EQ(g.label(0), "b");
  EXPECT_EQ(g.label(1), "a");
  EXPECT_EQ(g.label(2), "c");
  EXPECT_EQ(g.edge(1).u, 1u);
  EXPECT_EQ(g.edge(1).v, 2u);
}

TEST(EdgeList, MultiplicityExpandsToParallelEdges) {
  const auto g = load_fixture("k3_doubled_side");
  EXPECT_EQ(g.vertex_count(), 3u);
  EXPECT_EQ(g.edge_count(), 5u);
  for (EdgeId e = 0; e < 3; ++e) {
    EXPECT_EQ(g.label(g.edge(e).u), "a");
    EXPECT_EQ(g.label(g.edge(e).v), "b");
  }
}

TEST(EdgeList, CommentsAndBlankLines) {
  const auto g = from_edge_list("# header\n\n  x y   # trailing\n\ty z 2\n");
  EXPECT_EQ(g.vertex_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
}

TEST(EdgeList, RejectsMalformedInput) {
  EXPECT_THROW(from_edge_list(""), InputError);
  EXPECT_THROW(from_edge_list("# nothing\n"), InputError);
  EXPECT_THROW(from_edge_list("a\n"), InputError);
  EXPECT_THROW(from_edge_list("a b c d\n"), InputError);
  EXPECT_THROW(from_edge_list("a a\n"), InputError);
  EXPECT_THROW(from_edge_list("a b 0\n"), InputError);
  EXPECT_THROW(from_edge_list("a b -2\n"), InputError);
  EXPECT_THROW(from_edge_list("a b 2.5\n"), InputError);
}

TEST(EdgeList, ErrorNamesTheLine) {
  try {
    from_edge_list("a b\nb c\nc c\n");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(EdgeList, CapsExpandedEdgeCount) {
  EXPECT_NO_THROW(from_edge_list("a b 10\n", 10));
  try {
    from_edge_list("a b 6\nb c 6\n", 10);
    FAIL() << "expected CapExceeded";
  } catch (const CapExceeded& e) {
    EXPECT_EQ(e.actual(), 12u);
    EXPECT_EQ(e.cap(), 10u);
  }
}

TEST(EdgeList, RoundTrip) {
  for (const auto& name : stmod::testing::corpus_names()) {
    const auto g = load_fixture(name);
    const auto h = from_edge_list(to_edge_list(g));
    ASSERT_EQ(h.edge_count(), g.edge_count()) << name;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      EXPECT_EQ(h.label(h.edge(e).u), g.label(g.edge(e).u));
      EXPECT_EQ(h.label(h.edge(e).v), g.label(g.edge(e).v));
    }
  }
}

TEST(Multigraph, ConstructorValidates) {
  EXPECT_THROW(Multigraph({"a", "a"}, {{0, 1}}), InputError);
  EXPECT_THROW(Multigraph({"a", "b"}, {{0, 2}}), InputError);
  EXPECT_THROW(Multigraph({"a", "b"}, {{1, 1}}), InputError);
}

TEST(Multigraph, IncidenceAndLookup) {
  const auto g = load_fixture("fig3a");
  const VertexId c = *g.find_vertex("c");
  EXPECT_EQ(g.incident(c).size(), 3u);
  EXPECT_FALSE(g.find_vertex("zz").has_value());
  EXPECT_EQ(g.other(3, c), *g.find_vertex("d"));
}

TEST(Connectivity, DetectsComponents) {
  const auto g = Multigraph::with_vertices(4, {{0, 1}, {2, 3}});
  EXPECT_FALSE(is_connected(g));
  std::size_t count = 0;
  auto comp = component_labels(g, [](EdgeId) { return true; }, &count);
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(comp[0], comp[1]);
  EXPECT_NE(comp[1], comp[2]);
  EXPECT_THROW(require_connected(g, "test"), InputError);
}

TEST(Biconnected, PendantTriangle) {
  const auto blocks = biconnected_components(load_fixture("fig3a"));
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0], (std::vector<EdgeId>{0, 1, 2}));
  EXPECT_EQ(blocks[1], (std::vector<EdgeId>{3}));
}

TEST(Biconnected, ParallelEdgesShareABlock) {
  const auto g = Multigraph::with_vertices(3, {{0, 1}, {0, 1}, {1, 2}});
  const auto blocks = biconnected_components(g);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0], (std::vector<EdgeId>{0, 1}));
  EXPECT_EQ(blocks[1], (std::vector<EdgeId>{2}));
}

TEST(Biconnected, TwoBlocksJoinedByTwoEdgesAreOneBlock) {
  const auto g = load_fixture("fig4");
  EXPECT_EQ(biconnected_components(g).size(), 1u);
}

TEST(Biconnected, BlocksPartitionTheEdges) {
  for (const auto& name : stmod::testing::corpus_names()) {
    const auto g = load_fixture(name);
    std::vector<int> seen(g.edge_count(), 0);
    for (const auto& block : biconnected_components(g)) {
      for (EdgeId e : block) ++seen[e];
    }
    for (int s : seen) EXPECT_EQ(s, 1) << name;
  }
}

TEST(Subgraphs, VertexInducedKeepsParentIds) {
  const auto g = load_fixture("house");
  const std::vector<VertexId> roof{*g.find_vertex("e"), *g.find_vertex("c"), *g.find_vertex("d")};
  const auto sub = vertex_induced_subgraph(g, roof);
  EXPECT_EQ(sub.graph.vertex_count(), 3u);
  EXPECT_EQ(sub.graph.edge_count(), 3u);
  for (EdgeId e = 0; e < 3; ++e) {
    const auto parent = g.edge(sub.parent_edge[e]);
    EXPECT_EQ(sub.parent_vertex[sub.graph.edge(e).u], parent.u);
    EXPECT_EQ(sub.parent_vertex[sub.graph.edge(e).v], parent.v);
  }
  EXPECT_THROW(vertex_induced_subgraph(g, std::vector<VertexId>{}), InputError);
}

TEST(Subgraphs, EdgeSubgraph) {
  const auto g = load_fixture("fig3a");
  const auto sub = edge_subgraph(g, std::vector<EdgeId>{3});
  EXPECT_EQ(sub.graph.vertex_count(), 2u);
  EXPECT_EQ(sub.parent_edge, (std::vector<EdgeId>{3}));
}

TEST(Contraction, ShrinksCoreAndKeepsMultiplicity) {
  const auto g = load_fixture("fig3b");  // 4-cycle a b c d plus diagonal a c
  const std::vector<VertexId> core{*g.find_vertex("a"), *g.find_vertex("b"), *g.find_vertex("c")};
  const auto c = contract(g, core);
  EXPECT_EQ(c.graph.vertex_count(), 2u);
  EXPECT_EQ(c.graph.edge_count(), 2u);  // c-d and d-a become parallel
  EXPECT_EQ(c.graph.label(c.core_vertex[0]), "*a");
  EXPECT_EQ(c.phi.domain_size(), 2u);
  for (EdgeId f = 0; f < 2; ++f) EXPECT_EQ(c.phi.forward(c.phi.inverse(f)), f);
  EXPECT_FALSE(c.phi.in_domain(0));
}

TEST(Contraction, LabelAvoidsCollisions) {
  const auto g = from_edge_list("a b\nb *a\n");
  const auto c = contract(g, std::vector<VertexId>{0, 1});
  EXPECT_EQ(c.graph.label(c.core_vertex[0]), "*a'");
  EXPECT_EQ(to_edge_list(from_edge_list(to_edge_list(c.graph))), to_edge_list(c.graph));
}

TEST(Contraction, RejectsBadCores) {
  const auto g = load_fixture("fig3b");
  EXPECT_THROW(contract(g, std::vector<VertexId>{*g.find_vertex("b"), *g.find_vertex("d")}), InputError);
  EXPECT_THROW(contract_many(g, {{0, 1}, {1, 2}}), InputError);
}
