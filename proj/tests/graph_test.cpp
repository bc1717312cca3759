#include "targetflow/graph.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <random>
#include <sstream>

#include "oracles.hpp"

namespace targetflow {
namespace {

TEST(ParseEdgeList, CompactsLabelsByFirstAppearance) {
  auto lg = parse_edge_list("1 2\n2 3\n");
  EXPECT_EQ(lg.graph.node_count(), 3u);
  EXPECT_EQ(lg.graph, DiGraph(3, {{0, 1}, {1, 2}}));
  EXPECT_EQ(lg.labels, (std::vector<Label>{1, 2, 3}));
  EXPECT_EQ(lg.ids.at(3), 2u);
}

TEST(ParseEdgeList, SkipsCommentsAndKeepsSelfLoops) {
  auto lg = parse_edge_list("# c\n5 5\n");
  EXPECT_EQ(lg.graph.node_count(), 1u);
  EXPECT_EQ(lg.graph, DiGraph(1, {{0, 0}}));
}

TEST(ParseEdgeList, BlankLinesAndDuplicates) {
  auto lg = parse_edge_list("\n  \n7 3\n7 3\n\t7   3  \n");
  EXPECT_EQ(lg.graph.edge_count(), 1u);
  EXPECT_EQ(lg.labels, (std::vector<Label>{7, 3}));
}

TEST(ParseEdgeList, CanonicalFixtureFile) {
  std::ifstream in(TARGETFLOW_TEST_DATA "/canonical_edges.txt");
  ASSERT_TRUE(in);
  auto lg = parse_edge_list(in);
  EXPECT_EQ(lg.graph.node_count(), 9u);
  EXPECT_EQ(lg.graph.edge_count(), 13u);
  const DiGraph canonical = testing::canonical_graph();
  for (const Edge& e : canonical.edges()) {
    EXPECT_TRUE(lg.graph.has_edge(lg.ids.at(e.tail + 1), lg.ids.at(e.head + 1)));
  }
}

TEST(ParseEdgeList, ReportsLineNumbers) {
  try {
    parse_edge_list("1 2\n3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_edge_list("1 2 3\n"), ParseError);
  EXPECT_THROW(parse_edge_list("1 x\n"), ParseError);
  EXPECT_THROW(parse_edge_list("-1 2\n"), ParseError);
  EXPECT_THROW(parse_edge_list("1.5 2\n"), ParseError);
}

TEST(ParseTargetList, MapsLabelsAndRejectsUnknown) {
  auto lg = parse_edge_list("10 20\n20 30\n");
  std::istringstream ok("30\n10\n");
  EXPECT_EQ(parse_target_list(ok, lg), TargetSet({0, 2}, 3));
  std::istringstream bad("40\n");
  EXPECT_THROW(parse_target_list(bad, lg), InvalidInput);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(parse_target_list(empty, lg), InvalidInput);
}

TEST(ParseEdgeList, ReserializeRoundTrip) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    DiGraph g = testing::random_graph(1 + trial % 9, trial % 17, rng);
    std::ostringstream out;
    write_edge_list(out, g);
    auto once = parse_edge_list(out.str());
    std::ostringstream again;
    write_edge_list(again, once.graph, once.labels);
    auto twice = parse_edge_list(again.str());
    EXPECT_EQ(once.graph, twice.graph);
    EXPECT_EQ(once.labels, twice.labels);
  }
}

TEST(DiGraph, AdjacencyMirrorsEdges) {
  DiGraph g(4, {{0, 1}, {0, 2}, {2, 2}, {3, 0}, {0, 1}});
  EXPECT_EQ(g.edge_count(), 4u);
  EXPECT_EQ(g.out_neighbors(0).size(), 2u);
  EXPECT_EQ(g.in_neighbors(2).size(), 2u);
  EXPECT_TRUE(g.has_edge(2, 2));
  EXPECT_FALSE(g.has_edge(1, 0));
  EXPECT_THROW(DiGraph(2, {{0, 2}}), InvalidInput);
}

TEST(TargetSet, Validation) {
  EXPECT_THROW(TargetSet({}, 3), InvalidInput);
  EXPECT_THROW(TargetSet({3}, 3), InvalidInput);
  EXPECT_THROW(TargetSet({1, 1}, 3), InvalidInput);
  TargetSet s({2, 0}, 3);
  EXPECT_EQ(s.members()[0], 0u);
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(1));
}

TEST(FromAdjacency, ColumnFeedsRow) {
  EXPECT_EQ(from_adjacency<int>({{1, 0}, {0, 1}}), DiGraph(2, {{0, 0}, {1, 1}}));
  EXPECT_EQ(from_adjacency<int>({{0, 0}, {1, 0}}), DiGraph(2, {{0, 1}}));
  EXPECT_THROW(from_adjacency<int>({{0, 0}, {1}}), InvalidInput);
}

TEST(FromAdjacency, PrintedExampleMatrixPlusThreeToSix) {
  // The printed example matrix; the entry A[6][3] (edge 3 -> 6) is added so
  // that the matrix agrees with the reported cover.
  std::vector<std::vector<int>> a = {
      {0, 0, 0, 0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 1, 0, 0, 0}, {0, 1, 0, 0, 0, 1, 0, 0, 0},
      {0, 0, 1, 0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 0, 0, 0, 1},
      {0, 0, 0, 0, 0, 1, 0, 0, 1}, {0, 0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 1, 0, 1, 0}};
  DiGraph printed = from_adjacency(a);
  EXPECT_EQ(printed.edge_count(), 12u);
  EXPECT_FALSE(printed.has_edge(2, 5));
  a[5][2] = 1;
  EXPECT_EQ(from_adjacency(a), testing::canonical_graph());
}

TEST(FromAdjacency, RoundTripsRandomGraphs) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    DiGraph g = testing::random_graph(1 + trial % 8, trial % 20, rng);
    EXPECT_EQ(from_adjacency(to_adjacency(g)), g);
  }
}

void expect_simple(const DiGraph& g) {
  std::set<Edge> seen;
  for (const Edge& e : g.edges()) {
    EXPECT_NE(e.tail, e.head);
    EXPECT_TRUE(seen.insert(e).second);
  }
}

TEST(GenerateEr, EdgeCountAndDeterminism) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    DiGraph g = generate_er(1000, 3.0, seed);
    EXPECT_EQ(g.edge_count(), 1500u);
    expect_simple(g);
  }
  EXPECT_EQ(generate_er(2, 2.0, 5), DiGraph(2, {{0, 1}, {1, 0}}));
  EXPECT_EQ(generate_er(100, 4.0, 7), generate_er(100, 4.0, 7));
  EXPECT_NE(generate_er(100, 4.0, 7), generate_er(100, 4.0, 8));
  EXPECT_EQ(generate_er(1, 0.0, 1).edge_count(), 0u);
  EXPECT_THROW(generate_er(3, 5.0, 1), InvalidInput);
  EXPECT_THROW(generate_er(0, 1.0, 1), InvalidInput);
  EXPECT_THROW(generate_er(5, -1.0, 1), InvalidInput);
}

TEST(GenerateSf, EdgeCountGuardsAndDeterminism) {
  DiGraph g = generate_sf(1000, 3.0, 3.0, 1);
  EXPECT_EQ(g.edge_count(), 1500u);
  expect_simple(g);
  EXPECT_EQ(generate_sf(200, 3.0, 3.0, 4), generate_sf(200, 3.0, 3.0, 4));
  EXPECT_THROW(generate_sf(100, 3.0, 2.0, 1), InvalidInput);
  EXPECT_THROW(generate_sf(1, 3.0, 3.0, 1), InvalidInput);
  // Two nodes hold only two ordered pairs; asking for more must fail.
  EXPECT_THROW(generate_sf(2, 3.0, 3.0, 1), InvalidInput);
}

std::size_t max_total_degree(const DiGraph& g) {
  std::size_t best = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    best = std::max(best, g.out_neighbors(v).size() + g.in_neighbors(v).size());
  }
  return best;
}

TEST(GenerateSf, HeavierTailThanEr) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    EXPECT_GT(max_total_degree(generate_sf(1000, 3.0, 3.0, seed)),
              max_total_degree(generate_er(1000, 3.0, seed)))
        << "seed " << seed;
  }
}

}  // namespace
}  // namespace targetflow
