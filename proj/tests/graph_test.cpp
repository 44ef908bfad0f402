// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <queue>

#include "dtibench/error.hpp"
#include "dtibench/graph.hpp"
#include "dtibench/io.hpp"
#include "support.hpp"

namespace dtibench {
namespace {

using testing::TempDir;

// Breadth-first component count over an explicit adjacency list.
std::size_t bfs_components(const DTIGraph& g) {
  const std::size_t nd = g.num_drugs(), n = g.num_nodes();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.drug].push_back(nd + e.protein);
    adj[nd + e.protein].push_back(e.drug);
  }
  std::vector<char> seen(n, 0);
  std::size_t components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++components;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      for (auto w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
    }
  }
  return components;
}

TEST(Builder, SortsAndDeduplicates) {
  GraphBuilder b("toy");
  EXPECT_TRUE(b.add_edge("d2", "p1"));
  EXPECT_TRUE(b.add_edge("d1", "p2"));
  EXPECT_FALSE(b.add_edge("d2", "p1"));
  const auto g = b.build();
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.drugs()[0], "d1");
  EXPECT_TRUE(g.has_edge("d2", "p1"));
  EXPECT_FALSE(g.has_edge("d1", "p1"));
  EXPECT_FALSE(g.has_edge("nope", "p1"));
  EXPECT_EQ(b.duplicate_edges(), 1u);
}

TEST(Builder, RejectsBadIds) {
  GraphBuilder b;
  EXPECT_THROW(b.add_drug(""), Error);
  EXPECT_THROW(b.add_protein("a b"), Error);
}

TEST(Builder, NeighborsAreConsistent) {
  const auto g = testing::random_graph(20, 30, 0.1, 5);
  std::size_t from_drugs = 0;
  for (std::uint32_t d = 0; d < g.num_drugs(); ++d)
    for (auto p : g.drug_neighbors(d)) {
      EXPECT_TRUE(g.has_edge(d, p));
      ++from_drugs;
    }
  std::size_t from_proteins = 0;
  for (std::uint32_t p = 0; p < g.num_proteins(); ++p) from_proteins += g.protein_neighbors(p).size();
  EXPECT_EQ(from_drugs, g.num_edges());
  EXPECT_EQ(from_proteins, g.num_edges());
}

TEST(EdgeList, LoadsCommentsBlanksAndDuplicates) {
  TempDir dir;
  io::write_text(dir / "nr.tsv", "# drug\tprotein\n\nD1\tP1\nD1\tP2\nD1\tP1\nD2\tP2\textra\n");
  const auto load = load_edge_list(dir / "nr.tsv");
  EXPECT_EQ(load.graph.name(), "nr");
  EXPECT_EQ(load.rows, 4u);
  EXPECT_EQ(load.duplicate_rows, 1u);
  EXPECT_EQ(load.graph.num_edges(), 3u);
}

TEST(EdgeList, SwapColumns) {
  TempDir dir;
  io::write_text(dir / "x.tsv", "P1\tD1\n");
  const auto g = load_edge_list(dir / "x.tsv", {.swap_columns = true, .name = "x"}).graph;
  EXPECT_TRUE(g.has_edge("D1", "P1"));
}

TEST(EdgeList, ReportsLineOfMalformedRow) {
  TempDir dir;
  io::write_text(dir / "bad.tsv", "D1\tP1\nD2\n");
  try {
    load_edge_list(dir / "bad.tsv");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  io::write_text(dir / "empty.tsv", "# nothing\n");
  EXPECT_THROW(load_edge_list(dir / "empty.tsv"), Error);
}

TEST(EdgeList, SaveRoundTrips) {
  TempDir dir;
  const auto g = testing::random_graph(15, 12, 0.2, 9, "rt");
  save_edge_list(g, dir / "rt.tsv");
  const auto back = load_edge_list(dir / "rt.tsv").graph;
  EXPECT_EQ(back.edge_refs(), g.edge_refs());
  EXPECT_EQ(format_edge_list(back), format_edge_list(g));
}

TEST(Stats, DensityMatchesHandCount) {
  GraphBuilder b("tiny");
  b.add_edge("d1", "p1");
  b.add_edge("d1", "p2");
  b.add_drug("d2");
  const auto s = compute_stats(b.build());
  EXPECT_EQ(s.n_nodes, 4u);
  EXPECT_DOUBLE_EQ(s.density_pct, 100.0 * 2 / 6);
  EXPECT_EQ(s.n_components, 2u);
  EXPECT_EQ(compute_stats(b.build(), {.count_isolated_components = false}).n_components, 1u);
}

TEST(Stats, ComponentsMatchBreadthFirstSearch) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GraphBuilder b;
    Rng rng(seed);
    const std::size_t nd = 5 + uniform_index(rng, 20), np = 5 + uniform_index(rng, 20);
    for (std::size_t d = 0; d < nd; ++d) b.add_drug(testing::drug_id(d));
    for (std::size_t p = 0; p < np; ++p) b.add_protein(testing::protein_id(p));
    const auto m = uniform_index(rng, 30);
    for (std::size_t k = 0; k < m; ++k)
      b.add_edge(testing::drug_id(uniform_index(rng, nd)), testing::protein_id(uniform_index(rng, np)));
    const auto g = b.build();
    EXPECT_EQ(compute_stats(g).n_components, bfs_components(g)) << "seed " << seed;
  }
}

TEST(Stats, CsvHeaderAndRounding) {
  GraphStats s{54, 26, 80, 90, 100.0 * 90 / 3160, 10};
  EXPECT_EQ(stats_csv("NR", s),
            "Dataset,Number of drugs,Number of proteins,Total number of nodes,Total number of edges,"
            "Density (%),# of connected components\nNR,54,26,80,90,2.85,10\n");
}

TEST(Affinity, StrictThresholdOnMinimumKd) {
  const std::vector<AffinityRecord> recs{
      {"d1", "p1", 29.9}, {"d1", "p2", 30.0}, {"d2", "p1", 50.0}, {"d2", "p1", 10.0}, {"d3", "p3", 1000.0}};
  const auto g = binarize_affinities(recs, 30.0, "aff");
  EXPECT_TRUE(g.has_edge("d1", "p1"));
  EXPECT_FALSE(g.has_edge("d1", "p2"));
  EXPECT_TRUE(g.has_edge("d2", "p1"));
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.num_drugs(), 3u);
  EXPECT_EQ(g.num_proteins(), 3u);
  const std::vector<AffinityRecord> bad{{"d1", "p1", -1.0}};
  EXPECT_THROW(binarize_affinities(bad), Error);
  EXPECT_THROW(binarize_affinities(recs, 0.0), Error);
}

TEST(Affinity, LoadsTable) {
  TempDir dir;
  io::write_text(dir / "kd.tsv", "# d p kd\nd1\tp1\t5\nd2\tp1\t100\n");
  const auto recs = load_affinity_table(dir / "kd.tsv");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_DOUBLE_EQ(recs[1].kd, 100.0);
  io::write_text(dir / "bad.tsv", "d1\tp1\tx\n");
  EXPECT_THROW(load_affinity_table(dir / "bad.tsv"), ParseError);
}

TEST(Degree, HistogramCountsEveryNode) {
  const auto g = testing::random_graph(30, 20, 0.1, 11);
  std::size_t drugs = 0, edges = 0;
  for (auto [deg, count] : degree_histogram(g, NodeKind::Drug)) {
    drugs += count;
    edges += deg * count;
  }
  EXPECT_EQ(drugs, g.num_drugs());
  EXPECT_EQ(edges, g.num_edges());
  EXPECT_EQ(degree_histogram_csv({{1, 3}, {4, 1}}).substr(0, 6), "degree");
}

TEST(Ablation, RemoveNodesDropsIncidentEdges) {
  GraphBuilder b;
  b.add_edge("d1", "p1");
  b.add_edge("d2", "p1");
  b.add_edge("d2", "p2");
  const auto g = remove_nodes(b.build(), {"d2"}, {}, "ablated");
  EXPECT_EQ(g.num_drugs(), 1u);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.name(), "ablated");
}

}  // namespace
}  // namespace dtibench
