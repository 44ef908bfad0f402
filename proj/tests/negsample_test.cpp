// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <set>

#include "dtibench/error.hpp"
#include "dtibench/negsample.hpp"
#include "support.hpp"

namespace dtibench {
namespace {

// Proteins on a line: RMSD(i, j) = |x_i - x_j|.
SimilarityMatrix line_rmsd(const DTIGraph& g, const std::vector<double>& x) {
  SimilarityMatrix m{SimilarityKind::Rmsd, {}, {}};
  for (const auto& p : g.proteins()) m.ids.push_back(p);
  const auto n = static_cast<Eigen::Index>(x.size());
  m.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m.values(i, j) = std::abs(x[i] - x[j]);
  return m;
}

std::vector<double> random_positions(Rng& rng, std::size_t n, double span) {
  std::vector<double> x(n);
  for (auto& v : x) v = uniform_real(rng, 0, span);
  return x;
}

TEST(RandomSampler, UniformOverNonEdges) {
  GraphBuilder b("toy");
  for (int i = 0; i < 5; ++i) b.add_edge(testing::drug_id(i), testing::protein_id(i));  // 5 edges, 20 non-edges
  const auto g = b.build();
  std::map<EdgeRef, std::size_t> counts;
  std::size_t draws = 0;
  for (std::uint64_t seed = 0; draws < 100000; ++seed) {
    const auto ds = sample_random(g, 1, seed);
    ASSERT_EQ(ds.train_negatives.size(), 5u);
    std::set<EdgeRef> distinct;
    for (const auto& n : ds.train_negatives) {
      ASSERT_FALSE(g.has_edge(n.pair.drug, n.pair.protein));
      ASSERT_TRUE(distinct.insert(n.pair).second);
      ++counts[n.pair];
      ++draws;
    }
  }
  ASSERT_EQ(counts.size(), 20u);
  const double expected = static_cast<double>(draws) / 20;
  double chi2 = 0;
  for (const auto& [pair, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(19);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001) << "chi2 = " << chi2;
}

TEST(RandomSampler, RatioAndErrors) {
  const auto g = testing::random_graph(20, 20, 0.1, 1);
  const auto ds = sample_random(g, 2, 1);
  EXPECT_EQ(ds.train_negatives.size(), 2 * g.num_edges());
  EXPECT_EQ(ds.count(Provenance::Random), ds.train_negatives.size());
  GraphBuilder full;
  full.add_edge("d", "p");
  try {
    sample_random(full.build(), 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientNonEdges);
  }
}

TEST(RandomSampler, SameSeedSameSample) {
  const auto g = testing::random_graph(30, 30, 0.1, 2);
  EXPECT_EQ(format_sampled_tsv(sample_random(g, 1, 5)), format_sampled_tsv(sample_random(g, 1, 5)));
  EXPECT_NE(format_sampled_tsv(sample_random(g, 1, 5)), format_sampled_tsv(sample_random(g, 1, 6)));
}

TEST(WindowSampler, NegativesLieInTheirWindows) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto g = testing::random_graph(25, 60, 0.05, seed);
    const auto rmsd = line_rmsd(g, random_positions(rng, g.num_proteins(), 30));
    for (double t : {6.0, 9.0, 14.0}) {
      WindowConfig cfg;
      cfg.train_max = t;
      cfg.seed = seed;
      const auto ds = sample_rmsd_window(g, rmsd, cfg);
      std::size_t fallbacks = 0;
      std::set<EdgeRef> train_pairs;
      for (const auto& n : ds.train_negatives) {
        EXPECT_FALSE(g.has_edge(n.pair.drug, n.pair.protein));
        EXPECT_TRUE(train_pairs.insert(n.pair).second) << "duplicate negative";
        const double r = rmsd.values(*rmsd.index_of(n.anchor_protein), *rmsd.index_of(n.pair.protein));
        EXPECT_EQ(r, n.rmsd);
        if (n.provenance == Provenance::Window) {
          EXPECT_GE(n.rmsd, 5.0);
          EXPECT_LE(n.rmsd, t);
        } else if (n.provenance == Provenance::WidenedWindow) {
          EXPECT_GT(n.t_effective, t);
          EXPECT_GE(n.rmsd, 5.0);
          EXPECT_LE(n.rmsd, n.t_effective);
          ++fallbacks;
        } else {
          ++fallbacks;
        }
      }
      std::set<EdgeRef> holdout;
      for (const auto& n : ds.holdout_negatives) {
        EXPECT_FALSE(g.has_edge(n.pair.drug, n.pair.protein));
        EXPECT_GE(n.rmsd, 2.5);
        EXPECT_LT(n.rmsd, 5.0);
        holdout.insert(n.pair);
      }
      for (const auto& p : train_pairs) EXPECT_FALSE(holdout.contains(p));
      EXPECT_EQ(ds.train_negatives.size() + ds.unfilled, ds.positives.size());
      if (fallbacks == 0 && ds.unfilled == 0) EXPECT_EQ(ds.train_negatives.size(), ds.positives.size());
    }
  }
}

TEST(WindowSampler, HandBuiltExample) {
  // d1 binds p0. p1 is 1 Å from p0 (discarded), p2 3 Å (holdout), p3 5.5 Å
  // (train window), p4 8 Å (outside t = 6).
  GraphBuilder b;
  b.add_edge("d1", "p0");
  for (int i = 1; i <= 4; ++i) b.add_protein("p" + std::to_string(i));
  const auto g = b.build();
  const auto rmsd = line_rmsd(g, {0, 1, 3, 5.5, 8});
  const auto ds = sample_rmsd_window(g, rmsd, {});
  ASSERT_EQ(ds.train_negatives.size(), 1u);
  EXPECT_EQ(ds.train_negatives[0].pair.protein, "p3");
  EXPECT_EQ(ds.train_negatives[0].provenance, Provenance::Window);
  ASSERT_EQ(ds.holdout_negatives.size(), 1u);
  EXPECT_EQ(ds.holdout_negatives[0].pair.protein, "p2");
}

TEST(WindowSampler, WidensThenFallsBack) {
  GraphBuilder b;
  b.add_edge("d1", "p0");
  b.add_protein("p1");
  b.add_protein("p2");
  const auto widened = [&] {
    const auto g = b.build();
    return sample_rmsd_window(g, line_rmsd(g, {0, 8.5, 1}), {});
  }();
  ASSERT_EQ(widened.train_negatives.size(), 1u);
  EXPECT_EQ(widened.train_negatives[0].provenance, Provenance::WidenedWindow);
  EXPECT_DOUBLE_EQ(widened.train_negatives[0].t_effective, 9.0);

  const auto g = b.build();
  const auto fallback = sample_rmsd_window(g, line_rmsd(g, {0, 30, 1}), {});
  ASSERT_EQ(fallback.train_negatives.size(), 1u);
  EXPECT_EQ(fallback.train_negatives[0].provenance, Provenance::FallbackRandom);
  EXPECT_EQ(fallback.count(Provenance::FallbackRandom), 1u);
}

TEST(WindowSampler, IncomparablePairsNeverEnterAWindow) {
  GraphBuilder b;
  b.add_edge("d1", "p0");
  b.add_protein("p1");
  b.add_protein("p2");
  const auto g = b.build();
  auto m = line_rmsd(g, {0, 5.5, 30});
  m.values(0, 1) = m.values(1, 0) = std::nan("");
  const auto ds = sample_rmsd_window(g, m, {});
  ASSERT_EQ(ds.train_negatives.size(), 1u);
  EXPECT_EQ(ds.train_negatives[0].provenance, Provenance::FallbackRandom);
}

TEST(WindowSampler, ErrorsOnMissingProteinAndBadConfig) {
  const auto g = testing::random_graph(5, 5, 0.3, 3);
  SimilarityMatrix m{SimilarityKind::Rmsd, {"P0"}, Eigen::MatrixXd::Zero(1, 1)};
  try {
    sample_rmsd_window(g, m, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingNode);
  }
  WindowConfig bad;
  bad.train_max = 4.0;
  EXPECT_THROW(validate(bad), Error);
}

TEST(WindowSampler, TsvRoundTrip) {
  Rng rng(4);
  const auto g = testing::random_graph(15, 30, 0.08, 4);
  const auto ds = sample_rmsd_window(g, line_rmsd(g, random_positions(rng, g.num_proteins(), 25)), {});
  const auto text = format_sampled_tsv(ds);
  EXPECT_EQ(text.substr(0, text.find('\n')), "drug_id\tprotein_id\tlabel\twindow\trmsd\tprovenance");
  EXPECT_EQ(format_sampled_tsv(parse_sampled_tsv(text)), text);
}

TEST(Sweep, OneRowPerWindowPlusRandom) {
  Rng rng(5);
  const auto g = testing::random_graph(20, 40, 0.06, 5);
  const auto rmsd = line_rmsd(g, random_positions(rng, g.num_proteins(), 25));
  std::vector<double> ts;
  for (int t = 6; t <= 20; ++t) ts.push_back(t);
  std::size_t calls = 0;
  const SampleEvaluator eval = [&](const SampledDataset& ds, std::uint64_t) {
    ++calls;
    return static_cast<double>(ds.train_negatives.size()) / static_cast<double>(ds.positives.size() + 1);
  };
  const auto rows = window_sweep(g, rmsd, ts, {}, eval, 3, 9);
  ASSERT_EQ(rows.size(), 16u);
  EXPECT_EQ(calls, 48u);
  EXPECT_EQ(rows.front().label, "t=6");
  EXPECT_EQ(rows.back().label, "random");
  EXPECT_TRUE(std::isnan(rows.back().t));
  const auto csv = sweep_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "window,t,auroc_mean,auroc_std,auroc,fallbacks");
}

TEST(Sweep, TrendIsLeastSquaresSlope) {
  std::vector<SweepRow> rows;
  for (int t = 6; t <= 8; ++t) rows.push_back({"t=" + std::to_string(t), double(t), {}, {1.0 - 0.1 * t, 0, 1}, 0});
  rows.push_back({"random", std::nan(""), {}, {0.5, 0, 1}, 0});
  EXPECT_NEAR(sweep_trend(rows), -0.1, 1e-12);
}

TEST(Holdout, RankedByMeanProbability) {
  std::vector<NegativeRecord> holdout{
      {{"d1", "p1"}, "p0", 3.0, NegativeWindow::Holdout, Provenance::Window, std::nan("")},
      {{"d2", "p2"}, "p0", 4.0, NegativeWindow::Holdout, Provenance::Window, std::nan("")}};
  const PairScorer scorer = [](std::span<const EdgeRef> pairs, std::uint64_t seed) {
    std::vector<double> out;
    for (const auto& p : pairs) out.push_back(p.drug == "d2" ? 0.9 : 0.1 + 0.01 * static_cast<double>(seed % 3));
    return out;
  };
  const auto rows = score_holdout(scorer, holdout, 5, 1);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].pair.drug, "d2");
  EXPECT_EQ(rows[0].probabilities.size(), 5u);
  const auto csv = holdout_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "drug_id,protein_id,run1,run2,run3,run4,run5,mean,std");
}

}  // namespace
}  // namespace dtibench
