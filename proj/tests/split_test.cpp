// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "dtibench/error.hpp"
#include "dtibench/split.hpp"
#include "support.hpp"

namespace dtibench {
namespace {

std::set<std::string> drugs_of(const std::vector<EdgeRef>& edges) {
  std::set<std::string> s;
  for (const auto& e : edges) s.insert(e.drug);
  return s;
}
std::set<std::string> proteins_of(const std::vector<EdgeRef>& edges) {
  std::set<std::string> s;
  for (const auto& e : edges) s.insert(e.protein);
  return s;
}
bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& x : a)
    if (b.contains(x)) return false;
  return true;
}

// Independent check of the partition and node constraints of one fold.
void expect_valid_fold(const DTIGraph& g, SplitMode mode, const Fold& f) {
  std::set<EdgeRef> all;
  for (const auto* part : {&f.train, &f.val, &f.test})
    for (const auto& e : *part) {
      EXPECT_TRUE(g.has_edge(e.drug, e.protein));
      EXPECT_TRUE(all.insert(e).second) << "edge in two parts";
    }
  EXPECT_EQ(all.size(), g.num_edges());
  std::vector<EdgeRef> train_val = f.train;
  train_val.insert(train_val.end(), f.val.begin(), f.val.end());
  if (mode == SplitMode::Sd) EXPECT_TRUE(disjoint(drugs_of(train_val), drugs_of(f.test)));
  if (mode == SplitMode::St) EXPECT_TRUE(disjoint(proteins_of(train_val), proteins_of(f.test)));
}

TEST(Allocate, LargestRemainderWithFloorOfOne) {
  const std::vector<double> w{0.75, 0.15, 0.10};
  EXPECT_EQ(allocate_counts(100, w), (std::vector<std::size_t>{75, 15, 10}));
  EXPECT_EQ(allocate_counts(3, w), (std::vector<std::size_t>{1, 1, 1}));
  const auto c = allocate_counts(7, w);
  EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::size_t{0}), 7u);
  for (auto x : c) EXPECT_GE(x, 1u);
  try {
    allocate_counts(2, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotEnoughEdges);
  }
}

TEST(Split, AllModesRespectConstraints) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = testing::random_graph(15 + seed % 10, 12 + seed % 7, 0.15, seed);
    for (auto mode : {SplitMode::Sp, SplitMode::Sd, SplitMode::St}) {
      const auto plan = split(g, mode, {}, seed);
      ASSERT_EQ(plan.folds.size(), 1u);
      expect_valid_fold(g, mode, plan.folds[0]);
      EXPECT_FALSE(plan.folds[0].train.empty());
      EXPECT_FALSE(plan.folds[0].val.empty());
      EXPECT_FALSE(plan.folds[0].test.empty());
      EXPECT_TRUE(verify_plan(g, plan).ok());
    }
  }
}

TEST(Split, SpRatiosAreExact) {
  const auto g = testing::random_graph(40, 40, 0.1, 3);
  const auto plan = tvt_baseline_split(g, 3);
  const auto counts = allocate_counts(g.num_edges(), std::vector<double>{0.75, 0.15, 0.10});
  EXPECT_EQ(plan.folds[0].train.size(), counts[0]);
  EXPECT_EQ(plan.folds[0].val.size(), counts[1]);
  EXPECT_EQ(plan.folds[0].test.size(), counts[2]);
}

TEST(Split, SameSeedSamePlan) {
  const auto g = testing::random_graph(30, 25, 0.1, 4);
  for (auto mode : {SplitMode::Sp, SplitMode::Sd, SplitMode::St}) {
    EXPECT_EQ(format_plan_json(split(g, mode, {}, 11)), format_plan_json(split(g, mode, {}, 11)));
    EXPECT_NE(format_plan_json(split(g, mode, {}, 11)), format_plan_json(split(g, mode, {}, 12)));
  }
}

TEST(Split, RejectsBadRatiosAndTinyGraphs) {
  const auto g = testing::random_graph(10, 10, 0.2, 5);
  EXPECT_THROW(split(g, SplitMode::Sp, {0.5, 0.2, 0.2}, 1), Error);
  EXPECT_THROW(split(g, SplitMode::Sp, {1.0, 0.0, 0.0}, 1), Error);
  GraphBuilder b;
  b.add_edge("d", "p");
  try {
    split(b.build(), SplitMode::Sp, {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotEnoughEdges);
  }
  EXPECT_THROW(split(b.build(), SplitMode::Sd, {}, 1), Error);
}

TEST(KFold, TestPortionsPartitionPerRepeat) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = testing::random_graph(25, 20, 0.12, 100 + seed);
    for (auto mode : {SplitMode::Sp, SplitMode::Sd, SplitMode::St}) {
      for (std::size_t k : {2, 5, 10}) {
        const auto plans = kfold(g, mode, {.k = k, .repeats = 2, .val_fraction = 0.1}, seed);
        ASSERT_EQ(plans.size(), 2u);
        for (const auto& plan : plans) {
          ASSERT_EQ(plan.folds.size(), k);
          std::multiset<EdgeRef> tested;
          std::multiset<std::string> tested_nodes;
          for (const auto& f : plan.folds) {
            expect_valid_fold(g, mode, f);
            tested.insert(f.test.begin(), f.test.end());
            if (mode == SplitMode::Sd)
              for (const auto& d : drugs_of(f.test)) tested_nodes.insert(d);
            if (mode == SplitMode::St)
              for (const auto& p : proteins_of(f.test)) tested_nodes.insert(p);
          }
          EXPECT_EQ(tested.size(), g.num_edges());
          EXPECT_EQ(std::set<EdgeRef>(tested.begin(), tested.end()).size(), g.num_edges());
          if (mode == SplitMode::Sd) EXPECT_EQ(tested_nodes.size(), g.num_drugs());
          if (mode == SplitMode::St) EXPECT_EQ(tested_nodes.size(), g.num_proteins());
          EXPECT_TRUE(verify_plan(g, plan).ok());
        }
        EXPECT_NE(format_plan_json(plans[0]), format_plan_json(plans[1]));
      }
    }
  }
}

TEST(KFold, TooFewUnitsIsNotEnoughEdges) {
  const auto g = testing::random_graph(3, 30, 0.3, 6);
  try {
    kfold(g, SplitMode::Sd, {.k = 5, .repeats = 1}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotEnoughEdges);
  }
}

TEST(Verify, DetectsInjectedViolations) {
  const auto g = testing::random_graph(20, 20, 0.15, 7);
  const auto good = split(g, SplitMode::Sd, {}, 7);
  ASSERT_TRUE(verify_plan(g, good).ok());

  auto leaked = good;  // one edge of a test drug moved to train, the drug keeps other test edges
  auto& f = leaked.folds[0];
  std::map<std::string, int> test_degree;
  for (const auto& e : f.test) ++test_degree[e.drug];
  const auto it = std::find_if(f.test.begin(), f.test.end(), [&](const EdgeRef& e) { return test_degree[e.drug] >= 2; });
  ASSERT_NE(it, f.test.end());
  f.train.push_back(*it);
  f.test.erase(it);
  EXPECT_FALSE(verify_plan(g, leaked).ok());

  auto missing = good;
  missing.folds[0].train.pop_back();
  EXPECT_FALSE(verify_plan(g, missing).ok());

  auto foreign = good;
  foreign.folds[0].train.push_back({"ghost", "P0"});
  EXPECT_FALSE(verify_plan(g, foreign).ok());

  auto empty_test = good;
  empty_test.folds[0].train.insert(empty_test.folds[0].train.end(), empty_test.folds[0].test.begin(),
                                   empty_test.folds[0].test.end());
  empty_test.folds[0].test.clear();
  EXPECT_FALSE(verify_plan(g, empty_test).ok());
}

TEST(Verify, CrossFoldTestOverlapIsAViolation) {
  const auto g = testing::random_graph(20, 20, 0.15, 8);
  auto plan = kfold(g, SplitMode::Sp, {.k = 3, .repeats = 1}, 8)[0];
  plan.folds[1].test.push_back(plan.folds[0].test.front());
  EXPECT_FALSE(verify_plan(g, plan).ok());
}

TEST(Plan, JsonRoundTrip) {
  const auto g = testing::random_graph(20, 20, 0.15, 9);
  const auto plan = kfold(g, SplitMode::St, {.k = 3, .repeats = 1}, 9)[0];
  const auto text = format_plan_json(plan);
  const auto back = parse_plan_json(text);
  EXPECT_EQ(back.mode, plan.mode);
  EXPECT_EQ(back.seed, plan.seed);
  EXPECT_EQ(back.folds.size(), plan.folds.size());
  EXPECT_EQ(format_plan_json(back), text);
  EXPECT_THROW(parse_plan_json("{not json"), Error);
}

TEST(AssignByTestNodes, SplitsOnGivenDrugs) {
  GraphBuilder b;
  b.add_edge("d1", "p1");
  b.add_edge("d2", "p1");
  b.add_edge("d2", "p2");
  const auto a = assign_by_test_nodes(b.build(), SplitMode::Sd, {"d2"});
  EXPECT_EQ(a.test.size(), 2u);
  EXPECT_EQ(a.train_val.size(), 1u);
  EXPECT_THROW(assign_by_test_nodes(b.build(), SplitMode::Sp, {"d2"}), Error);
}

TEST(CrossDataset, SharedNodesAreReportedOrRemoved) {
  GraphBuilder a, b;
  a.add_edge("d1", "p1");
  b.add_edge("d1", "p9");
  b.add_edge("d5", "p5");
  const auto r = sc_pair(a.build(), b.build(), false);
  EXPECT_EQ(r.shared_drugs, std::vector<std::string>{"d1"});
  EXPECT_EQ(r.removed_edges, 1u);
  EXPECT_EQ(r.test.num_edges(), 1u);
  try {
    sc_pair(a.build(), b.build(), true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Overlap);
  }
}

}  // namespace
}  // namespace dtibench
