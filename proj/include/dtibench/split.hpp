// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtibench/graph.hpp"

namespace dtibench {

/// Sp: pairs disjoint. Sd: drugs disjoint between train+val and test.
/// St: proteins disjoint between train+val and test.
enum class SplitMode { Sp, Sd, St };

std::string_view to_string(SplitMode mode);
SplitMode parse_split_mode(std::string_view text);

struct SplitRatios {
  double train = 0.75;
  double val = 0.15;
  double test = 0.10;
};

/// Edge sets of one fold, each sorted.
struct Fold {
  std::vector<EdgeRef> train;
  std::vector<EdgeRef> val;
  std::vector<EdgeRef> test;
};

struct FoldPlan {
  SplitMode mode = SplitMode::Sp;
  std::uint64_t seed = 0;
  std::size_t repeat = 0;
  SplitRatios ratios;
  std::vector<Fold> folds;
};

/// Largest-remainder apportionment of `total` items by `weights`, then every
/// part lifted to >= 1 by taking from the largest part. Throws
/// NotEnoughEdges when total < number of parts.
std::vector<std::size_t> allocate_counts(std::size_t total, std::span<const double> weights);

/// Single train/val/test fold honouring the mode constraint. Sd/St pack nodes
/// by degree so edge fractions track the ratios; val is carved from the
/// train side afterwards.
FoldPlan split(const DTIGraph& g, SplitMode mode, const SplitRatios& ratios, std::uint64_t seed);

/// Sp split with ratios (0.75, 0.15, 0.10).
FoldPlan tvt_baseline_split(const DTIGraph& g, std::uint64_t seed);

/// Partitions edges given an explicit set of test nodes (drugs for Sd,
/// proteins for St). Sp is rejected.
struct NodeAssignment {
  std::vector<EdgeRef> train_val;
  std::vector<EdgeRef> test;
};
NodeAssignment assign_by_test_nodes(const DTIGraph& g, SplitMode mode, const std::set<std::string>& test_nodes);

struct KFoldOptions {
  std::size_t k = 10;
  std::size_t repeats = 5;
  double val_fraction = 0.0;  // share of each fold's training side carved into val
};

/// One plan per repeat, each with k folds whose test portions partition the
/// edges (Sp), drugs (Sd) or proteins (St).
std::vector<FoldPlan> kfold(const DTIGraph& g, SplitMode mode, const KFoldOptions& options, std::uint64_t seed);

struct PlanVerification {
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Recomputes every plan invariant from the raw edge lists.
PlanVerification verify_plan(const DTIGraph& g, const FoldPlan& plan);

std::string format_plan_json(const FoldPlan& plan);
FoldPlan parse_plan_json(std::string_view text);

/// Cross-dataset pairing report. In permissive mode `test` has the shared
/// nodes and their edges removed.
struct ScReport {
  std::vector<std::string> shared_drugs;
  std::vector<std::string> shared_proteins;
  std::size_t removed_edges = 0;
  DTIGraph test;
};

ScReport sc_pair(const DTIGraph& train, const DTIGraph& test, bool strict);

}  // namespace dtibench
