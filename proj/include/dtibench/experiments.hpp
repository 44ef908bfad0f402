// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtibench/graph.hpp"
#include "dtibench/metrics.hpp"
#include "dtibench/negsample.hpp"
#include "dtibench/node2vec.hpp"
#include "dtibench/snn.hpp"
#include "dtibench/split.hpp"

namespace dtibench {

struct LabeledPairs {
  std::vector<EdgeRef> pairs;
  std::vector<int> labels;

  std::size_t size() const noexcept { return pairs.size(); }
  void add(EdgeRef pair, int label) {
    pairs.push_back(std::move(pair));
    labels.push_back(label);
  }
};

/// Positives labelled 1 followed by train negatives labelled 0.
LabeledPairs labeled(const SampledDataset& ds);

/// Class-stratified split; each class contributes round(n_c * fraction) pairs
/// to the first part, keeping at least one on each side when n_c >= 2.
std::pair<LabeledPairs, LabeledPairs> stratified_split(const LabeledPairs& all, double fraction, std::uint64_t seed);

/// Same node set as g, only the given edges.
DTIGraph subgraph_with_edges(const DTIGraph& g, std::span<const EdgeRef> edges);

struct GridData {
  LabeledPairs train, val, test;
};

/// Adds 1:1 random non-edges of g to each part of the fold, disjoint across parts.
GridData make_grid_data(const DTIGraph& g, const Fold& fold, std::uint64_t seed);

struct GridLattice {
  std::vector<std::size_t> dims{25, 90, 180, 256, 480, 720};
  std::vector<int> architectures{1, 2, 3, 4};
  std::vector<std::size_t> epochs{2, 5, 10, 50};
  std::vector<std::size_t> batch_divisors{16, 64};  // batch = dataset size / divisor
  std::vector<LossKind> losses{LossKind::Bce, LossKind::Focal};

  std::size_t size() const noexcept {
    return dims.size() * architectures.size() * epochs.size() * batch_divisors.size() * losses.size();
  }
};

void validate(const GridLattice& lattice);

struct GridConfig {
  std::size_t dim = 0;
  int architecture = 1;
  std::size_t epochs = 0;
  std::size_t batch_divisor = 16;
  LossKind loss = LossKind::Bce;

  std::size_t parameters() const { return parameter_count(2 * dim, hidden_width(architecture)); }
};

/// Canonical (dims, architectures, epochs, batch, loss) order, loss fastest.
std::vector<GridConfig> enumerate(const GridLattice& lattice);

struct GridOptions {
  std::size_t runs = 3;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  SNNParams base;  // optimiser and loss settings shared by every cell
};

struct GridRow {
  std::size_t index = 0;  // canonical position
  std::size_t rank = 0;   // 1 = best
  GridConfig config;
  Summary val;
  std::optional<Summary> test;  // winner only
};

struct GridReport {
  std::vector<GridRow> rows;  // ranked
  const GridRow& winner() const { return rows.front(); }
};

/// Embeddings of dimension d for the training graph.
using EmbeddingProvider = std::function<EmbeddingTable(std::size_t dim)>;

/// Every lattice cell trained `runs` times; ranked by mean validation AUROC,
/// ties to fewer parameters then canonical order. Test AUROC is computed for
/// the winner only.
GridReport grid_search(const GridData& data, const EmbeddingProvider& embeddings, const GridLattice& lattice,
                       const GridOptions& options);

std::string grid_csv(const GridReport& report);

struct ExperimentOptions {
  Node2VecParams embedding;
  SNNParams model;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

/// Diagonal: stratified train/test split of one graph's balanced set with
/// embeddings from the full graph. Off-diagonal: model trained on the row
/// graph's balanced set scores the column graph's balanced set in that
/// graph's own embedding space.
LeakageMatrix leakage_matrix(std::span<const DTIGraph> graphs, const ExperimentOptions& options);

/// Test AUROC of an SNN on a stratified split of (positives, train negatives)
/// with the given embedding table.
SampleEvaluator embedding_evaluator(const EmbeddingTable& embeddings, const ExperimentOptions& options);

/// Scorer for holdout pairs: each run trains on the full labelled set.
PairScorer embedding_scorer(const EmbeddingTable& embeddings, const LabeledPairs& training,
                            const ExperimentOptions& options);

}  // namespace dtibench
