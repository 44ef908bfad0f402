// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtibench/graph.hpp"
#include "dtibench/metrics.hpp"
#include "dtibench/similarity.hpp"

namespace dtibench {

/// RMSD windows in Å: [0, discard_max) is discarded, [discard_max,
/// holdout_max) held out, [holdout_max, train_max] used for training.
struct WindowConfig {
  double discard_max = 2.5;
  double holdout_max = 5.0;
  double train_max = 6.0;
  double widen_limit = 20.0;  // train_max is raised in 1 Å steps up to this
  std::size_t ratio = 1;      // negatives per positive
  std::uint64_t seed = 0;
};

void validate(const WindowConfig& cfg);

enum class NegativeWindow { Train, Holdout, Random };

enum class Provenance {
  Random,          // uniform non-edge
  Window,          // drawn inside the configured train window
  WidenedWindow,   // drawn after raising the window's upper bound
  FallbackRandom,  // no in-window candidate up to widen_limit
};

std::string_view to_string(NegativeWindow w);
std::string_view to_string(Provenance p);

struct NegativeRecord {
  EdgeRef pair;
  std::string anchor_protein;  // target of the positive this negative was drawn for
  double rmsd;                 // RMSD(anchor, pair.protein) in Å, NaN if unknown
  NegativeWindow window = NegativeWindow::Random;
  Provenance provenance = Provenance::Random;
  double t_effective;          // upper bound of the train window actually used, NaN if none
};

struct SampledDataset {
  std::vector<EdgeRef> positives;
  std::vector<NegativeRecord> train_negatives;
  std::vector<NegativeRecord> holdout_negatives;  // evaluation only
  std::size_t unfilled = 0;  // positives for which no negative could be drawn at all

  std::size_t count(Provenance p) const;
};

/// Uniform draw without replacement of ratio * |E| non-edges.
SampledDataset sample_random(const DTIGraph& g, std::size_t ratio, std::uint64_t seed);

/// Structure-aware sampling: for each positive (d, t*) the other proteins are
/// bucketed by RMSD to t*. Holdout pairs come from the middle window; each
/// positive gets `ratio` train negatives (d, t') drawn uniformly from the
/// train window, excluding known positives, holdout pairs and negatives
/// already drawn for d. Empty windows widen by 1 Å, then fall back to a
/// random non-edge of d. NaN (incomparable) entries are never in a window.
SampledDataset sample_rmsd_window(const DTIGraph& g, const SimilarityMatrix& rmsd, const WindowConfig& cfg);

/// `drug_id protein_id label window rmsd provenance`, positives first.
std::string format_sampled_tsv(const SampledDataset& ds);
SampledDataset parse_sampled_tsv(std::string_view text);

/// Trains on a sampled dataset and returns a test AUROC.
using SampleEvaluator = std::function<double(const SampledDataset&, std::uint64_t seed)>;

struct SweepRow {
  std::string label;  // "t=6" or "random"
  double t;           // NaN for the random baseline
  std::vector<double> aurocs;
  Summary summary;
  std::size_t fallbacks = 0;  // widened or random-fallback negatives, summed over repeats
};

/// One row per t plus the random-subsampling baseline.
std::vector<SweepRow> window_sweep(const DTIGraph& g, const SimilarityMatrix& rmsd, std::span<const double> t_values,
                                   const WindowConfig& base, const SampleEvaluator& evaluate, std::size_t repeats,
                                   std::uint64_t seed);

std::string sweep_csv(std::span<const SweepRow> rows);

/// Least-squares slope of mean AUROC against t over the window rows.
double sweep_trend(std::span<const SweepRow> rows);

/// Probability for each pair under a model trained with the given run seed.
using PairScorer = std::function<std::vector<double>(std::span<const EdgeRef>, std::uint64_t run_seed)>;

struct HoldoutScore {
  EdgeRef pair;
  std::vector<double> probabilities;  // one per run
  Summary summary;
};

/// Sorted by mean probability, descending.
std::vector<HoldoutScore> score_holdout(const PairScorer& scorer, std::span<const NegativeRecord> holdout,
                                        std::size_t runs, std::uint64_t seed);

std::string holdout_csv(std::span<const HoldoutScore> rows);

}  // namespace dtibench
