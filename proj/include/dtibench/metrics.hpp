// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace dtibench {

/// Area under the ROC curve in Mann-Whitney form: the fraction of
/// (positive, negative) pairs ranked correctly, ties counting one half.
/// Labels are 0/1; both classes must be present.
double auroc(std::span<const double> scores, std::span<const int> labels);

/// Average precision, sum over descending thresholds of
/// (R_i - R_{i-1}) * P_i, with tied scores forming one threshold.
double auprc(std::span<const double> scores, std::span<const int> labels);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator, 0 for a single run
  std::size_t n = 0;

  /// "m ± s" with `digits` decimals.
  std::string format(int digits = 3) const;
};

Summary aggregate(std::span<const double> runs);

enum class LeakageRegime { SameGraph, CrossDataset };

/// Rows are training datasets, columns test datasets.
struct LeakageMatrix {
  std::vector<std::string> datasets;
  Eigen::MatrixXd auroc;
  Eigen::MatrixXd auprc;

  LeakageRegime regime(Eigen::Index row, Eigen::Index col) const {
    return row == col ? LeakageRegime::SameGraph : LeakageRegime::CrossDataset;
  }
};

/// Square CSV: header `train,<test names...>`, one row per training dataset.
std::string leakage_matrix_csv(const LeakageMatrix& m);

/// Long form `train,test,regime,auroc,auprc` for heat-map plotting.
std::string leakage_long_csv(const LeakageMatrix& m);

}  // namespace dtibench
