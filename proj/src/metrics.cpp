// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dtibench/error.hpp"
#include "dtibench/io.hpp"

namespace dtibench {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::Shape, "scores and labels differ in length");
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorKind::Validation, "NaN score");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorKind::Validation, "labels must be 0 or 1");
  }
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return idx;
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const auto neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::Validation, "AUROC needs both positive and negative labels");

  // Sum of positive midranks (1-based).
  const auto idx = order_by_score(scores, false);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    std::size_t group_pos = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) group_pos += static_cast<std::size_t>(labels[idx[j++]]);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    rank_sum += midrank * static_cast<double>(group_pos);
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

double auprc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (pos == 0) throw Error(ErrorKind::Validation, "AUPRC needs at least one positive label");

  const auto idx = order_by_score(scores, true);
  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) tp += static_cast<std::size_t>(labels[idx[j++]]);
    seen = j;
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

std::string Summary::format(int digits) const {
  return io::format_fixed(mean, digits) + " ± " + io::format_fixed(std, digits);
}

Summary aggregate(std::span<const double> runs) {
  if (runs.empty()) throw Error(ErrorKind::Validation, "aggregate needs at least one run");
  Summary s;
  s.n = runs.size();
  // sorted summation so the result does not depend on run order
  std::vector<double> v(runs.begin(), runs.end());
  std::sort(v.begin(), v.end());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::string leakage_matrix_csv(const LeakageMatrix& m) {
  std::string out = "train";
  for (const auto& d : m.datasets) out += "," + d;
  out += '\n';
  for (Eigen::Index i = 0; i < m.auroc.rows(); ++i) {
    out += m.datasets[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.auroc.cols(); ++j) out += "," + io::format_double(m.auroc(i, j));
    out += '\n';
  }
  return out;
}

std::string leakage_long_csv(const LeakageMatrix& m) {
  std::string out = "train,test,regime,auroc,auprc\n";
  for (Eigen::Index i = 0; i < m.auroc.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.auroc.cols(); ++j) {
      out += m.datasets[static_cast<std::size_t>(i)] + "," + m.datasets[static_cast<std::size_t>(j)] + "," +
             (m.regime(i, j) == LeakageRegime::SameGraph ? "diagonal-same-graph" : "cross-dataset") + "," +
             io::format_double(m.auroc(i, j)) + "," + io::format_double(m.auprc(i, j)) + "\n";
    }
  }
  return out;
}

}  // namespace dtibench
