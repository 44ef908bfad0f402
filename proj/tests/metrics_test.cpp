// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "dtibench/error.hpp"
#include "dtibench/metrics.hpp"
#include "support.hpp"

namespace dtibench {
namespace {

// O(P * N) pair counting with ties worth one half.
double brute_auroc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return wins / pairs;
}

struct Scored {
  std::vector<double> s;
  std::vector<int> y;
};

Scored random_scored(Rng& rng, std::size_t pos, std::size_t neg, int levels) {
  Scored out;
  for (std::size_t i = 0; i < pos + neg; ++i) {
    const int label = i < pos ? 1 : 0;
    double v = uniform_unit(rng) + 0.3 * label;
    if (levels > 0) v = std::round(v * levels) / levels;  // force ties
    out.s.push_back(v);
    out.y.push_back(label);
  }
  return out;
}

TEST(Auroc, Examples) {
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>{0.9, 0.8, 0.7, 0.1}, std::vector<int>{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>{0.8, 0.3, 0.5, 0.1}, std::vector<int>{1, 1, 0, 0}), 0.75);
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>{0.4, 0.4, 0.4}, std::vector<int>{1, 0, 1}), 0.5);
}

TEST(Auroc, MatchesBruteForcePairCounting) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto pos = 1 + uniform_index(rng, 200), neg = 1 + uniform_index(rng, 200);
    const auto d = random_scored(rng, pos, neg, t % 3 == 0 ? 10 : 0);
    EXPECT_NEAR(auroc(d.s, d.y), brute_auroc(d.s, d.y), 1e-12);
  }
}

TEST(Auroc, InvariantUnderMonotoneTransform) {
  Rng rng(2);
  const auto d = random_scored(rng, 50, 70, 20);
  std::vector<double> t;
  for (double v : d.s) t.push_back(std::exp(3 * v) - 7);
  EXPECT_DOUBLE_EQ(auroc(d.s, d.y), auroc(t, d.y));
}

TEST(Auroc, ComplementSymmetry) {
  Rng rng(3);
  const auto d = random_scored(rng, 30, 40, 5);
  std::vector<int> flipped;
  for (int y : d.y) flipped.push_back(1 - y);
  EXPECT_NEAR(auroc(d.s, d.y), 1 - auroc(d.s, flipped), 1e-12);
}

TEST(Auroc, Errors) {
  EXPECT_THROW(auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), Error);
  EXPECT_THROW(auroc(std::vector<double>{0.1}, std::vector<int>{1, 0}), Error);
  EXPECT_THROW(auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 2}), Error);
  EXPECT_THROW(auroc(std::vector<double>{std::nan(""), 0.2}, std::vector<int>{1, 0}), Error);
}

TEST(Auprc, Examples) {
  EXPECT_DOUBLE_EQ(auprc(std::vector<double>{0.9, 0.8, 0.2}, std::vector<int>{1, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(auprc(std::vector<double>{0.9, 0.8, 0.7, 0.1}, std::vector<int>{0, 0, 0, 1}), 0.25);
  // positives at ranks 1 and 3: (1/1 + 2/3) / 2
  EXPECT_DOUBLE_EQ(auprc(std::vector<double>{0.9, 0.8, 0.7}, std::vector<int>{1, 0, 1}), (1 + 2.0 / 3) / 2);
  // a tie between a positive and a negative is one threshold: precision 1/2
  EXPECT_DOUBLE_EQ(auprc(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}), 0.5);
  EXPECT_THROW(auprc(std::vector<double>{0.5, 0.4}, std::vector<int>{0, 0}), Error);
}

TEST(Auprc, PerfectIffPositivesOutrankNegatives) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    auto d = random_scored(rng, 10, 10, 0);
    const bool separated = *std::min_element(d.s.begin(), d.s.begin() + 10) > *std::max_element(d.s.begin() + 10, d.s.end());
    EXPECT_EQ(auprc(d.s, d.y) == 1.0, separated);
  }
}

TEST(Auprc, RandomScoresApproachPrevalence) {
  Rng rng(5);
  std::vector<int> y(1000, 0);
  for (std::size_t i = 0; i < 200; ++i) y[i] = 1;
  double sum = 0;
  const int trials = 10000;
  std::vector<double> s(y.size());
  for (int t = 0; t < trials; ++t) {
    for (auto& v : s) v = uniform_unit(rng);
    sum += auprc(s, y);
  }
  EXPECT_NEAR(sum / trials, 0.2, 0.02);
}

TEST(Aggregate, Examples) {
  EXPECT_EQ(aggregate(std::vector<double>{0.8}).format(), "0.800 ± 0.000");
  const auto s = aggregate(std::vector<double>{0.7, 0.9});
  EXPECT_NEAR(s.std, std::sqrt(0.02), 1e-15);
  EXPECT_EQ(s.format(), "0.800 ± 0.141");
  EXPECT_EQ(aggregate(std::vector<double>{0.1, 0.5, 0.9}).format(), aggregate(std::vector<double>{0.9, 0.1, 0.5}).format());
  EXPECT_EQ(aggregate(std::vector<double>{0.1, 0.5, 0.9}).mean, aggregate(std::vector<double>{0.9, 0.1, 0.5}).mean);
  EXPECT_THROW(aggregate(std::vector<double>{}), Error);
}

TEST(LeakageCsv, SquareAndLongForms) {
  LeakageMatrix m{{"A", "B"}, Eigen::MatrixXd(2, 2), Eigen::MatrixXd(2, 2)};
  m.auroc << 0.95, 0.5, 0.45, 0.97;
  m.auprc << 0.9, 0.5, 0.5, 0.9;
  EXPECT_EQ(m.regime(0, 0), LeakageRegime::SameGraph);
  EXPECT_EQ(m.regime(0, 1), LeakageRegime::CrossDataset);
  EXPECT_EQ(leakage_matrix_csv(m), "train,A,B\nA,0.95,0.5\nB,0.45,0.97\n");
  const auto lng = leakage_long_csv(m);
  EXPECT_EQ(lng.substr(0, lng.find('\n')), "train,test,regime,auroc,auprc");
  EXPECT_NE(lng.find("A,B,cross-dataset,0.5,0.5"), std::string::npos);
}

}  // namespace
}  // namespace dtibench
