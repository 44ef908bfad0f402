// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <limits>

#include "dtibench/align.hpp"
#include "support.hpp"

namespace dtibench {
namespace {

// Score of an explicit alignment: substitution scores for matched columns and
// open + (L - 1) * extend for each maximal run of gaps in the same sequence.
double rescore(const std::string& a, const std::string& b, const GapPenalties& gaps) {
  double s = 0;
  char prev = 'M';
  for (std::size_t i = 0; i < a.size(); ++i) {
    const char state = a[i] == '-' ? 'A' : (b[i] == '-' ? 'B' : 'M');
    if (state == 'M')
      s += blosum62(a[i], b[i]);
    else
      s += state == prev ? gaps.extend : gaps.open;
    prev = state;
  }
  return s;
}

// Best score over every global alignment, by recursion over column choices.
void enumerate(const std::string& a, const std::string& b, std::size_t i, std::size_t j, std::string& ra,
               std::string& rb, const GapPenalties& gaps, double& best) {
  if (i == a.size() && j == b.size()) {
    best = std::max(best, rescore(ra, rb, gaps));
    return;
  }
  auto step = [&](char ca, char cb, std::size_t ni, std::size_t nj) {
    ra.push_back(ca);
    rb.push_back(cb);
    enumerate(a, b, ni, nj, ra, rb, gaps, best);
    ra.pop_back();
    rb.pop_back();
  };
  if (i < a.size() && j < b.size()) step(a[i], b[j], i + 1, j + 1);
  if (i < a.size()) step(a[i], '-', i + 1, j);
  if (j < b.size()) step('-', b[j], i, j + 1);
}

double exhaustive(const std::string& a, const std::string& b, const GapPenalties& gaps) {
  double best = -std::numeric_limits<double>::infinity();
  std::string ra, rb;
  enumerate(a, b, 0, 0, ra, rb, gaps, best);
  return best;
}

std::string random_protein(Rng& rng, std::size_t n) {
  static const std::string alphabet = "ARNDCQEGHILKMFPSTWYV";
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += alphabet[uniform_index(rng, alphabet.size())];
  return s;
}

TEST(Blosum62, KnownEntries) {
  EXPECT_EQ(blosum62('A', 'A'), 4);
  EXPECT_EQ(blosum62('W', 'W'), 11);
  EXPECT_EQ(blosum62('W', 'C'), -2);
  EXPECT_EQ(blosum62('E', 'Z'), 4);
  EXPECT_EQ(blosum62('a', 'r'), blosum62('A', 'R'));
  EXPECT_EQ(blosum62('J', 'A'), blosum62('X', 'A'));
  for (char x : std::string("ARNDCQEGHILKMFPSTWYV"))
    for (char y : std::string("ARNDCQEGHILKMFPSTWYV")) EXPECT_EQ(blosum62(x, y), blosum62(y, x));
}

TEST(NeedlemanWunsch, MatchesExhaustiveEnumeration) {
  Rng rng(17);
  const std::vector<GapPenalties> settings{{-10, -1}, {-4, -1}, {-2, -2}, {-3, -0.5}};
  for (const auto& gaps : settings) {
    for (int trial = 0; trial < 60; ++trial) {
      const auto a = random_protein(rng, 1 + uniform_index(rng, 6));
      const auto b = random_protein(rng, 1 + uniform_index(rng, 6));
      const auto aln = needleman_wunsch(a, b, gaps);
      ASSERT_DOUBLE_EQ(aln.score, exhaustive(a, b, gaps)) << a << " / " << b;
      ASSERT_DOUBLE_EQ(rescore(aln.aligned_a, aln.aligned_b, gaps), aln.score);
    }
  }
}

TEST(NeedlemanWunsch, AlignmentIsConsistent) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_protein(rng, 1 + uniform_index(rng, 40));
    const auto b = random_protein(rng, 1 + uniform_index(rng, 40));
    const auto aln = needleman_wunsch(a, b);
    std::string ga, gb;
    for (char c : aln.aligned_a)
      if (c != '-') ga += c;
    for (char c : aln.aligned_b)
      if (c != '-') gb += c;
    EXPECT_EQ(ga, a);
    EXPECT_EQ(gb, b);
    for (auto [i, j] : aln.pairs) {
      EXPECT_LT(i, a.size());
      EXPECT_LT(j, b.size());
    }
  }
}

TEST(NeedlemanWunsch, IdenticalSequencesAlignWithoutGaps) {
  const std::string s = "MKTAYIAKQR";
  const auto aln = needleman_wunsch(s, s);
  EXPECT_EQ(aln.aligned_a, s);
  EXPECT_EQ(aln.pairs.size(), s.size());
}

TEST(NeedlemanWunsch, OneLongGapBeatsTwoShort) {
  const auto aln = needleman_wunsch("WWWWAAAWWWW", "WWWWWWWW");
  EXPECT_NE(aln.aligned_b.find("---"), std::string::npos);
}

}  // namespace
}  // namespace dtibench
