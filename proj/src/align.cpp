// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/align.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <limits>

namespace dtibench {

namespace {

constexpr std::string_view kAlphabet = "ARNDCQEGHILKMFPSTWYVBZX*";

// NCBI BLOSUM62, rows and columns in kAlphabet order.
constexpr std::array<std::array<std::int8_t, 24>, 24> kBlosum62 = {{
    {4, -1, -2, -2, 0, -1, -1, 0, -2, -1, -1, -1, -1, -2, -1, 1, 0, -3, -2, 0, -2, -1, -1, -4},
    {-1, 5, 0, -2, -3, 1, 0, -2, 0, -3, -2, 2, -1, -3, -2, -1, -1, -3, -2, -3, -1, 0, -1, -4},
    {-2, 0, 6, 1, -3, 0, 0, 0, 1, -3, -3, 0, -2, -3, -2, 1, 0, -4, -2, -3, 4, 0, -1, -4},
    {-2, -2, 1, 6, -3, 0, 2, -1, -1, -3, -4, -1, -3, -3, -1, 0, -1, -4, -3, -3, 4, 1, -1, -4},
    {0, -3, -3, -3, 9, -3, -4, -3, -3, -1, -1, -3, -1, -2, -3, -1, -1, -2, -2, -1, -3, -3, -1, -4},
    {-1, 1, 0, 0, -3, 5, 2, -2, 0, -3, -2, 1, 0, -3, -1, 0, -1, -2, -1, -2, 0, 4, -1, -4},
    {-1, 0, 0, 2, -4, 2, 5, -2, 0, -3, -3, 1, -2, -3, -1, 0, -1, -3, -2, -2, 1, 4, -1, -4},
    {0, -2, 0, -1, -3, -2, -2, 6, -2, -4, -4, -2, -3, -3, -2, 0, -2, -2, -3, -3, -1, -2, -1, -4},
    {-2, 0, 1, -1, -3, 0, 0, -2, 8, -3, -3, -1, -2, -1, -2, -1, -2, -2, 2, -3, 0, 0, -1, -4},
    {-1, -3, -3, -3, -1, -3, -3, -4, -3, 4, 2, -3, 1, 0, -3, -2, -1, -3, -1, 3, -3, -3, -1, -4},
    {-1, -2, -3, -4, -1, -2, -3, -4, -3, 2, 4, -2, 2, 0, -3, -2, -1, -2, -1, 1, -4, -3, -1, -4},
    {-1, 2, 0, -1, -3, 1, 1, -2, -1, -3, -2, 5, -1, -3, -1, 0, -1, -3, -2, -2, 0, 1, -1, -4},
    {-1, -1, -2, -3, -1, 0, -2, -3, -2, 1, 2, -1, 5, 0, -2, -1, -1, -1, -1, 1, -3, -1, -1, -4},
    {-2, -3, -3, -3, -2, -3, -3, -3, -1, 0, 0, -3, 0, 6, -4, -2, -2, 1, 3, -1, -3, -3, -1, -4},
    {-1, -2, -2, -1, -3, -1, -1, -2, -2, -3, -3, -1, -2, -4, 7, -1, -1, -4, -3, -2, -2, -1, -1, -4},
    {1, -1, 1, 0, -1, 0, 0, 0, -1, -2, -2, 0, -1, -2, -1, 4, 1, -3, -2, -2, 0, 0, -1, -4},
    {0, -1, 0, -1, -1, -1, -1, -2, -2, -1, -1, -1, -1, -2, -1, 1, 5, -2, -2, 0, -1, -1, -1, -4},
    {-3, -3, -4, -4, -2, -2, -3, -2, -2, -3, -2, -3, -1, 1, -4, -3, -2, 11, 2, -3, -4, -2, -1, -4},
    {-2, -2, -2, -3, -2, -1, -2, -3, 2, -1, -1, -2, -1, 3, -3, -2, -2, 2, 7, -1, -3, -2, -1, -4},
    {0, -3, -3, -3, -1, -2, -2, -3, -3, 3, 1, -2, 1, -1, -2, -2, 0, -3, -1, 4, -3, -2, -1, -4},
    {-2, -1, 4, 4, -3, 0, 1, -1, 0, -3, -4, 0, -3, -3, -2, 0, -1, -4, -3, -3, 4, 0, -1, -4},
    {-1, 0, 0, 1, -3, 4, 4, -2, 0, -3, -3, 1, -1, -3, -1, 0, -1, -2, -2, -2, 0, 4, -1, -4},
    {-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -4},
    {-4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, -4, 1},
}};

std::size_t residue_index(char c) {
  const auto up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  const auto pos = kAlphabet.find(up);
  return pos == std::string_view::npos ? kAlphabet.find('X') : pos;
}

enum State : std::uint8_t { kMatch = 0, kGapB = 1, kGapA = 2 };  // gapB: a[i] over '-'

}  // namespace

int blosum62(char a, char b) { return kBlosum62[residue_index(a)][residue_index(b)]; }

SequenceAlignment needleman_wunsch(std::string_view a, std::string_view b, const GapPenalties& gaps) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const std::size_t w = m + 1;

  // Score layers for the three end states plus traceback of the predecessor
  // state for each cell/state.
  std::vector<double> sm((n + 1) * w, neg_inf), sx((n + 1) * w, neg_inf), sy((n + 1) * w, neg_inf);
  std::vector<std::uint8_t> tm((n + 1) * w, kMatch), tx((n + 1) * w, kMatch), ty((n + 1) * w, kMatch);
  auto at = [w](std::size_t i, std::size_t j) { return i * w + j; };

  sm[at(0, 0)] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    sx[at(i, 0)] = gaps.open + static_cast<double>(i - 1) * gaps.extend;
    tx[at(i, 0)] = i == 1 ? kMatch : kGapB;
  }
  for (std::size_t j = 1; j <= m; ++j) {
    sy[at(0, j)] = gaps.open + static_cast<double>(j - 1) * gaps.extend;
    ty[at(0, j)] = j == 1 ? kMatch : kGapA;
  }

  // Ties resolve in the order match, gap-in-b, gap-in-a.
  auto best3 = [](double m0, double x0, double y0, std::uint8_t& from) {
    double best = m0;
    from = kMatch;
    if (x0 > best) {
      best = x0;
      from = kGapB;
    }
    if (y0 > best) {
      best = y0;
      from = kGapA;
    }
    return best;
  };

  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      std::uint8_t from;
      const auto d = at(i - 1, j - 1);
      sm[at(i, j)] = best3(sm[d], sx[d], sy[d], from) + blosum62(a[i - 1], b[j - 1]);
      tm[at(i, j)] = from;

      const auto u = at(i - 1, j);
      sx[at(i, j)] = best3(sm[u] + gaps.open, sx[u] + gaps.extend, sy[u] + gaps.open, from);
      tx[at(i, j)] = from;

      const auto l = at(i, j - 1);
      sy[at(i, j)] = best3(sm[l] + gaps.open, sx[l] + gaps.open, sy[l] + gaps.extend, from);
      ty[at(i, j)] = from;
    }
  }

  SequenceAlignment out;
  std::uint8_t state;
  out.score = best3(sm[at(n, m)], sx[at(n, m)], sy[at(n, m)], state);

  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const auto c = at(i, j);
    if (state == kMatch) {
      out.pairs.emplace_back(i - 1, j - 1);
      out.aligned_a.push_back(a[i - 1]);
      out.aligned_b.push_back(b[j - 1]);
      state = tm[c];
      --i;
      --j;
    } else if (state == kGapB) {
      out.aligned_a.push_back(a[i - 1]);
      out.aligned_b.push_back('-');
      state = tx[c];
      --i;
    } else {
      out.aligned_a.push_back('-');
      out.aligned_b.push_back(b[j - 1]);
      state = ty[c];
      --j;
    }
  }
  std::reverse(out.pairs.begin(), out.pairs.end());
  std::reverse(out.aligned_a.begin(), out.aligned_a.end());
  std::reverse(out.aligned_b.begin(), out.aligned_b.end());
  return out;
}

}  // namespace dtibench
