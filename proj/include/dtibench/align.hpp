// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dtibench {

/// BLOSUM62 score for two one-letter amino-acid codes. Letters outside the
/// table score as 'X'.
int blosum62(char a, char b);

/// Affine gap scores: a run of L gap columns scores open + (L - 1) * extend.
struct GapPenalties {
  double open = -10.0;
  double extend = -1.0;
};

struct SequenceAlignment {
  double score = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // aligned non-gap columns
  std::string aligned_a;                                   // with '-' for gaps
  std::string aligned_b;
};

/// Global (Needleman-Wunsch) alignment with BLOSUM62 and affine gaps (Gotoh's
/// three-state recursion). End gaps are scored like internal gaps.
SequenceAlignment needleman_wunsch(std::string_view a, std::string_view b, const GapPenalties& gaps = {});

}  // namespace dtibench
