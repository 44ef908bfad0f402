// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dtibench {

enum class SimilarityKind { Tanimoto, Rmsd };

/// Symmetric pairwise matrix over an id list. Tanimoto scores have a unit
/// diagonal; RMSD values (Å) a zero diagonal. NaN marks an incomparable pair
/// and is written as `NA`.
struct SimilarityMatrix {
  SimilarityKind kind = SimilarityKind::Tanimoto;
  std::vector<std::string> ids;
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return ids.size(); }
  std::optional<std::size_t> index_of(std::string_view id) const;
  bool is_na(std::size_t i, std::size_t j) const { return std::isnan(values(i, j)); }

  /// Strict upper triangle in row-major order, optionally dropping NA.
  std::vector<double> upper_triangle(bool skip_na = true) const;
};

/// TSV with a header row and a leading id column. Values use the shortest
/// round-trip decimal form so a reload is bit-exact.
std::string format_matrix_tsv(const SimilarityMatrix& m);
void save_matrix_tsv(const SimilarityMatrix& m, const std::filesystem::path& path);
SimilarityMatrix load_matrix_tsv(const std::filesystem::path& path, SimilarityKind kind);

struct HistogramBin {
  double low;
  double high;
  std::size_t count;
};

/// Fixed-width bins from `low` up to `high` (or the max value). Bins are
/// half-open except the last, which includes `high`. NaN values are skipped.
std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width, double low = 0.0,
                                    std::optional<double> high = std::nullopt);

/// Columns `bin_low,bin_high,count`.
std::string histogram_csv(std::span<const HistogramBin> bins);

}  // namespace dtibench
