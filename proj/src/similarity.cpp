// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtibench/error.hpp"
#include "dtibench/io.hpp"

namespace dtibench {

std::optional<std::size_t> SimilarityMatrix::index_of(std::string_view id) const {
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it != ids.end() && *it == id) return static_cast<std::size_t>(it - ids.begin());
  // ids are normally sorted, but accept hand-made matrices too
  const auto lin = std::find(ids.begin(), ids.end(), id);
  if (lin == ids.end()) return std::nullopt;
  return static_cast<std::size_t>(lin - ids.begin());
}

std::vector<double> SimilarityMatrix::upper_triangle(bool skip_na) const {
  std::vector<double> out;
  const auto n = size();
  out.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (skip_na && std::isnan(v)) continue;
      out.push_back(v);
    }
  }
  return out;
}

std::string format_matrix_tsv(const SimilarityMatrix& m) {
  std::string out = "id";
  for (const auto& id : m.ids) {
    out += '\t';
    out += id;
  }
  out += '\n';
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    out += m.ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      out += '\t';
      out += io::format_double(m.values(i, j));
    }
    out += '\n';
  }
  return out;
}

void save_matrix_tsv(const SimilarityMatrix& m, const std::filesystem::path& path) {
  io::write_text(path, format_matrix_tsv(m));
}

SimilarityMatrix load_matrix_tsv(const std::filesystem::path& path, SimilarityKind kind) {
  const auto lines = io::read_lines(path);
  const std::string source = path.string();
  if (lines.empty()) throw Error(ErrorKind::Parse, source + ": empty matrix file");
  SimilarityMatrix m;
  m.kind = kind;
  const auto header = io::split(lines[0], '\t');
  for (std::size_t c = 1; c < header.size(); ++c) m.ids.emplace_back(header[c]);
  const auto n = static_cast<Eigen::Index>(m.ids.size());
  m.values.resize(n, n);
  Eigen::Index row = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (io::trim(lines[i]).empty()) continue;
    const auto cols = io::split(lines[i], '\t');
    if (row >= n || cols.size() != m.ids.size() + 1) throw ParseError(source, i + 1, "wrong column count");
    if (cols[0] != m.ids[static_cast<std::size_t>(row)]) throw ParseError(source, i + 1, "row id does not match header");
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto tok = cols[static_cast<std::size_t>(j) + 1];
      double v;
      if (tok == "NA") {
        v = std::numeric_limits<double>::quiet_NaN();
      } else if (!io::parse_double(tok, v)) {
        throw ParseError(source, i + 1, "bad value '" + std::string(tok) + "'");
      }
      m.values(row, j) = v;
    }
    ++row;
  }
  if (row != n) throw Error(ErrorKind::Parse, source + ": matrix is not square");
  return m;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width, double low,
                                    std::optional<double> high) {
  if (!(bin_width > 0.0)) throw Error(ErrorKind::Validation, "bin width must be > 0");
  double top = high.value_or(low);
  if (!high) {
    for (double v : values) {
      if (!std::isnan(v)) top = std::max(top, v);
    }
  }
  const auto span_bins = (top - low) / bin_width;
  auto nbins = static_cast<std::size_t>(std::ceil(span_bins - 1e-9));
  nbins = std::max<std::size_t>(nbins, 1);

  std::vector<HistogramBin> bins(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    bins[b] = {low + static_cast<double>(b) * bin_width, low + static_cast<double>(b + 1) * bin_width, 0};
  }
  for (double v : values) {
    if (std::isnan(v)) continue;
    if (v < low - 1e-12 || v > top + 1e-12) {
      throw Error(ErrorKind::Validation, "histogram value " + io::format_double(v) + " outside range");
    }
    const double q = (v - low) / bin_width;
    const double r = std::round(q);
    // snap values sitting on a bin edge despite rounding error in the division
    auto idx = std::abs(q - r) < 1e-9 ? static_cast<std::size_t>(r) : static_cast<std::size_t>(std::floor(q));
    idx = std::min(idx, nbins - 1);
    ++bins[idx].count;
  }
  return bins;
}

std::string histogram_csv(std::span<const HistogramBin> bins) {
  std::string out = "bin_low,bin_high,count\n";
  for (const auto& b : bins) {
    out += io::format_fixed(b.low, 6) + ',' + io::format_fixed(b.high, 6) + ',' + std::to_string(b.count) + '\n';
  }
  return out;
}

}  // namespace dtibench
