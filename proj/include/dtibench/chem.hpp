// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtibench/similarity.hpp"

namespace dtibench {

inline constexpr std::size_t kFingerprintWidth = 2048;

/// Fixed-width drug fingerprint. Hex text maps character k to bits 4k..4k+3,
/// most significant nibble bit first.
class Fingerprint {
 public:
  Fingerprint() = default;
  Fingerprint(std::string id, std::size_t width);

  static Fingerprint from_hex(std::string id, std::string_view hex, std::size_t width = kFingerprintWidth);
  /// "1100" -> bits 0 and 1 set; width is the string length.
  static Fingerprint from_bits(std::string id, std::string_view bits);

  const std::string& id() const noexcept { return id_; }
  std::size_t width() const noexcept { return width_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool test(std::size_t bit) const { return (words_[bit / 64] >> (bit % 64)) & 1u; }
  void set(std::size_t bit) { words_[bit / 64] |= std::uint64_t{1} << (bit % 64); }

  std::size_t popcount() const;
  bool is_zero() const { return popcount() == 0; }
  std::string to_hex() const;

  bool operator==(const Fingerprint&) const = default;

 private:
  std::string id_;
  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

/// One fingerprint per distinct drug id, sorted by id. Rows are
/// `drug_id<TAB>hex`; identical duplicate rows collapse, conflicting ones throw.
std::vector<Fingerprint> load_fingerprints(const std::filesystem::path& path,
                                           std::size_t width = kFingerprintWidth);

/// |a AND b| / |a OR b|. Two all-zero vectors score 1.0; `both_zero` reports it.
double tanimoto(const Fingerprint& a, const Fingerprint& b, bool* both_zero = nullptr);

struct PairwiseTanimoto {
  SimilarityMatrix matrix;
  std::size_t zero_pairs = 0;  // pairs scored by the all-zero convention
};

PairwiseTanimoto pairwise_tanimoto(std::span<const Fingerprint> fps, unsigned jobs = 1);

}  // namespace dtibench
