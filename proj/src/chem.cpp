// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/chem.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <map>

#include "dtibench/error.hpp"
#include "dtibench/io.hpp"
#include "dtibench/parallel.hpp"

namespace dtibench {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Fingerprint::Fingerprint(std::string id, std::size_t width)
    : id_(std::move(id)), width_(width), words_((width + 63) / 64, 0) {}

Fingerprint Fingerprint::from_hex(std::string id, std::string_view hex, std::size_t width) {
  if (width % 4 != 0) throw Error(ErrorKind::Validation, "fingerprint width must be a multiple of 4");
  if (hex.size() != width / 4) {
    throw Error(ErrorKind::Parse, "expected " + std::to_string(width / 4) + " hex chars, got " +
                                      std::to_string(hex.size()));
  }
  Fingerprint fp(std::move(id), width);
  for (std::size_t k = 0; k < hex.size(); ++k) {
    const int v = hex_value(hex[k]);
    if (v < 0) throw Error(ErrorKind::Parse, std::string("invalid hex character '") + hex[k] + "'");
    for (int b = 0; b < 4; ++b) {
      if (v & (8 >> b)) fp.set(4 * k + static_cast<std::size_t>(b));
    }
  }
  return fp;
}

Fingerprint Fingerprint::from_bits(std::string id, std::string_view bits) {
  Fingerprint fp(std::move(id), bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      fp.set(i);
    } else if (bits[i] != '0') {
      throw Error(ErrorKind::Parse, "bit string may only contain 0 and 1");
    }
  }
  return fp;
}

std::size_t Fingerprint::popcount() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::string Fingerprint::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(width_ / 4, '0');
  for (std::size_t k = 0; k < out.size(); ++k) {
    int v = 0;
    for (int b = 0; b < 4; ++b) {
      if (test(4 * k + static_cast<std::size_t>(b))) v |= 8 >> b;
    }
    out[k] = kDigits[v];
  }
  return out;
}

std::vector<Fingerprint> load_fingerprints(const std::filesystem::path& path, std::size_t width) {
  const auto lines = io::read_lines(path);
  const std::string source = path.string();
  std::map<std::string, Fingerprint> by_id;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = io::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = io::split(line, '\t');
    if (cols.size() != 2) throw ParseError(source, i + 1, "expected drug_id<TAB>hex");
    const std::string id(io::trim(cols[0]));
    if (id.empty() || io::has_whitespace(id)) throw ParseError(source, i + 1, "invalid drug id");
    Fingerprint fp;
    try {
      fp = Fingerprint::from_hex(id, io::trim(cols[1]), width);
    } catch (const Error& e) {
      throw ParseError(source, i + 1, e.what());
    }
    const auto [it, inserted] = by_id.emplace(id, fp);
    if (!inserted && !(it->second == fp)) {
      throw ParseError(source, i + 1, "duplicate drug id '" + id + "' with different bits");
    }
  }
  std::vector<Fingerprint> out;
  out.reserve(by_id.size());
  for (auto& [id, fp] : by_id) out.push_back(std::move(fp));
  return out;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b, bool* both_zero) {
  if (a.width() != b.width()) {
    throw Error(ErrorKind::Validation, "fingerprint width mismatch: " + std::to_string(a.width()) + " vs " +
                                           std::to_string(b.width()));
  }
  std::size_t inter = 0, uni = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    inter += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
    uni += static_cast<std::size_t>(std::popcount(wa[i] | wb[i]));
  }
  if (both_zero) *both_zero = uni == 0;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

PairwiseTanimoto pairwise_tanimoto(std::span<const Fingerprint> fps, unsigned jobs) {
  if (fps.size() < 2) throw Error(ErrorKind::Validation, "need at least 2 fingerprints");
  std::vector<const Fingerprint*> sorted;
  for (const auto& fp : fps) sorted.push_back(&fp);
  std::sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->id() < y->id(); });

  PairwiseTanimoto out;
  out.matrix.kind = SimilarityKind::Tanimoto;
  const auto n = static_cast<Eigen::Index>(sorted.size());
  for (auto* fp : sorted) out.matrix.ids.push_back(fp->id());
  out.matrix.values = Eigen::MatrixXd::Identity(n, n);

  std::atomic<std::size_t> zero_pairs{0};
  parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      bool zz = false;
      const double t = tanimoto(*sorted[row], *sorted[static_cast<std::size_t>(j)], &zz);
      if (zz) ++zero_pairs;
      out.matrix.values(i, j) = t;
      out.matrix.values(j, i) = t;
    }
  });
  out.zero_pairs = zero_pairs.load();
  return out;
}

}  // namespace dtibench
