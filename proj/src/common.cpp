// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/error.hpp"
#include "dtibench/rng.hpp"

namespace dtibench {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::Validation: return "validation-error";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::NotEnoughEdges: return "not-enough-edges-to-train";
    case ErrorKind::InsufficientOverlap: return "insufficient-overlap";
    case ErrorKind::InsufficientNonEdges: return "insufficient-non-edges";
    case ErrorKind::EmptyStructure: return "empty-structure";
    case ErrorKind::MissingNode: return "missing-node";
    case ErrorKind::Overlap: return "overlap-violation";
    case ErrorKind::Checksum: return "checksum-mismatch";
    case ErrorKind::UnknownDataset: return "unknown-dataset";
    case ErrorKind::Shape: return "shape-mismatch";
  }
  return "error";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index) {
  return splitmix64(splitmix64(root ^ fnv1a(label)) + splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Lemire's multiply-and-reject, unbiased.
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace dtibench
