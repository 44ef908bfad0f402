// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "dtibench/graph.hpp"
#include "dtibench/rng.hpp"

namespace dtibench::testing {

inline std::string drug_id(std::size_t i) { return "D" + std::to_string(i); }
inline std::string protein_id(std::size_t i) { return "P" + std::to_string(i); }

/// Random bipartite graph; every node gets at least one edge.
inline DTIGraph random_graph(std::size_t drugs, std::size_t proteins, double p, std::uint64_t seed,
                             std::string name = "random") {
  Rng rng(seed);
  GraphBuilder b(std::move(name));
  for (std::size_t d = 0; d < drugs; ++d)
    for (std::size_t t = 0; t < proteins; ++t)
      if (uniform_unit(rng) < p) b.add_edge(drug_id(d), protein_id(t));
  for (std::size_t d = 0; d < drugs; ++d) b.add_edge(drug_id(d), protein_id(uniform_index(rng, proteins)));
  for (std::size_t t = 0; t < proteins; ++t) b.add_edge(drug_id(uniform_index(rng, drugs)), protein_id(t));
  return b.build();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("dtibench-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace dtibench::testing
