// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dtibench {

enum class NodeKind { Drug, Protein };

std::string_view to_string(NodeKind kind);

struct NodeRef {
  NodeKind kind;
  std::string id;

  auto operator<=>(const NodeRef&) const = default;
};

/// Edge between drug index and protein index of a DTIGraph.
struct Edge {
  std::uint32_t drug;
  std::uint32_t protein;

  auto operator<=>(const Edge&) const = default;
};

/// Edge by identifier, independent of any graph's index space.
struct EdgeRef {
  std::string drug;
  std::string protein;

  auto operator<=>(const EdgeRef&) const = default;
};

/// Bipartite drug-target interaction graph. Immutable once built; node lists
/// are sorted by id and edges sorted by (drug, protein).
class DTIGraph {
 public:
  DTIGraph() = default;

  const std::string& name() const noexcept { return name_; }
  std::span<const std::string> drugs() const noexcept { return drugs_; }
  std::span<const std::string> proteins() const noexcept { return proteins_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::size_t num_drugs() const noexcept { return drugs_.size(); }
  std::size_t num_proteins() const noexcept { return proteins_.size(); }
  std::size_t num_nodes() const noexcept { return drugs_.size() + proteins_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  std::optional<std::uint32_t> drug_index(std::string_view id) const;
  std::optional<std::uint32_t> protein_index(std::string_view id) const;

  bool has_edge(std::uint32_t drug, std::uint32_t protein) const;
  bool has_edge(std::string_view drug, std::string_view protein) const;

  /// Sorted protein indices adjacent to a drug.
  std::span<const std::uint32_t> drug_neighbors(std::uint32_t drug) const;
  /// Sorted drug indices adjacent to a protein.
  std::span<const std::uint32_t> protein_neighbors(std::uint32_t protein) const;

  EdgeRef ref(const Edge& e) const { return {drugs_[e.drug], proteins_[e.protein]}; }
  std::vector<EdgeRef> edge_refs() const;

  /// Resolves an EdgeRef; nullopt when either endpoint or the edge is absent.
  std::optional<Edge> find_edge(const EdgeRef& e) const;

 private:
  friend class GraphBuilder;

  std::string name_;
  std::vector<std::string> drugs_;
  std::vector<std::string> proteins_;
  std::vector<Edge> edges_;
  // CSR adjacency in both directions.
  std::vector<std::uint32_t> drug_offsets_, drug_adj_;
  std::vector<std::uint32_t> protein_offsets_, protein_adj_;
  std::unordered_map<std::string, std::uint32_t> drug_lookup_, protein_lookup_;
};

/// Accumulates nodes and edges, then freezes them into a DTIGraph.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::string name = {}) : name_(std::move(name)) {}

  void add_drug(std::string_view id);
  void add_protein(std::string_view id);
  /// Adds both endpoints as needed. Returns false if the edge already existed.
  bool add_edge(std::string_view drug, std::string_view protein);

  std::size_t duplicate_edges() const noexcept { return duplicates_; }

  DTIGraph build() const;

 private:
  std::string name_;
  std::set<std::string, std::less<>> drugs_, proteins_;
  std::set<std::pair<std::string, std::string>> edges_;
  std::size_t duplicates_ = 0;
};

struct EdgeListOptions {
  bool swap_columns = false;  // file columns are (protein, drug)
  std::string name;           // defaults to the file stem
};

struct EdgeListLoad {
  DTIGraph graph;
  std::size_t rows = 0;
  std::size_t duplicate_rows = 0;
};

EdgeListLoad load_edge_list(const std::filesystem::path& path, const EdgeListOptions& options = {});
std::string format_edge_list(const DTIGraph& g);
void save_edge_list(const DTIGraph& g, const std::filesystem::path& path);

struct AffinityRecord {
  std::string drug;
  std::string protein;
  double kd = 0.0;
};

std::vector<AffinityRecord> load_affinity_table(const std::filesystem::path& path);

/// Pairs with min kd strictly below the threshold become edges. Every drug and
/// protein that appears in a record is kept as a node.
DTIGraph binarize_affinities(std::span<const AffinityRecord> records, double threshold = 30.0,
                             std::string name = {});

struct GraphStats {
  std::size_t n_drugs = 0;
  std::size_t n_proteins = 0;
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  double density_pct = 0.0;  // full precision; reports round to 2 decimals
  std::size_t n_components = 0;
};

struct StatsOptions {
  bool count_isolated_components = true;
};

GraphStats compute_stats(const DTIGraph& g, const StatsOptions& options = {});

/// Header plus one row, columns named after the published statistics table.
std::string stats_csv(std::string_view dataset, const GraphStats& s);

/// degree -> number of nodes on `side` with that degree.
std::map<std::size_t, std::size_t> degree_histogram(const DTIGraph& g, NodeKind side);

std::string degree_histogram_csv(const std::map<std::size_t, std::size_t>& hist);

/// Copy of `g` without the listed nodes and their incident edges.
DTIGraph remove_nodes(const DTIGraph& g, const std::set<std::string>& drugs,
                      const std::set<std::string>& proteins, std::string name = {});

}  // namespace dtibench
