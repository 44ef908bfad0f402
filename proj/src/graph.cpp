// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/graph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "dtibench/error.hpp"
#include "dtibench/io.hpp"

namespace dtibench {

std::string_view to_string(NodeKind kind) {
  return kind == NodeKind::Drug ? "drug" : "protein";
}

namespace {

void check_id(std::string_view id, std::string_view what) {
  if (id.empty()) throw Error(ErrorKind::Validation, std::string("empty ") + std::string(what) + " id");
  if (io::has_whitespace(id)) {
    throw Error(ErrorKind::Validation,
                std::string(what) + " id contains whitespace: '" + std::string(id) + "'");
  }
}

std::optional<std::uint32_t> lookup(const std::unordered_map<std::string, std::uint32_t>& m,
                                    std::string_view id) {
  const auto it = m.find(std::string(id));
  if (it == m.end()) return std::nullopt;
  return it->second;
}

void build_csr(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
               std::vector<std::uint32_t>& offsets, std::vector<std::uint32_t>& adj) {
  offsets.assign(n + 1, 0);
  for (const auto& [a, b] : pairs) ++offsets[a + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  adj.resize(pairs.size());
  auto cursor = offsets;
  for (const auto& [a, b] : pairs) adj[cursor[a]++] = b;
  for (std::size_t i = 0; i < n; ++i) std::sort(adj.begin() + offsets[i], adj.begin() + offsets[i + 1]);
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace

std::optional<std::uint32_t> DTIGraph::drug_index(std::string_view id) const {
  return lookup(drug_lookup_, id);
}

std::optional<std::uint32_t> DTIGraph::protein_index(std::string_view id) const {
  return lookup(protein_lookup_, id);
}

std::span<const std::uint32_t> DTIGraph::drug_neighbors(std::uint32_t drug) const {
  return std::span(drug_adj_).subspan(drug_offsets_[drug], drug_offsets_[drug + 1] - drug_offsets_[drug]);
}

std::span<const std::uint32_t> DTIGraph::protein_neighbors(std::uint32_t protein) const {
  return std::span(protein_adj_)
      .subspan(protein_offsets_[protein], protein_offsets_[protein + 1] - protein_offsets_[protein]);
}

bool DTIGraph::has_edge(std::uint32_t drug, std::uint32_t protein) const {
  const auto nb = drug_neighbors(drug);
  return std::binary_search(nb.begin(), nb.end(), protein);
}

bool DTIGraph::has_edge(std::string_view drug, std::string_view protein) const {
  const auto d = drug_index(drug);
  const auto p = protein_index(protein);
  return d && p && has_edge(*d, *p);
}

std::vector<EdgeRef> DTIGraph::edge_refs() const {
  std::vector<EdgeRef> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back(ref(e));
  return out;
}

std::optional<Edge> DTIGraph::find_edge(const EdgeRef& e) const {
  const auto d = drug_index(e.drug);
  const auto p = protein_index(e.protein);
  if (!d || !p || !has_edge(*d, *p)) return std::nullopt;
  return Edge{*d, *p};
}

void GraphBuilder::add_drug(std::string_view id) {
  check_id(id, "drug");
  drugs_.emplace(id);
}

void GraphBuilder::add_protein(std::string_view id) {
  check_id(id, "protein");
  proteins_.emplace(id);
}

bool GraphBuilder::add_edge(std::string_view drug, std::string_view protein) {
  add_drug(drug);
  add_protein(protein);
  const bool inserted = edges_.emplace(std::string(drug), std::string(protein)).second;
  if (!inserted) ++duplicates_;
  return inserted;
}

DTIGraph GraphBuilder::build() const {
  DTIGraph g;
  g.name_ = name_;
  g.drugs_.assign(drugs_.begin(), drugs_.end());
  g.proteins_.assign(proteins_.begin(), proteins_.end());
  for (std::uint32_t i = 0; i < g.drugs_.size(); ++i) g.drug_lookup_.emplace(g.drugs_[i], i);
  for (std::uint32_t i = 0; i < g.proteins_.size(); ++i) g.protein_lookup_.emplace(g.proteins_[i], i);
  g.edges_.reserve(edges_.size());
  for (const auto& [d, p] : edges_) g.edges_.push_back({g.drug_lookup_.at(d), g.protein_lookup_.at(p)});
  std::sort(g.edges_.begin(), g.edges_.end());

  std::vector<std::pair<std::uint32_t, std::uint32_t>> fwd, rev;
  fwd.reserve(g.edges_.size());
  rev.reserve(g.edges_.size());
  for (const auto& e : g.edges_) {
    fwd.emplace_back(e.drug, e.protein);
    rev.emplace_back(e.protein, e.drug);
  }
  build_csr(g.drugs_.size(), fwd, g.drug_offsets_, g.drug_adj_);
  build_csr(g.proteins_.size(), rev, g.protein_offsets_, g.protein_adj_);
  return g;
}

EdgeListLoad load_edge_list(const std::filesystem::path& path, const EdgeListOptions& options) {
  const auto lines = io::read_lines(path);
  const std::string source = path.string();
  GraphBuilder builder(options.name.empty() ? path.stem().string() : options.name);
  EdgeListLoad result;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = io::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = io::split(line, '\t');
    if (cols.size() < 2) throw ParseError(source, i + 1, "expected drug_id<TAB>protein_id");
    auto drug = io::trim(cols[0]);
    auto protein = io::trim(cols[1]);
    if (options.swap_columns) std::swap(drug, protein);
    try {
      if (!builder.add_edge(drug, protein)) ++result.duplicate_rows;
    } catch (const Error& e) {
      throw ParseError(source, i + 1, e.what());
    }
    ++result.rows;
  }
  if (result.rows == 0) throw Error(ErrorKind::Parse, source + ": edge list is empty");
  result.graph = builder.build();
  return result;
}

std::string format_edge_list(const DTIGraph& g) {
  std::string out = "#drug_id\tprotein_id\n";
  for (const auto& e : g.edges()) {
    out += g.drugs()[e.drug];
    out += '\t';
    out += g.proteins()[e.protein];
    out += '\n';
  }
  return out;
}

void save_edge_list(const DTIGraph& g, const std::filesystem::path& path) {
  io::write_text(path, format_edge_list(g));
}

std::vector<AffinityRecord> load_affinity_table(const std::filesystem::path& path) {
  const auto lines = io::read_lines(path);
  const std::string source = path.string();
  std::vector<AffinityRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = io::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = io::split(line, '\t');
    if (cols.size() != 3) throw ParseError(source, i + 1, "expected drug_id<TAB>protein_id<TAB>kd");
    AffinityRecord rec{std::string(io::trim(cols[0])), std::string(io::trim(cols[1])), 0.0};
    if (!io::parse_double(cols[2], rec.kd)) throw ParseError(source, i + 1, "kd is not a number");
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw Error(ErrorKind::Parse, source + ": affinity table is empty");
  return out;
}

DTIGraph binarize_affinities(std::span<const AffinityRecord> records, double threshold, std::string name) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::Validation, "affinity threshold must be > 0");
  std::map<std::pair<std::string, std::string>, double> best;
  GraphBuilder builder(std::move(name));
  for (const auto& r : records) {
    if (!(r.kd >= 0.0)) {
      throw Error(ErrorKind::Validation, "negative kd for pair (" + r.drug + ", " + r.protein + ")");
    }
    builder.add_drug(r.drug);
    builder.add_protein(r.protein);
    auto [it, inserted] = best.emplace(std::make_pair(r.drug, r.protein), r.kd);
    if (!inserted) it->second = std::min(it->second, r.kd);
  }
  for (const auto& [pair, kd] : best) {
    if (kd < threshold) builder.add_edge(pair.first, pair.second);
  }
  return builder.build();
}

GraphStats compute_stats(const DTIGraph& g, const StatsOptions& options) {
  GraphStats s;
  s.n_drugs = g.num_drugs();
  s.n_proteins = g.num_proteins();
  s.n_nodes = g.num_nodes();
  s.n_edges = g.num_edges();
  if (s.n_nodes >= 2) {
    const double pairs = static_cast<double>(s.n_nodes) * static_cast<double>(s.n_nodes - 1) / 2.0;
    s.density_pct = 100.0 * static_cast<double>(s.n_edges) / pairs;
  }

  DisjointSets sets(s.n_nodes);
  for (const auto& e : g.edges()) sets.unite(e.drug, s.n_drugs + e.protein);
  std::vector<char> is_root(s.n_nodes, 0);
  for (std::size_t v = 0; v < s.n_nodes; ++v) {
    if (!options.count_isolated_components) {
      const bool isolated = v < s.n_drugs ? g.drug_neighbors(static_cast<std::uint32_t>(v)).empty()
                                          : g.protein_neighbors(static_cast<std::uint32_t>(v - s.n_drugs)).empty();
      if (isolated) continue;
    }
    is_root[sets.find(v)] = 1;
  }
  s.n_components = static_cast<std::size_t>(std::count(is_root.begin(), is_root.end(), 1));
  return s;
}

std::string stats_csv(std::string_view dataset, const GraphStats& s) {
  std::ostringstream out;
  out << "Dataset,Number of drugs,Number of proteins,Total number of nodes,Total number of edges,"
         "Density (%),# of connected components\n";
  out << dataset << ',' << s.n_drugs << ',' << s.n_proteins << ',' << s.n_nodes << ',' << s.n_edges << ','
      << io::format_fixed(s.density_pct, 2) << ',' << s.n_components << '\n';
  return out.str();
}

std::map<std::size_t, std::size_t> degree_histogram(const DTIGraph& g, NodeKind side) {
  std::map<std::size_t, std::size_t> hist;
  if (side == NodeKind::Drug) {
    for (std::uint32_t d = 0; d < g.num_drugs(); ++d) ++hist[g.drug_neighbors(d).size()];
  } else {
    for (std::uint32_t p = 0; p < g.num_proteins(); ++p) ++hist[g.protein_neighbors(p).size()];
  }
  return hist;
}

std::string degree_histogram_csv(const std::map<std::size_t, std::size_t>& hist) {
  std::string out = "degree,count\n";
  for (const auto& [deg, count] : hist) out += std::to_string(deg) + ',' + std::to_string(count) + '\n';
  return out;
}

DTIGraph remove_nodes(const DTIGraph& g, const std::set<std::string>& drugs,
                      const std::set<std::string>& proteins, std::string name) {
  GraphBuilder builder(name.empty() ? g.name() : std::move(name));
  for (const auto& d : g.drugs()) {
    if (!drugs.contains(d)) builder.add_drug(d);
  }
  for (const auto& p : g.proteins()) {
    if (!proteins.contains(p)) builder.add_protein(p);
  }
  for (const auto& e : g.edges()) {
    const auto& d = g.drugs()[e.drug];
    const auto& p = g.proteins()[e.protein];
    if (!drugs.contains(d) && !proteins.contains(p)) builder.add_edge(d, p);
  }
  return builder.build();
}

}  // namespace dtibench
