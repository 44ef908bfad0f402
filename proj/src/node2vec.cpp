// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/node2vec.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "dtibench/error.hpp"
#include "dtibench/io.hpp"
#include "dtibench/parallel.hpp"
#include "dtibench/rng.hpp"

namespace dtibench {

void validate(const Node2VecParams& params) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Validation, "node2vec: " + what); };
  if (params.dim == 0) fail("dim must be positive");
  if (!(params.p > 0) || !(params.q > 0)) fail("p and q must be positive");
  if (params.walks_per_node == 0) fail("walks_per_node must be positive");
  if (params.walk_length < 2) fail("walk_length must be at least 2");
  if (params.window == 0) fail("window must be positive");
  if (params.epochs == 0) fail("epochs must be positive");
  if (!(params.learning_rate > 0)) fail("learning_rate must be positive");
}

Adjacency unified_adjacency(const DTIGraph& g) {
  const auto nd = static_cast<std::uint32_t>(g.num_drugs());
  Adjacency adj(g.num_nodes());
  for (std::uint32_t d = 0; d < nd; ++d)
    for (auto p : g.drug_neighbors(d)) adj[d].push_back(nd + p);
  for (std::uint32_t p = 0; p < g.num_proteins(); ++p)
    for (auto d : g.protein_neighbors(p)) adj[nd + p].push_back(d);
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

std::vector<double> transition_weights(const Adjacency& adj, std::uint32_t prev, std::uint32_t cur, double p,
                                       double q) {
  const auto& from = adj.at(prev);
  std::vector<double> w;
  w.reserve(adj.at(cur).size());
  for (auto x : adj[cur]) {
    if (x == prev)
      w.push_back(1.0 / p);
    else if (std::binary_search(from.begin(), from.end(), x))
      w.push_back(1.0);
    else
      w.push_back(1.0 / q);
  }
  return w;
}

namespace {

std::size_t sample_weighted(std::span<const double> w, Rng& rng) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double r = uniform_unit(rng) * total;
  double acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (r < acc) return i;
  }
  return w.size() - 1;
}

Walk walk_from(const Adjacency& adj, std::uint32_t start, const Node2VecParams& params, Rng& rng) {
  Walk walk{start};
  walk.reserve(params.walk_length);
  while (walk.size() < params.walk_length) {
    const auto cur = walk.back();
    const auto& nbrs = adj[cur];
    if (nbrs.empty()) break;
    if (walk.size() == 1) {
      walk.push_back(nbrs[uniform_index(rng, nbrs.size())]);
      continue;
    }
    const auto w = transition_weights(adj, walk[walk.size() - 2], cur, params.p, params.q);
    walk.push_back(nbrs[sample_weighted(w, rng)]);
  }
  return walk;
}

std::vector<NodeRef> unified_nodes(const DTIGraph& g) {
  std::vector<NodeRef> nodes;
  nodes.reserve(g.num_nodes());
  for (const auto& d : g.drugs()) nodes.push_back({NodeKind::Drug, d});
  for (const auto& p : g.proteins()) nodes.push_back({NodeKind::Protein, p});
  return nodes;
}

// Cumulative unigram^0.75 table for negative draws.
class NoiseTable {
 public:
  explicit NoiseTable(std::span<const std::uint64_t> counts) {
    double acc = 0;
    cdf_.reserve(counts.size());
    for (auto c : counts) {
      acc += std::pow(static_cast<double>(c), 0.75);
      cdf_.push_back(acc);
    }
  }
  std::uint32_t draw(Rng& rng) const {
    const double r = uniform_unit(rng) * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), r);
    if (it == cdf_.end()) --it;
    return static_cast<std::uint32_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::vector<Walk> generate_walks(const DTIGraph& g, const Node2VecParams& params) {
  validate(params);
  const auto adj = unified_adjacency(g);
  std::vector<std::uint32_t> starts;
  for (std::uint32_t v = 0; v < adj.size(); ++v)
    if (!adj[v].empty()) starts.push_back(v);
  std::vector<Walk> walks(starts.size() * params.walks_per_node);
  for (std::size_t r = 0; r < params.walks_per_node; ++r) {
    auto order = starts;
    auto order_rng = make_rng(params.seed, "walk-order", r);
    shuffle(std::span(order), order_rng);
    parallel_for(order.size(), params.jobs, [&](std::size_t i) {
      auto rng = make_rng(params.seed, "walk", r * adj.size() + order[i]);
      walks[r * starts.size() + i] = walk_from(adj, order[i], params, rng);
    });
  }
  return walks;
}

std::optional<Eigen::Index> EmbeddingTable::row(NodeKind kind, std::string_view id) const {
  const auto& map = kind == NodeKind::Drug ? drug_rows_ : protein_rows_;
  auto it = map.find(std::string(id));
  if (it == map.end()) return std::nullopt;
  return it->second;
}

EmbeddingTable make_table(std::vector<NodeRef> nodes, Eigen::MatrixXd vectors, std::vector<char> isolated,
                          const Node2VecParams& params) {
  if (static_cast<std::size_t>(vectors.rows()) != nodes.size() || isolated.size() != nodes.size())
    throw Error(ErrorKind::Shape, "embedding table: row count does not match node count");
  EmbeddingTable t;
  t.nodes = std::move(nodes);
  t.vectors = std::move(vectors);
  t.isolated = std::move(isolated);
  t.params = params;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(t.nodes.size()); ++i) {
    auto& map = t.nodes[i].kind == NodeKind::Drug ? t.drug_rows_ : t.protein_rows_;
    if (!map.emplace(t.nodes[i].id, i).second)
      throw Error(ErrorKind::Validation, "embedding table: duplicate node '" + t.nodes[i].id + "'");
  }
  return t;
}

namespace {

struct Corpus {
  std::vector<std::uint64_t> counts;
  std::uint64_t tokens = 0;
};

Corpus count_tokens(std::span<const Walk> walks, std::size_t n) {
  Corpus c{std::vector<std::uint64_t>(n, 0), 0};
  for (const auto& w : walks)
    for (auto v : w) {
      if (v >= n) throw Error(ErrorKind::Validation, "walk refers to node index outside the table");
      ++c.counts[v];
      ++c.tokens;
    }
  return c;
}

void train_serial(std::span<const Walk> walks, const Corpus& corpus, const NoiseTable& noise,
                  const Node2VecParams& params, RowMatrix& in, RowMatrix& out) {
  const auto d = static_cast<Eigen::Index>(params.dim);
  const auto rows = static_cast<Eigen::Index>(params.negatives + 1);
  auto rng = make_rng(params.seed, "sgns");
  const double total = static_cast<double>(corpus.tokens * params.epochs);
  std::uint64_t processed = 0;
  std::vector<std::uint32_t> targets(rows);
  RowMatrix ctx(rows, d), grad_ctx(rows, d);
  Eigen::VectorXd grad_u(d), u(d);
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    for (const auto& walk : walks) {
      for (std::size_t i = 0; i < walk.size(); ++i, ++processed) {
        const double lr = params.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(processed) / total);
        const auto reduced = static_cast<std::size_t>(uniform_index(rng, params.window));
        const std::size_t span = params.window - reduced;
        const std::size_t lo = i >= span ? i - span : 0;
        const std::size_t hi = std::min(walk.size() - 1, i + span);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          targets[0] = walk[j];
          for (Eigen::Index k = 1; k < rows; ++k) targets[k] = noise.draw(rng);
          u = in.row(walk[i]).transpose();
          for (Eigen::Index k = 0; k < rows; ++k) ctx.row(k) = out.row(targets[k]);
          sgns_loss<double>(u, ctx, &grad_u, &grad_ctx);
          for (Eigen::Index k = 0; k < rows; ++k) out.row(targets[k]) -= lr * grad_ctx.row(k);
          in.row(walk[i]) -= lr * grad_u.transpose();
        }
      }
    }
  }
}

// Lock-free variant: threads own disjoint slices of the corpus and update the
// shared matrices through relaxed atomic element access.
void train_parallel(std::span<const Walk> walks, const Corpus& corpus, const NoiseTable& noise,
                    const Node2VecParams& params, RowMatrix& in, RowMatrix& out) {
  const std::size_t d = params.dim;
  const unsigned jobs = std::max(1u, std::min<unsigned>(params.jobs, static_cast<unsigned>(walks.size())));
  const double total = static_cast<double>(corpus.tokens * params.epochs);
  std::atomic<std::uint64_t> processed{0};
  double* in_data = in.data();
  double* out_data = out.data();
  auto load = [](double* p) { return std::atomic_ref<double>(*p).load(std::memory_order_relaxed); };
  auto store = [](double* p, double v) { std::atomic_ref<double>(*p).store(v, std::memory_order_relaxed); };
  auto worker = [&](unsigned t) {
    auto rng = make_rng(params.seed, "sgns-thread", t);
    std::vector<double> u(d), grad_u(d);
    const std::size_t begin = walks.size() * t / jobs, end = walks.size() * (t + 1) / jobs;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
      for (std::size_t w = begin; w < end; ++w) {
        const auto& walk = walks[w];
        for (std::size_t i = 0; i < walk.size(); ++i) {
          const auto seen = processed.fetch_add(1, std::memory_order_relaxed);
          const double lr = params.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(seen) / total);
          const std::size_t span = params.window - static_cast<std::size_t>(uniform_index(rng, params.window));
          const std::size_t lo = i >= span ? i - span : 0;
          const std::size_t hi = std::min(walk.size() - 1, i + span);
          double* urow = in_data + static_cast<std::size_t>(walk[i]) * d;
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            for (std::size_t c = 0; c < d; ++c) u[c] = load(urow + c);
            std::fill(grad_u.begin(), grad_u.end(), 0.0);
            for (std::size_t k = 0; k <= params.negatives; ++k) {
              const auto target = k == 0 ? walk[j] : noise.draw(rng);
              double* vrow = out_data + static_cast<std::size_t>(target) * d;
              double s = 0;
              for (std::size_t c = 0; c < d; ++c) s += u[c] * load(vrow + c);
              const double g = k == 0 ? sigmoid(s) - 1.0 : sigmoid(s);
              for (std::size_t c = 0; c < d; ++c) {
                const double v = load(vrow + c);
                grad_u[c] += g * v;
                store(vrow + c, v - lr * g * u[c]);
              }
            }
            for (std::size_t c = 0; c < d; ++c) store(urow + c, load(urow + c) - lr * grad_u[c]);
          }
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker, t);
}

}  // namespace

EmbeddingTable train_sgns(std::span<const Walk> walks, std::vector<NodeRef> nodes, const Node2VecParams& params) {
  validate(params);
  const std::size_t n = nodes.size();
  const auto d = static_cast<Eigen::Index>(params.dim);
  const Corpus corpus = count_tokens(walks, n);
  std::vector<char> isolated(n);
  for (std::size_t v = 0; v < n; ++v) isolated[v] = corpus.counts[v] == 0;

  RowMatrix in = RowMatrix::Zero(static_cast<Eigen::Index>(n), d);
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(n), d);
  auto init_rng = make_rng(params.seed, "sgns-init");
  const double half = 0.5 / static_cast<double>(params.dim);
  for (std::size_t v = 0; v < n; ++v) {
    if (isolated[v]) continue;
    for (Eigen::Index c = 0; c < d; ++c) in(static_cast<Eigen::Index>(v), c) = uniform_real(init_rng, -half, half);
  }
  if (corpus.tokens > 0) {
    const NoiseTable noise(corpus.counts);
    if (params.jobs > 1)
      train_parallel(walks, corpus, noise, params, in, out);
    else
      train_serial(walks, corpus, noise, params, in, out);
  }
  auto table = make_table(std::move(nodes), Eigen::MatrixXd(in), std::move(isolated), params);
  table.context = Eigen::MatrixXd(out);
  return table;
}

EmbeddingTable embed(const DTIGraph& g, const Node2VecParams& params) {
  const auto walks = generate_walks(g, params);
  return train_sgns(walks, unified_nodes(g), params);
}

Eigen::MatrixXd pair_features(const EmbeddingTable& emb, std::span<const EdgeRef> edges) {
  const auto d = static_cast<Eigen::Index>(emb.dim());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(edges.size()), 2 * d);
  for (Eigen::Index k = 0; k < x.rows(); ++k) {
    const auto& e = edges[static_cast<std::size_t>(k)];
    const auto dr = emb.row(NodeKind::Drug, e.drug);
    if (!dr) throw Error(ErrorKind::MissingNode, "no embedding for drug '" + e.drug + "'");
    const auto pr = emb.row(NodeKind::Protein, e.protein);
    if (!pr) throw Error(ErrorKind::MissingNode, "no embedding for protein '" + e.protein + "'");
    x.row(k).head(d) = emb.vectors.row(*dr);
    x.row(k).tail(d) = emb.vectors.row(*pr);
  }
  return x;
}

std::string format_embeddings(const EmbeddingTable& emb) {
  std::string s = std::to_string(emb.nodes.size()) + " " + std::to_string(emb.dim()) + "\n";
  for (std::size_t i = 0; i < emb.nodes.size(); ++i) {
    s += emb.nodes[i].id;
    for (Eigen::Index c = 0; c < emb.vectors.cols(); ++c) {
      s += ' ';
      s += io::format_double(emb.vectors(static_cast<Eigen::Index>(i), c));
    }
    s += '\n';
  }
  return s;
}

EmbeddingTable parse_embeddings(std::string_view text, const DTIGraph& g) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!io::trim(line).empty()) return true;
    }
    return false;
  };
  if (!next()) throw ParseError("embeddings", 0, "empty embedding file");
  const auto header = io::split(io::trim(line), ' ');
  std::size_t n = 0, d = 0;
  auto parse_size = [&](std::string_view tok, std::size_t& v) {
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) throw ParseError("embeddings", lineno, "bad header");
  };
  if (header.size() != 2) throw ParseError("embeddings", lineno, "header must be 'count dim'");
  parse_size(header[0], n);
  parse_size(header[1], d);
  if (d == 0) throw ParseError("embeddings", lineno, "dimension must be positive");

  std::vector<NodeRef> nodes;
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::unordered_map<std::string, int> seen;
  for (std::size_t r = 0; r < n; ++r) {
    if (!next()) throw ParseError("embeddings", lineno, "expected " + std::to_string(n) + " rows");
    const auto fields = io::split(io::trim(line), ' ');
    if (fields.size() != d + 1) throw ParseError("embeddings", lineno, "expected id and " + std::to_string(d) + " values");
    const std::string id(fields[0]);
    const bool is_drug = g.drug_index(id).has_value();
    const bool is_protein = g.protein_index(id).has_value();
    const int occurrence = seen[id]++;
    NodeKind kind;
    if (is_drug && (!is_protein || occurrence == 0))
      kind = NodeKind::Drug;
    else if (is_protein)
      kind = NodeKind::Protein;
    else
      throw ParseError("embeddings", lineno, "node '" + id + "' is not in the graph");
    nodes.push_back({kind, id});
    for (std::size_t c = 0; c < d; ++c) {
      double v = 0;
      if (!io::parse_double(fields[c + 1], v))
        throw ParseError("embeddings", lineno, "bad value '" + std::string(fields[c + 1]) + "'");
      vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  if (next()) throw ParseError("embeddings", lineno, "more rows than the header declares");
  std::vector<char> isolated(n);
  for (std::size_t r = 0; r < n; ++r) isolated[r] = vectors.row(static_cast<Eigen::Index>(r)).isZero(0.0);
  Node2VecParams params;
  params.dim = d;
  return make_table(std::move(nodes), std::move(vectors), std::move(isolated), params);
}

}  // namespace dtibench
