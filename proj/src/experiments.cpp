// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/experiments.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "dtibench/error.hpp"
#include "dtibench/io.hpp"
#include "dtibench/parallel.hpp"
#include "dtibench/rng.hpp"

namespace dtibench {

LabeledPairs labeled(const SampledDataset& ds) {
  LabeledPairs out;
  for (const auto& e : ds.positives) out.add(e, 1);
  for (const auto& n : ds.train_negatives) out.add(n.pair, 0);
  return out;
}

std::pair<LabeledPairs, LabeledPairs> stratified_split(const LabeledPairs& all, double fraction,
                                                       std::uint64_t seed) {
  if (!(fraction > 0 && fraction < 1)) throw Error(ErrorKind::Validation, "split fraction must be in (0, 1)");
  std::pair<LabeledPairs, LabeledPairs> out;
  for (int label : {1, 0}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (all.labels[i] == label) idx.push_back(i);
    auto rng = make_rng(seed, "stratified", static_cast<std::uint64_t>(label));
    shuffle(std::span(idx), rng);
    auto take = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * fraction));
    if (idx.size() >= 2) take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& part = k < take ? out.first : out.second;
      part.add(all.pairs[idx[k]], label);
    }
  }
  return out;
}

DTIGraph subgraph_with_edges(const DTIGraph& g, std::span<const EdgeRef> edges) {
  GraphBuilder b(g.name());
  for (const auto& d : g.drugs()) b.add_drug(d);
  for (const auto& p : g.proteins()) b.add_protein(p);
  for (const auto& e : edges) {
    if (!g.has_edge(e.drug, e.protein))
      throw Error(ErrorKind::MissingNode, "edge " + e.drug + " - " + e.protein + " is not in graph " + g.name());
    b.add_edge(e.drug, e.protein);
  }
  return b.build();
}

GridData make_grid_data(const DTIGraph& g, const Fold& fold, std::uint64_t seed) {
  auto sampled = sample_random(g, 1, derive_seed(seed, "grid-negatives"));
  auto negs = std::move(sampled.train_negatives);
  auto rng = make_rng(seed, "grid-negative-order");
  shuffle(std::span(negs), rng);
  GridData data;
  std::size_t next = 0;
  auto fill = [&](LabeledPairs& part, const std::vector<EdgeRef>& pos) {
    for (const auto& e : pos) part.add(e, 1);
    for (std::size_t k = 0; k < pos.size() && next < negs.size(); ++k) part.add(negs[next++].pair, 0);
  };
  fill(data.train, fold.train);
  fill(data.val, fold.val);
  fill(data.test, fold.test);
  return data;
}

void validate(const GridLattice& l) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Validation, "grid lattice: " + what); };
  if (l.size() == 0) fail("every axis needs at least one value");
  for (auto d : l.dims)
    if (d == 0) fail("dimensions must be positive");
  for (auto a : l.architectures) hidden_width(a);
  for (auto e : l.epochs)
    if (e == 0) fail("epochs must be positive");
  for (auto b : l.batch_divisors)
    if (b == 0) fail("batch divisors must be positive");
}

std::vector<GridConfig> enumerate(const GridLattice& l) {
  std::vector<GridConfig> out;
  out.reserve(l.size());
  for (auto d : l.dims)
    for (auto a : l.architectures)
      for (auto e : l.epochs)
        for (auto b : l.batch_divisors)
          for (auto loss : l.losses) out.push_back({d, a, e, b, loss});
  return out;
}

namespace {

struct Features {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

Features features(const EmbeddingTable& emb, const LabeledPairs& set) {
  return {pair_features(emb, set.pairs), set.labels};
}

SNNParams cell_params(const SNNParams& base, const GridConfig& c, std::uint64_t seed) {
  SNNParams p = base;
  p.architecture = c.architecture;
  p.hidden = hidden_width(c.architecture);
  p.epochs = c.epochs;
  p.batch_fraction = 1.0 / static_cast<double>(c.batch_divisor);
  p.loss = c.loss;
  p.seed = seed;
  return p;
}

void require_classes(const LabeledPairs& set, const char* what) {
  const auto pos = std::count(set.labels.begin(), set.labels.end(), 1);
  if (pos == 0 || static_cast<std::size_t>(pos) == set.size())
    throw Error(ErrorKind::NotEnoughEdges, std::string(what) + " set needs both positives and negatives");
}

double train_and_score(const Features& fit, const Features& eval, const SNNParams& p) {
  const auto result = train<double>(fit.x, fit.y, p);
  return auroc(predict(result.model, eval.x), eval.y);
}

}  // namespace

GridReport grid_search(const GridData& data, const EmbeddingProvider& embeddings, const GridLattice& lattice,
                       const GridOptions& options) {
  validate(lattice);
  validate(options.base);
  if (options.runs == 0) throw Error(ErrorKind::Validation, "grid search needs at least one run per cell");
  require_classes(data.train, "training");
  require_classes(data.val, "validation");
  require_classes(data.test, "test");

  struct DimFeatures {
    Features train, val, test;
  };
  std::map<std::size_t, DimFeatures> by_dim;
  for (auto d : lattice.dims) {
    if (by_dim.contains(d)) continue;
    const auto emb = embeddings(d);
    if (emb.dim() != d) throw Error(ErrorKind::Shape, "embedding provider returned the wrong dimension");
    by_dim.emplace(d, DimFeatures{features(emb, data.train), features(emb, data.val), features(emb, data.test)});
  }

  const auto configs = enumerate(lattice);
  std::vector<GridRow> rows(configs.size());
  auto run_seed = [&](std::size_t cell, std::size_t r) {
    return derive_seed(derive_seed(options.seed, "grid-cell", cell), "run", r);
  };
  parallel_for(configs.size(), options.jobs, [&](std::size_t i) {
    const auto& f = by_dim.at(configs[i].dim);
    std::vector<double> val(options.runs);
    for (std::size_t r = 0; r < options.runs; ++r)
      val[r] = train_and_score(f.train, f.val, cell_params(options.base, configs[i], run_seed(i, r)));
    rows[i] = GridRow{i, 0, configs[i], aggregate(val), std::nullopt};
  });

  std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
    if (a.val.mean != b.val.mean) return a.val.mean > b.val.mean;
    if (a.config.parameters() != b.config.parameters()) return a.config.parameters() < b.config.parameters();
    return a.index < b.index;
  });
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k].rank = k + 1;

  auto& best = rows.front();
  const auto& f = by_dim.at(best.config.dim);
  std::vector<double> test(options.runs);
  for (std::size_t r = 0; r < options.runs; ++r)
    test[r] = train_and_score(f.train, f.test, cell_params(options.base, best.config, run_seed(best.index, r)));
  best.test = aggregate(test);
  return {std::move(rows)};
}

std::string grid_csv(const GridReport& report) {
  std::string s =
      "rank,dim,architecture,hidden,epochs,batch,loss,parameters,val_auroc_mean,val_auroc_std,val_auroc,"
      "test_auroc_mean,test_auroc_std,test_auroc\n";
  for (const auto& r : report.rows) {
    const auto& c = r.config;
    s += std::to_string(r.rank) + "," + std::to_string(c.dim) + ",type" + std::to_string(c.architecture) + "," +
         std::to_string(hidden_width(c.architecture)) + "," + std::to_string(c.epochs) + ",1/" +
         std::to_string(c.batch_divisor) + "," + std::string(to_string(c.loss)) + "," +
         std::to_string(c.parameters()) + "," + io::format_double(r.val.mean) + "," + io::format_double(r.val.std) +
         "," + r.val.format();
    if (r.test)
      s += "," + io::format_double(r.test->mean) + "," + io::format_double(r.test->std) + "," + r.test->format();
    else
      s += ",NA,NA,NA";
    s += "\n";
  }
  return s;
}

LeakageMatrix leakage_matrix(std::span<const DTIGraph> graphs, const ExperimentOptions& options) {
  if (graphs.size() < 2) throw Error(ErrorKind::Validation, "leakage matrix needs at least two datasets");
  validate(options.model);
  const auto n = graphs.size();

  struct Prepared {
    EmbeddingTable emb;
    LabeledPairs balanced;
    Features all;
  };
  std::vector<Prepared> prep(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto np = options.embedding;
    np.seed = derive_seed(options.seed, "leakage-embedding", i);
    np.jobs = 1;
    prep[i].emb = embed(graphs[i], np);
    prep[i].balanced = labeled(sample_random(graphs[i], 1, derive_seed(options.seed, "leakage-negatives", i)));
    prep[i].all = features(prep[i].emb, prep[i].balanced);
  }

  LeakageMatrix m;
  for (const auto& g : graphs) m.datasets.push_back(g.name());
  m.auroc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.auprc = m.auroc;
  parallel_for(n, options.jobs, [&](std::size_t i) {
    auto p = options.model;
    p.seed = derive_seed(options.seed, "leakage-model", i);
    const auto [train_part, test_part] =
        stratified_split(prep[i].balanced, options.train_fraction, derive_seed(options.seed, "leakage-split", i));
    const auto tr = features(prep[i].emb, train_part), te = features(prep[i].emb, test_part);
    const auto diag = train<double>(tr.x, tr.y, p).model;
    const auto ii = static_cast<Eigen::Index>(i);
    const auto s = predict(diag, te.x);
    m.auroc(ii, ii) = auroc(s, te.y);
    m.auprc(ii, ii) = auprc(s, te.y);

    const auto cross = train<double>(prep[i].all.x, prep[i].all.y, p).model;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto& target = prep[j].all;
      if (target.x.cols() != prep[i].all.x.cols())
        throw Error(ErrorKind::Shape, "leakage matrix: embedding dimensions differ between datasets");
      const auto sj = predict(cross, target.x);
      m.auroc(ii, static_cast<Eigen::Index>(j)) = auroc(sj, target.y);
      m.auprc(ii, static_cast<Eigen::Index>(j)) = auprc(sj, target.y);
    }
  });
  return m;
}

SampleEvaluator embedding_evaluator(const EmbeddingTable& embeddings, const ExperimentOptions& options) {
  validate(options.model);
  return [&embeddings, options](const SampledDataset& ds, std::uint64_t seed) {
    const auto all = labeled(ds);
    require_classes(all, "sampled");
    const auto [train_part, test_part] = stratified_split(all, options.train_fraction, derive_seed(seed, "split"));
    auto p = options.model;
    p.seed = derive_seed(seed, "model");
    return train_and_score(features(embeddings, train_part), features(embeddings, test_part), p);
  };
}

PairScorer embedding_scorer(const EmbeddingTable& embeddings, const LabeledPairs& training,
                            const ExperimentOptions& options) {
  validate(options.model);
  require_classes(training, "training");
  return [&embeddings, training, options](std::span<const EdgeRef> pairs, std::uint64_t run_seed) {
    const auto f = features(embeddings, training);
    auto p = options.model;
    p.seed = run_seed;
    const auto model = train<double>(f.x, f.y, p).model;
    return predict(model, pair_features(embeddings, pairs));
  };
}

}  // namespace dtibench
