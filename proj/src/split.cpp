// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "dtibench/error.hpp"
#include "dtibench/rng.hpp"

namespace dtibench {

std::string_view to_string(SplitMode mode) {
  switch (mode) {
    case SplitMode::Sp: return "Sp";
    case SplitMode::Sd: return "Sd";
    case SplitMode::St: return "St";
  }
  return "Sp";
}

SplitMode parse_split_mode(std::string_view text) {
  if (text == "Sp" || text == "sp") return SplitMode::Sp;
  if (text == "Sd" || text == "sd") return SplitMode::Sd;
  if (text == "St" || text == "st") return SplitMode::St;
  throw Error(ErrorKind::Validation, "unknown split mode '" + std::string(text) + "' (expected Sp, Sd or St)");
}

namespace {

[[noreturn]] void neet(const std::string& what) {
  throw Error(ErrorKind::NotEnoughEdges, "not-enough-edges-to-train: " + what);
}

void check_ratios(const SplitRatios& r) {
  if (!(r.train > 0 && r.val > 0 && r.test > 0)) throw Error(ErrorKind::Validation, "split ratios must be positive");
  if (std::abs(r.train + r.val + r.test - 1.0) > 1e-9) throw Error(ErrorKind::Validation, "split ratios must sum to 1");
}

std::vector<EdgeRef> refs(const DTIGraph& g, std::span<const Edge> edges) {
  std::vector<EdgeRef> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back(g.ref(e));
  std::sort(out.begin(), out.end());
  return out;
}

/// Node of an edge on the constrained side.
std::uint32_t side_node(SplitMode mode, const Edge& e) { return mode == SplitMode::Sd ? e.drug : e.protein; }

std::size_t side_count(const DTIGraph& g, SplitMode mode) {
  return mode == SplitMode::Sd ? g.num_drugs() : g.num_proteins();
}

/// Greedy packing of nodes (weight = degree) into bins of relative capacity
/// `weights`: heaviest first, each into the bin whose relative load after
/// insertion is smallest. Empty bins are then filled with the lightest node of
/// the most loaded bin that can spare one.
std::vector<std::vector<std::uint32_t>> pack_nodes(const DTIGraph& g, SplitMode mode, std::span<const double> weights,
                                                   Rng& rng) {
  std::vector<std::size_t> degree(side_count(g, mode), 0);
  for (const auto& e : g.edges()) ++degree[side_node(mode, e)];
  std::vector<std::uint32_t> nodes;
  for (std::uint32_t v = 0; v < degree.size(); ++v) {
    if (degree[v] > 0) nodes.push_back(v);
  }
  shuffle(std::span(nodes), rng);
  std::stable_sort(nodes.begin(), nodes.end(), [&](auto a, auto b) { return degree[a] > degree[b]; });

  const std::size_t nbins = weights.size();
  std::vector<std::vector<std::uint32_t>> bins(nbins);
  std::vector<double> load(nbins, 0.0);
  for (auto v : nodes) {
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < nbins; ++b) {
      const double score = (load[b] + static_cast<double>(degree[v])) / weights[b];
      if (score < best_score) {
        best_score = score;
        best = b;
      }
    }
    bins[best].push_back(v);
    load[best] += static_cast<double>(degree[v]);
  }

  for (std::size_t b = 0; b < nbins; ++b) {
    if (!bins[b].empty()) continue;
    std::size_t donor = nbins;
    for (std::size_t c = 0; c < nbins; ++c) {
      if (bins[c].size() < 2) continue;
      if (donor == nbins || load[c] / weights[c] > load[donor] / weights[donor]) donor = c;
    }
    if (donor == nbins) {
      neet(std::to_string(nodes.size()) + " " + (mode == SplitMode::Sd ? "drugs" : "proteins") +
           " cannot fill " + std::to_string(nbins) + " folds");
    }
    auto& src = bins[donor];
    const auto lightest = std::min_element(src.begin(), src.end(), [&](auto x, auto y) {
      return degree[x] != degree[y] ? degree[x] < degree[y] : x < y;
    });
    bins[b].push_back(*lightest);
    load[b] += static_cast<double>(degree[*lightest]);
    load[donor] -= static_cast<double>(degree[*lightest]);
    src.erase(lightest);
  }
  return bins;
}

/// Shuffles `edges` and cuts them into train/val by the two weights.
void carve_val(std::vector<Edge>& train_side, double train_w, double val_w, Rng& rng, std::vector<Edge>& train,
               std::vector<Edge>& val) {
  shuffle(std::span(train_side), rng);
  const double w[] = {train_w, val_w};
  const auto counts = allocate_counts(train_side.size(), w);
  train.assign(train_side.begin(), train_side.begin() + static_cast<std::ptrdiff_t>(counts[0]));
  val.assign(train_side.begin() + static_cast<std::ptrdiff_t>(counts[0]), train_side.end());
}

Fold make_fold(const DTIGraph& g, std::span<const Edge> train, std::span<const Edge> val, std::span<const Edge> test) {
  return Fold{refs(g, train), refs(g, val), refs(g, test)};
}

}  // namespace

std::vector<std::size_t> allocate_counts(std::size_t total, std::span<const double> weights) {
  const std::size_t parts = weights.size();
  if (total < parts) neet(std::to_string(total) + " edges for " + std::to_string(parts) + " folds");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(parts);
  std::vector<double> frac(parts);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < parts; ++i) {
    double q = static_cast<double>(total) * weights[i] / sum;
    if (std::abs(q - std::round(q)) < 1e-9) q = std::round(q);
    counts[i] = static_cast<std::size_t>(std::floor(q));
    frac[i] = q - std::floor(q);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(parts);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % parts]];

  for (std::size_t i = 0; i < parts; ++i) {
    if (counts[i] > 0) continue;
    const auto donor = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    --counts[donor];
    counts[i] = 1;
  }
  return counts;
}

FoldPlan split(const DTIGraph& g, SplitMode mode, const SplitRatios& ratios, std::uint64_t seed) {
  check_ratios(ratios);
  if (g.num_edges() == 0) neet("graph has no edges");
  FoldPlan plan{mode, seed, 0, ratios, {}};
  auto rng = make_rng(seed, "split");

  std::vector<Edge> train, val, test;
  if (mode == SplitMode::Sp) {
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    shuffle(std::span(edges), rng);
    const double w[] = {ratios.train, ratios.val, ratios.test};
    const auto counts = allocate_counts(edges.size(), w);
    const auto c0 = static_cast<std::ptrdiff_t>(counts[0]);
    const auto c1 = static_cast<std::ptrdiff_t>(counts[1]);
    train.assign(edges.begin(), edges.begin() + c0);
    val.assign(edges.begin() + c0, edges.begin() + c0 + c1);
    test.assign(edges.begin() + c0 + c1, edges.end());
  } else {
    const double w[] = {ratios.train + ratios.val, ratios.test};
    const auto bins = pack_nodes(g, mode, w, rng);
    std::vector<char> in_test(side_count(g, mode), 0);
    for (auto v : bins[1]) in_test[v] = 1;
    std::vector<Edge> train_side;
    for (const auto& e : g.edges()) (in_test[side_node(mode, e)] ? test : train_side).push_back(e);
    carve_val(train_side, ratios.train, ratios.val, rng, train, val);
  }
  plan.folds.push_back(make_fold(g, train, val, test));
  return plan;
}

FoldPlan tvt_baseline_split(const DTIGraph& g, std::uint64_t seed) {
  return split(g, SplitMode::Sp, SplitRatios{0.75, 0.15, 0.10}, seed);
}

NodeAssignment assign_by_test_nodes(const DTIGraph& g, SplitMode mode, const std::set<std::string>& test_nodes) {
  if (mode == SplitMode::Sp) throw Error(ErrorKind::Validation, "node assignment needs mode Sd or St");
  for (const auto& id : test_nodes) {
    const bool known = mode == SplitMode::Sd ? g.drug_index(id).has_value() : g.protein_index(id).has_value();
    if (!known) throw Error(ErrorKind::MissingNode, "unknown node '" + id + "'");
  }
  NodeAssignment out;
  for (const auto& e : g.edges()) {
    auto r = g.ref(e);
    const auto& key = mode == SplitMode::Sd ? r.drug : r.protein;
    (test_nodes.contains(key) ? out.test : out.train_val).push_back(std::move(r));
  }
  return out;
}

std::vector<FoldPlan> kfold(const DTIGraph& g, SplitMode mode, const KFoldOptions& options, std::uint64_t seed) {
  if (options.k < 2) throw Error(ErrorKind::Validation, "k must be at least 2");
  if (options.repeats < 1) throw Error(ErrorKind::Validation, "repeats must be at least 1");
  if (options.val_fraction < 0.0 || options.val_fraction >= 1.0) {
    throw Error(ErrorKind::Validation, "val_fraction must be in [0, 1)");
  }
  if (g.num_edges() == 0) neet("graph has no edges");

  const double k = static_cast<double>(options.k);
  const double train_side = (k - 1.0) / k;
  const SplitRatios ratios{train_side * (1.0 - options.val_fraction), train_side * options.val_fraction, 1.0 / k};

  std::vector<FoldPlan> plans;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    auto rng = make_rng(seed, "kfold", r);
    FoldPlan plan{mode, seed, r, ratios, {}};

    // fold_of[e] = index of the fold whose test portion holds edge e
    std::vector<std::size_t> fold_of(g.num_edges());
    if (mode == SplitMode::Sp) {
      std::vector<std::size_t> order(g.num_edges());
      std::iota(order.begin(), order.end(), std::size_t{0});
      shuffle(std::span(order), rng);
      const std::vector<double> w(options.k, 1.0);
      const auto counts = allocate_counts(order.size(), w);
      std::size_t pos = 0;
      for (std::size_t f = 0; f < options.k; ++f) {
        for (std::size_t c = 0; c < counts[f]; ++c) fold_of[order[pos++]] = f;
      }
    } else {
      const std::vector<double> w(options.k, 1.0);
      const auto bins = pack_nodes(g, mode, w, rng);
      std::vector<std::size_t> node_fold(side_count(g, mode), 0);
      for (std::size_t f = 0; f < bins.size(); ++f) {
        for (auto v : bins[f]) node_fold[v] = f;
      }
      for (std::size_t i = 0; i < g.num_edges(); ++i) fold_of[i] = node_fold[side_node(mode, g.edges()[i])];
    }

    for (std::size_t f = 0; f < options.k; ++f) {
      std::vector<Edge> train_side_edges, train, val, test;
      for (std::size_t i = 0; i < g.num_edges(); ++i) {
        (fold_of[i] == f ? test : train_side_edges).push_back(g.edges()[i]);
      }
      if (test.empty() || train_side_edges.empty()) neet("fold " + std::to_string(f) + " is empty");
      if (options.val_fraction > 0.0) {
        auto fold_rng = make_rng(derive_seed(seed, "kfold-val", r), "fold", f);
        carve_val(train_side_edges, 1.0 - options.val_fraction, options.val_fraction, fold_rng, train, val);
      } else {
        train = std::move(train_side_edges);
      }
      plan.folds.push_back(make_fold(g, train, val, test));
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

PlanVerification verify_plan(const DTIGraph& g, const FoldPlan& plan) {
  PlanVerification out;
  auto report = [&](std::string msg) { out.violations.push_back(std::move(msg)); };

  std::set<EdgeRef> all;
  for (const auto& e : g.edges()) all.insert(g.ref(e));

  std::map<EdgeRef, std::size_t> test_hits;
  std::map<std::string, std::set<std::size_t>> node_test_folds;

  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const auto& fold = plan.folds[f];
    const std::string tag = "fold " + std::to_string(f) + ": ";
    std::map<EdgeRef, int> owner;
    const std::vector<EdgeRef>* parts[] = {&fold.train, &fold.val, &fold.test};
    for (int p = 0; p < 3; ++p) {
      for (const auto& e : *parts[p]) {
        if (!all.contains(e)) report(tag + "edge (" + e.drug + ", " + e.protein + ") is not in the graph");
        const auto [it, inserted] = owner.emplace(e, p);
        if (!inserted) report(tag + "edge (" + e.drug + ", " + e.protein + ") assigned twice");
      }
    }
    if (owner.size() != all.size()) {
      report(tag + std::to_string(owner.size()) + " of " + std::to_string(all.size()) + " edges assigned");
    }
    if (fold.train.empty()) report(tag + "empty train set");
    if (fold.test.empty()) report(tag + "empty test set");
    if (fold.val.empty() && plan.ratios.val > 0.0) report(tag + "empty val set");

    if (plan.mode != SplitMode::Sp) {
      auto key = [&](const EdgeRef& e) -> const std::string& {
        return plan.mode == SplitMode::Sd ? e.drug : e.protein;
      };
      std::set<std::string> seen_train;
      for (const auto& e : fold.train) seen_train.insert(key(e));
      for (const auto& e : fold.val) seen_train.insert(key(e));
      for (const auto& e : fold.test) {
        if (seen_train.contains(key(e))) {
          report(tag + std::string(plan.mode == SplitMode::Sd ? "drug " : "protein ") + key(e) +
                 " appears in both train/val and test");
          seen_train.erase(key(e));  // one report per node
        }
      }
      for (const auto& e : fold.test) node_test_folds[key(e)].insert(f);
    }
    for (const auto& e : fold.test) ++test_hits[e];
  }

  if (plan.folds.size() >= 2) {
    for (const auto& e : all) {
      const auto it = test_hits.find(e);
      const std::size_t hits = it == test_hits.end() ? 0 : it->second;
      if (hits != 1) {
        report("edge (" + e.drug + ", " + e.protein + ") is tested in " + std::to_string(hits) + " folds");
      }
    }
    for (const auto& [node, folds] : node_test_folds) {
      if (folds.size() != 1) report("node " + node + " is tested in " + std::to_string(folds.size()) + " folds");
    }
  }
  return out;
}

std::string format_plan_json(const FoldPlan& plan) {
  using nlohmann::json;
  auto edges = [](const std::vector<EdgeRef>& v) {
    json arr = json::array();
    for (const auto& e : v) arr.push_back(json::array({e.drug, e.protein}));
    return arr;
  };
  json j;
  j["mode"] = std::string(to_string(plan.mode));
  j["seed"] = plan.seed;
  j["repeat"] = plan.repeat;
  j["ratios"] = {{"train", plan.ratios.train}, {"val", plan.ratios.val}, {"test", plan.ratios.test}};
  j["folds"] = json::array();
  for (const auto& f : plan.folds) {
    j["folds"].push_back({{"train", edges(f.train)}, {"val", edges(f.val)}, {"test", edges(f.test)}});
  }
  return j.dump(1) + "\n";
}

FoldPlan parse_plan_json(std::string_view text) {
  using nlohmann::json;
  try {
    const auto j = json::parse(text);
    FoldPlan plan;
    plan.mode = parse_split_mode(j.at("mode").get<std::string>());
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.repeat = j.value("repeat", std::size_t{0});
    const auto& r = j.at("ratios");
    plan.ratios = {r.at("train").get<double>(), r.at("val").get<double>(), r.at("test").get<double>()};
    auto edges = [](const json& arr) {
      std::vector<EdgeRef> v;
      for (const auto& e : arr) v.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
      return v;
    };
    for (const auto& f : j.at("folds")) {
      plan.folds.push_back({edges(f.at("train")), edges(f.at("val")), edges(f.at("test"))});
    }
    return plan;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("invalid plan JSON: ") + e.what());
  }
}

ScReport sc_pair(const DTIGraph& train, const DTIGraph& test, bool strict) {
  ScReport report;
  std::set_intersection(train.drugs().begin(), train.drugs().end(), test.drugs().begin(), test.drugs().end(),
                        std::back_inserter(report.shared_drugs));
  std::set_intersection(train.proteins().begin(), train.proteins().end(), test.proteins().begin(),
                        test.proteins().end(), std::back_inserter(report.shared_proteins));
  if (strict && (!report.shared_drugs.empty() || !report.shared_proteins.empty())) {
    throw Error(ErrorKind::Overlap, "Sc pairing shares " + std::to_string(report.shared_drugs.size()) +
                                        " drugs and " + std::to_string(report.shared_proteins.size()) + " proteins");
  }
  const std::set<std::string> drop_d(report.shared_drugs.begin(), report.shared_drugs.end());
  const std::set<std::string> drop_p(report.shared_proteins.begin(), report.shared_proteins.end());
  report.test = remove_nodes(test, drop_d, drop_p);
  report.removed_edges = test.num_edges() - report.test.num_edges();
  if (report.test.num_edges() == 0) neet("test graph is empty after removing shared nodes");
  return report;
}

}  // namespace dtibench
