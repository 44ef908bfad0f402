// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/negsample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

#include "dtibench/error.hpp"
#include "dtibench/io.hpp"
#include "dtibench/rng.hpp"

namespace dtibench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool by_pair(const NegativeRecord& a, const NegativeRecord& b) { return a.pair < b.pair; }

}  // namespace

std::string_view to_string(NegativeWindow w) {
  switch (w) {
    case NegativeWindow::Train: return "train";
    case NegativeWindow::Holdout: return "holdout";
    case NegativeWindow::Random: return "random";
  }
  return "random";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Random: return "random";
    case Provenance::Window: return "window";
    case Provenance::WidenedWindow: return "widened-window";
    case Provenance::FallbackRandom: return "fallback-random";
  }
  return "random";
}

void validate(const WindowConfig& cfg) {
  if (!(0.0 < cfg.discard_max && cfg.discard_max < cfg.holdout_max && cfg.holdout_max < cfg.train_max &&
        cfg.train_max <= cfg.widen_limit)) {
    throw Error(ErrorKind::Validation, "window bounds must satisfy 0 < discard < holdout < train_max <= " +
                                          io::format_double(cfg.widen_limit));
  }
  if (cfg.ratio < 1) throw Error(ErrorKind::Validation, "negative ratio must be >= 1");
}

std::size_t SampledDataset::count(Provenance p) const {
  return static_cast<std::size_t>(
      std::count_if(train_negatives.begin(), train_negatives.end(), [p](const auto& r) { return r.provenance == p; }));
}

SampledDataset sample_random(const DTIGraph& g, std::size_t ratio, std::uint64_t seed) {
  if (ratio < 1) throw Error(ErrorKind::Validation, "negative ratio must be >= 1");
  const std::uint64_t nd = g.num_drugs();
  const std::uint64_t np = g.num_proteins();
  const std::uint64_t total = nd * np;
  const std::uint64_t non_edges = total - g.num_edges();
  const std::uint64_t need = ratio * g.num_edges();
  if (non_edges < need) {
    throw Error(ErrorKind::InsufficientNonEdges, "graph has " + std::to_string(non_edges) + " non-edges, need " +
                                                     std::to_string(need));
  }
  auto rng = make_rng(seed, "random-negatives");
  std::vector<std::uint64_t> chosen;  // linear index drug * np + protein
  chosen.reserve(need);

  if (non_edges <= 4 * need || non_edges <= (std::uint64_t{1} << 20)) {
    std::vector<std::uint64_t> pool;
    pool.reserve(non_edges);
    for (std::uint32_t d = 0; d < nd; ++d) {
      for (std::uint32_t p = 0; p < np; ++p) {
        if (!g.has_edge(d, p)) pool.push_back(std::uint64_t{d} * np + p);
      }
    }
    // partial Fisher-Yates: the first `need` slots are a uniform sample
    for (std::uint64_t i = 0; i < need; ++i) {
      const auto j = i + uniform_index(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(need));
  } else {
    std::unordered_set<std::uint64_t> seen;
    while (chosen.size() < need) {
      const auto idx = uniform_index(rng, total);
      const auto d = static_cast<std::uint32_t>(idx / np);
      const auto p = static_cast<std::uint32_t>(idx % np);
      if (g.has_edge(d, p) || !seen.insert(idx).second) continue;
      chosen.push_back(idx);
    }
  }
  std::sort(chosen.begin(), chosen.end());

  SampledDataset ds;
  ds.positives = g.edge_refs();
  for (auto idx : chosen) {
    const auto d = static_cast<std::uint32_t>(idx / np);
    const auto p = static_cast<std::uint32_t>(idx % np);
    ds.train_negatives.push_back(
        {{g.drugs()[d], g.proteins()[p]}, {}, kNaN, NegativeWindow::Random, Provenance::Random, kNaN});
  }
  return ds;
}

SampledDataset sample_rmsd_window(const DTIGraph& g, const SimilarityMatrix& rmsd, const WindowConfig& cfg) {
  validate(cfg);
  const auto np = static_cast<std::uint32_t>(g.num_proteins());
  std::vector<Eigen::Index> mat_index(np);
  for (std::uint32_t p = 0; p < np; ++p) {
    const auto idx = rmsd.index_of(g.proteins()[p]);
    if (!idx) throw Error(ErrorKind::MissingNode, "protein '" + g.proteins()[p] + "' is missing from the RMSD matrix");
    mat_index[p] = static_cast<Eigen::Index>(*idx);
  }
  auto dist = [&](std::uint32_t a, std::uint32_t b) { return rmsd.values(mat_index[a], mat_index[b]); };

  // Per anchor protein: other proteins with a known RMSD, ascending.
  std::map<std::uint32_t, std::vector<std::pair<double, std::uint32_t>>> ranked;
  auto ranking = [&](std::uint32_t anchor) -> const std::vector<std::pair<double, std::uint32_t>>& {
    auto [it, inserted] = ranked.try_emplace(anchor);
    if (inserted) {
      for (std::uint32_t p = 0; p < np; ++p) {
        const double r = dist(anchor, p);
        if (p != anchor && !std::isnan(r)) it->second.emplace_back(r, p);
      }
      std::sort(it->second.begin(), it->second.end());
    }
    return it->second;
  };

  SampledDataset ds;
  ds.positives = g.edge_refs();

  // Holdout pass first so no train negative can collide with a holdout pair.
  std::set<std::pair<std::uint32_t, std::uint32_t>> holdout_pairs;
  for (const auto& e : g.edges()) {
    for (const auto& [r, p] : ranking(e.protein)) {
      if (r >= cfg.holdout_max) break;
      if (r < cfg.discard_max || g.has_edge(e.drug, p)) continue;
      if (holdout_pairs.emplace(e.drug, p).second) {
        ds.holdout_negatives.push_back({{g.drugs()[e.drug], g.proteins()[p]},
                                        g.proteins()[e.protein],
                                        r,
                                        NegativeWindow::Holdout,
                                        Provenance::Window,
                                        kNaN});
      }
    }
  }

  // Train pass, one independent stream per drug; edges are grouped by drug.
  const auto edges = g.edges();
  for (std::size_t begin = 0; begin < edges.size();) {
    const auto d = edges[begin].drug;
    std::size_t end = begin;
    while (end < edges.size() && edges[end].drug == d) ++end;

    auto rng = make_rng(cfg.seed, "rmsd-window", d);
    std::set<std::uint32_t> used;
    auto usable = [&](std::uint32_t p) {
      return !g.has_edge(d, p) && !used.contains(p) && !holdout_pairs.contains({d, p});
    };

    for (std::size_t k = begin; k < end; ++k) {
      const auto anchor = edges[k].protein;
      const auto& row = ranking(anchor);
      for (std::size_t draw = 0; draw < cfg.ratio; ++draw) {
        std::vector<std::pair<double, std::uint32_t>> candidates;
        double t = cfg.train_max;
        for (;;) {
          candidates.clear();
          auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(cfg.holdout_max, std::uint32_t{0}));
          for (; it != row.end() && it->first <= t; ++it) {
            if (usable(it->second)) candidates.push_back(*it);
          }
          if (!candidates.empty() || t >= cfg.widen_limit) break;
          t = std::min(cfg.widen_limit, t + 1.0);
        }

        NegativeRecord rec{{g.drugs()[d], {}}, g.proteins()[anchor], kNaN, NegativeWindow::Train, Provenance::Window, t};
        std::uint32_t pick;
        if (!candidates.empty()) {
          const auto& c = candidates[uniform_index(rng, candidates.size())];
          pick = c.second;
          rec.rmsd = c.first;
          if (t > cfg.train_max) rec.provenance = Provenance::WidenedWindow;
        } else {
          std::vector<std::uint32_t> pool;
          for (std::uint32_t p = 0; p < np; ++p) {
            if (usable(p)) pool.push_back(p);
          }
          if (pool.empty()) {
            ++ds.unfilled;
            continue;
          }
          pick = pool[uniform_index(rng, pool.size())];
          rec.rmsd = dist(anchor, pick);
          rec.provenance = Provenance::FallbackRandom;
          rec.t_effective = kNaN;
        }
        used.insert(pick);
        rec.pair.protein = g.proteins()[pick];
        ds.train_negatives.push_back(std::move(rec));
      }
    }
    begin = end;
  }
  std::sort(ds.train_negatives.begin(), ds.train_negatives.end(), by_pair);
  std::sort(ds.holdout_negatives.begin(), ds.holdout_negatives.end(), by_pair);
  return ds;
}

std::string format_sampled_tsv(const SampledDataset& ds) {
  std::string out = "drug_id\tprotein_id\tlabel\twindow\trmsd\tprovenance\n";
  for (const auto& e : ds.positives) out += e.drug + "\t" + e.protein + "\t1\tpositive\tNA\tpositive\n";
  auto emit = [&](const NegativeRecord& r) {
    std::string prov(to_string(r.provenance));
    if (r.provenance == Provenance::WidenedWindow) prov += ":t=" + io::format_double(r.t_effective);
    out += r.pair.drug + "\t" + r.pair.protein + "\t0\t" + std::string(to_string(r.window)) + "\t" +
           io::format_double(r.rmsd) + "\t" + prov + "\n";
  };
  for (const auto& r : ds.train_negatives) emit(r);
  for (const auto& r : ds.holdout_negatives) emit(r);
  return out;
}

SampledDataset parse_sampled_tsv(std::string_view text) {
  SampledDataset ds;
  std::size_t lineno = 0;
  for (auto line : io::split(text, '\n')) {
    ++lineno;
    line = io::trim(line);
    if (line.empty() || lineno == 1) continue;
    const auto cols = io::split(line, '\t');
    if (cols.size() != 6) throw ParseError("sample", lineno, "expected 6 columns");
    EdgeRef pair{std::string(cols[0]), std::string(cols[1])};
    if (cols[2] == "1") {
      ds.positives.push_back(std::move(pair));
      continue;
    }
    NegativeRecord rec{std::move(pair), {}, kNaN, NegativeWindow::Random, Provenance::Random, kNaN};
    if (cols[4] != "NA" && !io::parse_double(cols[4], rec.rmsd)) throw ParseError("sample", lineno, "bad rmsd");
    const auto prov = cols[5];
    if (prov == "window") {
      rec.provenance = Provenance::Window;
    } else if (prov.starts_with("widened-window")) {
      rec.provenance = Provenance::WidenedWindow;
      const auto eq = prov.find('=');
      if (eq != std::string_view::npos) io::parse_double(prov.substr(eq + 1), rec.t_effective);
    } else if (prov == "fallback-random") {
      rec.provenance = Provenance::FallbackRandom;
    } else if (prov != "random") {
      throw ParseError("sample", lineno, "unknown provenance '" + std::string(prov) + "'");
    }
    if (cols[3] == "holdout") {
      rec.window = NegativeWindow::Holdout;
      ds.holdout_negatives.push_back(std::move(rec));
    } else {
      rec.window = cols[3] == "train" ? NegativeWindow::Train : NegativeWindow::Random;
      ds.train_negatives.push_back(std::move(rec));
    }
  }
  return ds;
}

std::vector<SweepRow> window_sweep(const DTIGraph& g, const SimilarityMatrix& rmsd, std::span<const double> t_values,
                                   const WindowConfig& base, const SampleEvaluator& evaluate, std::size_t repeats,
                                   std::uint64_t seed) {
  if (repeats < 1) throw Error(ErrorKind::Validation, "repeats must be >= 1");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    SweepRow row{"t=" + io::format_double(t_values[i]), t_values[i], {}, {}, 0};
    for (std::size_t r = 0; r < repeats; ++r) {
      WindowConfig cfg = base;
      cfg.train_max = t_values[i];
      cfg.seed = derive_seed(seed, "sweep-sample", r);
      const auto ds = sample_rmsd_window(g, rmsd, cfg);
      row.fallbacks += ds.count(Provenance::WidenedWindow) + ds.count(Provenance::FallbackRandom);
      row.aurocs.push_back(evaluate(ds, derive_seed(seed, "sweep-model", r)));
    }
    row.summary = aggregate(row.aurocs);
    rows.push_back(std::move(row));
  }
  SweepRow random{"random", std::numeric_limits<double>::quiet_NaN(), {}, {}, 0};
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto ds = sample_random(g, base.ratio, derive_seed(seed, "sweep-sample", r));
    random.aurocs.push_back(evaluate(ds, derive_seed(seed, "sweep-model", r)));
  }
  random.summary = aggregate(random.aurocs);
  rows.push_back(std::move(random));
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "window,t,auroc_mean,auroc_std,auroc,fallbacks\n";
  for (const auto& r : rows) {
    out += r.label + "," + (std::isnan(r.t) ? std::string("NA") : io::format_double(r.t)) + "," +
           io::format_fixed(r.summary.mean, 6) + "," + io::format_fixed(r.summary.std, 6) + "," +
           r.summary.format(3) + "," + std::to_string(r.fallbacks) + "\n";
  }
  return out;
}

double sweep_trend(std::span<const SweepRow> rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (const auto& r : rows) {
    if (std::isnan(r.t)) continue;
    sx += r.t;
    sy += r.summary.mean;
    sxx += r.t * r.t;
    sxy += r.t * r.summary.mean;
    n += 1;
  }
  const double den = n * sxx - sx * sx;
  return n < 2 || den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

std::vector<HoldoutScore> score_holdout(const PairScorer& scorer, std::span<const NegativeRecord> holdout,
                                        std::size_t runs, std::uint64_t seed) {
  if (runs < 1) throw Error(ErrorKind::Validation, "runs must be >= 1");
  std::vector<EdgeRef> pairs;
  for (const auto& r : holdout) pairs.push_back(r.pair);
  std::vector<HoldoutScore> rows(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) rows[i].pair = pairs[i];
  for (std::size_t run = 0; run < runs; ++run) {
    const auto probs = scorer(pairs, derive_seed(seed, "holdout-run", run));
    if (probs.size() != pairs.size()) throw Error(ErrorKind::Shape, "scorer returned wrong number of probabilities");
    for (std::size_t i = 0; i < pairs.size(); ++i) rows[i].probabilities.push_back(probs[i]);
  }
  for (auto& row : rows) row.summary = aggregate(row.probabilities);
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.summary.mean != b.summary.mean ? a.summary.mean > b.summary.mean : a.pair < b.pair;
  });
  return rows;
}

std::string holdout_csv(std::span<const HoldoutScore> rows) {
  std::string out = "drug_id,protein_id";
  const std::size_t runs = rows.empty() ? 0 : rows.front().probabilities.size();
  for (std::size_t r = 0; r < runs; ++r) out += ",run" + std::to_string(r + 1);
  out += ",mean,std\n";
  for (const auto& row : rows) {
    out += row.pair.drug + "," + row.pair.protein;
    for (double p : row.probabilities) out += "," + io::format_fixed(p, 6);
    out += "," + io::format_fixed(row.summary.mean, 6) + "," + io::format_fixed(row.summary.std, 6) + "\n";
  }
  return out;
}

}  // namespace dtibench
