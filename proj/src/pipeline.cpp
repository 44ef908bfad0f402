// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/pipeline.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "dtibench/chem.hpp"
#include "dtibench/experiments.hpp"
#include "dtibench/graph.hpp"
#include "dtibench/io.hpp"
#include "dtibench/metrics.hpp"
#include "dtibench/negsample.hpp"
#include "dtibench/node2vec.hpp"
#include "dtibench/parallel.hpp"
#include "dtibench/rng.hpp"
#include "dtibench/similarity.hpp"
#include "dtibench/snn.hpp"
#include "dtibench/split.hpp"
#include "dtibench/structure.hpp"

namespace dtibench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> problems)
    : Error(ErrorKind::Validation, std::to_string(problems.size()) + " configuration problem(s): " + join(problems, "; ")),
      problems_(std::move(problems)) {}

ConfigReader::ConfigReader(json config) : config_(std::move(config)) {
  if (!config_.is_object()) {
    problems_.push_back("configuration must be a JSON object");
    config_ = json::object();
  }
}

const json* ConfigReader::find(std::string_view key) const {
  auto it = config_.find(std::string(key));
  if (it == config_.end() || it->is_null()) return nullptr;
  return &*it;
}

bool ConfigReader::has(std::string_view key) const { return find(key) != nullptr; }

std::string ConfigReader::text(std::string_view key, std::optional<std::string> fallback) {
  const json* v = find(key);
  std::string out;
  if (!v) {
    if (!fallback) {
      fail("missing required option '" + std::string(key) + "'");
      return {};
    }
    out = *fallback;
  } else if (v->is_string()) {
    out = v->get<std::string>();
  } else {
    fail("option '" + std::string(key) + "' must be a string");
    return fallback.value_or("");
  }
  resolved_[std::string(key)] = out;
  return out;
}

std::int64_t ConfigReader::integer(std::string_view key, std::optional<std::int64_t> fallback, std::int64_t min) {
  const json* v = find(key);
  std::int64_t out = 0;
  if (!v) {
    if (!fallback) {
      fail("missing required option '" + std::string(key) + "'");
      return min;
    }
    out = *fallback;
  } else if (v->is_number_integer()) {
    out = v->get<std::int64_t>();
  } else {
    fail("option '" + std::string(key) + "' must be an integer, got " + v->dump());
    return fallback.value_or(min);
  }
  if (out < min) {
    fail("option '" + std::string(key) + "' must be at least " + std::to_string(min) + ", got " + std::to_string(out));
    return fallback.value_or(min);
  }
  resolved_[std::string(key)] = out;
  return out;
}

double ConfigReader::real(std::string_view key, std::optional<double> fallback) {
  const json* v = find(key);
  double out = 0;
  if (!v) {
    if (!fallback) {
      fail("missing required option '" + std::string(key) + "'");
      return 0;
    }
    out = *fallback;
  } else if (v->is_number()) {
    out = v->get<double>();
  } else {
    fail("option '" + std::string(key) + "' must be a number, got " + v->dump());
    return fallback.value_or(0);
  }
  if (!std::isfinite(out)) fail("option '" + std::string(key) + "' must be finite");
  resolved_[std::string(key)] = out;
  return out;
}

bool ConfigReader::flag(std::string_view key, bool fallback) {
  const json* v = find(key);
  bool out = fallback;
  if (v) {
    if (v->is_boolean())
      out = v->get<bool>();
    else
      fail("option '" + std::string(key) + "' must be true or false");
  }
  resolved_[std::string(key)] = out;
  return out;
}

std::vector<std::string> ConfigReader::texts(std::string_view key, std::optional<std::vector<std::string>> fallback) {
  const json* v = find(key);
  std::vector<std::string> out;
  if (!v) {
    if (!fallback) {
      fail("missing required option '" + std::string(key) + "'");
      return {};
    }
    out = *fallback;
  } else if (v->is_string()) {
    const auto& whole = v->get_ref<const std::string&>();
    for (auto part : io::split(whole, ','))
      if (!io::trim(part).empty()) out.emplace_back(io::trim(part));
  } else if (v->is_array()) {
    for (const auto& item : *v) {
      if (item.is_string()) {
        const auto& whole = item.get_ref<const std::string&>();
        for (auto part : io::split(whole, ','))
          if (!io::trim(part).empty()) out.emplace_back(io::trim(part));
      } else if (item.is_number()) {
        out.push_back(item.dump());
      } else {
        fail("option '" + std::string(key) + "' must list strings or numbers");
        return fallback.value_or(std::vector<std::string>{});
      }
    }
  } else if (v->is_number()) {
    out.push_back(v->dump());
  } else {
    fail("option '" + std::string(key) + "' must be a list");
    return fallback.value_or(std::vector<std::string>{});
  }
  if (out.empty()) fail("option '" + std::string(key) + "' must not be empty");
  resolved_[std::string(key)] = out;
  return out;
}

std::vector<double> ConfigReader::reals(std::string_view key, std::optional<std::vector<double>> fallback) {
  if (!find(key)) {
    if (!fallback) {
      fail("missing required option '" + std::string(key) + "'");
      return {};
    }
    resolved_[std::string(key)] = *fallback;
    return *fallback;
  }
  const auto items = texts(key, std::vector<std::string>{});
  std::vector<double> out;
  for (const auto& item : items) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      double lo = 0, hi = 0;
      if (!io::parse_double(item.substr(0, dots), lo) || !io::parse_double(item.substr(dots + 2), hi) ||
          lo != std::floor(lo) || hi != std::floor(hi) || hi < lo) {
        fail("option '" + std::string(key) + "': bad range '" + item + "' (expected a..b with integers a <= b)");
        continue;
      }
      for (double x = lo; x <= hi; x += 1) out.push_back(x);
      continue;
    }
    double x = 0;
    if (!io::parse_double(item, x) || !std::isfinite(x)) {
      fail("option '" + std::string(key) + "': '" + item + "' is not a number");
      continue;
    }
    out.push_back(x);
  }
  resolved_[std::string(key)] = out;
  return out;
}

fs::path ConfigReader::existing(std::string_view key) {
  const auto p = text(key);
  if (!p.empty() && !fs::exists(p)) fail("option '" + std::string(key) + "': path '" + p + "' does not exist");
  return p;
}

std::optional<fs::path> ConfigReader::optional_existing(std::string_view key) {
  if (!has(key)) return std::nullopt;
  return existing(key);
}

std::uint64_t ConfigReader::seed() {
  const json* v = find("seed");
  if (!v) {
    fail("missing required option 'seed' (runs never default to a clock-based seed)");
    return 0;
  }
  if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
    fail("option 'seed' must be a non-negative integer");
    return 0;
  }
  const auto s = v->get<std::uint64_t>();
  resolved_["seed"] = s;
  return s;
}

void ConfigReader::check(std::span<const std::string_view> known_keys) {
  if (!known_keys.empty()) {
    for (const auto& [key, value] : config_.items()) {
      const bool known = std::any_of(known_keys.begin(), known_keys.end(), [&](std::string_view k) { return k == key; });
      if (!known) fail("unknown option '" + key + "'");
    }
  }
  if (!problems_.empty()) throw ConfigErrors(problems_);
}

std::string config_key(std::string_view option_name) {
  std::string k(option_name);
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

// ---------------------------------------------------------------------------
// Command table

namespace {

using T = OptionType;

const std::vector<OptionSpec> kShared{
    {"out", T::Text, "output directory"},
    {"seed", T::Integer, "root seed for every random stream"},
    {"jobs", T::Integer, "worker threads (default 1)"},
};
const std::vector<OptionSpec> kGraph{
    {"edges", T::Text, "edge list, drug<TAB>protein per row"},
    {"swap", T::Flag, "edge list columns are protein, drug"},
};
const std::vector<OptionSpec> kEmbedding{
    {"dim", T::Integer, "embedding dimension (default 90)"},
    {"p", T::Real, "return bias (default 1)"},
    {"q", T::Real, "in-out bias (default 1)"},
    {"walks", T::Integer, "walks per node (default 10)"},
    {"walk-length", T::Integer, "nodes per walk (default 80)"},
    {"window", T::Integer, "context window (default 10)"},
    {"negatives", T::Integer, "negative samples per context pair (default 5)"},
    {"n2v-epochs", T::Integer, "passes over the walk corpus (default 5)"},
    {"n2v-lr", T::Real, "initial learning rate (default 0.025)"},
    {"hogwild", T::Flag, "lock-free parallel embedding training; not reproducible"},
};
const std::vector<OptionSpec> kModel{
    {"arch", T::Integer, "architecture type 1-4 = hidden width 32/64/128/256 (default 1)"},
    {"epochs", T::Integer, "training epochs (default 10)"},
    {"batch", T::Integer, "batch size = dataset size / batch (default 16)"},
    {"loss", T::Text, "bce or focal (default bce)"},
    {"lr", T::Real, "Adam learning rate (default 1e-3)"},
    {"gamma", T::Real, "focal gamma (default 2)"},
    {"alpha", T::Real, "focal alpha, negative disables (default 0.25)"},
    {"weight", T::Real, "per-sample loss weight w_k (default 1)"},
};
const std::vector<OptionSpec> kSplit{
    {"mode", T::Text, "Sp, Sd or St (default Sp)"},
    {"ratios", T::List, "train,val,test fractions (default 0.75,0.15,0.10)"},
};
const std::vector<OptionSpec> kWindow{
    {"discard", T::Real, "upper bound of the discarded RMSD window in Å (default 2.5)"},
    {"holdout", T::Real, "upper bound of the holdout RMSD window in Å (default 5)"},
    {"widen-limit", T::Real, "largest train-window bound tried before random fallback (default 20)"},
    {"ratio", T::Integer, "negatives per positive (default 1)"},
};

std::vector<OptionSpec> concat(std::initializer_list<const std::vector<OptionSpec>*> groups,
                               std::vector<OptionSpec> own) {
  std::vector<OptionSpec> out;
  for (const auto* g : groups) out.insert(out.end(), g->begin(), g->end());
  out.insert(out.end(), own.begin(), own.end());
  return out;
}

std::vector<OptionSpec> without(std::vector<OptionSpec> opts, std::string_view name) {
  std::erase_if(opts, [&](const OptionSpec& o) { return o.name == name; });
  return opts;
}

const std::vector<CommandSpec>& specs() {
  static const auto kEmbeddingNoDim = without(kEmbedding, "dim");
  static const auto kGraphNoEdges = without(kGraph, "edges");
  static const std::vector<CommandSpec> table{
      {"stats", "dataset statistics table row and degree histograms",
       concat({&kShared},
              {{"edges", T::Text, "edge list"},
               {"swap", T::Flag, "edge list columns are protein, drug"},
               {"affinity", T::Text, "drug<TAB>protein<TAB>Kd table to binarise instead of an edge list"},
               {"threshold", T::Real, "Kd threshold, edges are Kd < threshold (default 30)"},
               {"name", T::Text, "dataset label (default: file stem)"},
               {"degree-hist", T::Flag, "also write degree histograms"},
               {"no-isolated-components", T::Flag, "do not count isolated nodes as components"}})},
      {"split", "train/val/test plans with verification",
       concat({&kShared, &kGraph, &kSplit},
              {{"k", T::Integer, "folds per repeat; 1 = single split (default 1)"},
               {"repeats", T::Integer, "independent repeats (default 1)"},
               {"val-fraction", T::Real, "k-fold only: share of each training side held for validation (default 0)"}})},
      {"verify-plan", "recheck a plan file against its graph",
       concat({&kShared, &kGraph}, {{"plan", T::Text, "plan JSON"}})},
      {"sample", "negative sampling",
       concat({&kShared, &kGraph, &kWindow},
              {{"sampler", T::Text, "random or rmsd (default random)"},
               {"rmsd-matrix", T::Text, "protein RMSD matrix TSV (rmsd sampler)"},
               {"t", T::Real, "upper bound of the train RMSD window in Å (default 6)"}})},
      {"rmsd", "pairwise C-alpha RMSD between structures",
       concat({&kShared},
              {{"structures", T::Text, "directory of .pdb files, one protein each"},
               {"cache", T::Text, "matrix cache file reused when ids and parameters match"},
               {"chain", T::Text, "chain identifier to read (default: first chain with a CA atom)"},
               {"cycles", T::Integer, "outlier rejection cycles (default 5)"},
               {"cutoff", T::Real, "per-pair rejection cutoff in Å (default 2)"},
               {"gap-open", T::Real, "alignment gap open score (default -10)"},
               {"gap-extend", T::Real, "alignment gap extension score (default -1)"},
               {"max-resolution", T::Real, "keep X-ray structures below this resolution (default 2)"},
               {"min-plddt", T::Real, "keep predicted structures above this mean pLDDT (default 70)"},
               {"no-quality-filter", T::Flag, "keep every structure"},
               {"hist-bin", T::Real, "histogram bin width in Å (default 0.5)"}})},
      {"tanimoto", "pairwise Tanimoto similarity of drug fingerprints",
       concat({&kShared},
              {{"fingerprints", T::Text, "drug<TAB>hex fingerprint table"},
               {"width", T::Integer, "fingerprint width in bits (default 2048)"},
               {"hist-bin", T::Real, "histogram bin width (default 0.05)"}})},
      {"embed", "node2vec embeddings", concat({&kShared, &kGraph, &kEmbedding}, {})},
      {"train", "train and evaluate the baseline classifier",
       concat({&kShared, &kGraph, &kSplit, &kEmbedding, &kModel},
              {{"embeddings", T::Text, "precomputed embedding file (default: embed the training edges)"}})},
      {"gridsearch", "hyperparameter grid over the baseline",
       concat({&kShared, &kGraph, &kSplit, &kEmbeddingNoDim},
              {{"dims", T::List, "embedding dimensions (default 25,90,180,256,480,720)"},
               {"archs", T::List, "architecture types (default 1,2,3,4)"},
               {"epoch-grid", T::List, "epoch counts (default 2,5,10,50)"},
               {"batches", T::List, "batch divisors (default 16,64)"},
               {"losses", T::List, "losses (default bce,focal)"},
               {"runs", T::Integer, "training runs per cell (default 3)"},
               {"lr", T::Real, "Adam learning rate (default 1e-3)"},
               {"gamma", T::Real, "focal gamma (default 2)"},
               {"alpha", T::Real, "focal alpha (default 0.25)"},
               {"weight", T::Real, "per-sample loss weight (default 1)"}})},
      {"leakage", "cross-dataset AUROC matrix",
       concat({&kShared, &kGraphNoEdges, &kEmbedding, &kModel},
              {{"edges", T::List, "two or more edge lists"},
               {"repeats", T::Integer, "seeds averaged per cell (default 1)"},
               {"train-fraction", T::Real, "diagonal train share (default 0.7)"}})},
      {"sweep", "RMSD train-window sweep plus random baseline",
       concat({&kShared, &kGraph, &kWindow, &kEmbedding, &kModel},
              {{"rmsd-matrix", T::Text, "protein RMSD matrix TSV"},
               {"t", T::List, "train-window upper bounds, list or a..b (default 6..20)"},
               {"repeats", T::Integer, "repeats per window (default 5)"},
               {"train-fraction", T::Real, "train share of each sampled set (default 0.7)"},
               {"holdout-runs", T::Integer, "score holdout negatives over this many runs (default 0)"}})},
      {"fetch", "download or copy a registered dataset into the cache",
       {{"out", T::Text, "output directory"},
        {"manifest", T::Text, "dataset manifest JSON"},
        {"name", T::Text, "dataset name"},
        {"cache-dir", T::Text, "cache directory (default: DTIBENCH_CACHE)"}}},
  };
  return table;
}

}  // namespace

std::span<const CommandSpec> command_specs() { return specs(); }

// ---------------------------------------------------------------------------
// Commands

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Run {
  fs::path out;
  std::vector<std::string> artifacts;
  json summary = json::object();
  std::ostream& log;

  void write(const std::string& rel, std::string_view text) {
    io::write_text(out / rel, text);
    artifacts.push_back(rel);
  }
};

struct Common {
  fs::path out;
  unsigned jobs = 1;
};

Common read_common(ConfigReader& r) {
  Common c;
  c.out = r.text("out");
  c.jobs = static_cast<unsigned>(r.integer("jobs", 1, 1));
  return c;
}

DTIGraph load_graph(const fs::path& path, bool swap) { return load_edge_list(path, {.swap_columns = swap, .name = {}}).graph; }

struct GraphInput {
  fs::path path;
  bool swap = false;
};

GraphInput read_graph(ConfigReader& r) { return {r.existing("edges"), r.flag("swap")}; }

Node2VecParams read_embedding(ConfigReader& r, std::uint64_t seed, unsigned jobs, bool with_dim = true) {
  Node2VecParams p;
  if (with_dim) p.dim = static_cast<std::size_t>(r.integer("dim", 90, 1));
  p.p = r.real("p", 1.0);
  p.q = r.real("q", 1.0);
  p.walks_per_node = static_cast<std::size_t>(r.integer("walks", 10, 1));
  p.walk_length = static_cast<std::size_t>(r.integer("walk_length", 80, 2));
  p.window = static_cast<std::size_t>(r.integer("window", 10, 1));
  p.negatives = static_cast<std::size_t>(r.integer("negatives", 5, 0));
  p.epochs = static_cast<std::size_t>(r.integer("n2v_epochs", 5, 1));
  p.learning_rate = r.real("n2v_lr", 0.025);
  p.jobs = r.flag("hogwild") ? jobs : 1;
  p.seed = derive_seed(seed, "embedding");
  try {
    validate(p);
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return p;
}

SNNParams read_model(ConfigReader& r, std::uint64_t seed) {
  SNNParams p;
  const auto arch = static_cast<int>(r.integer("arch", 1, 1));
  try {
    p.hidden = hidden_width(arch);
    p.architecture = arch;
  } catch (const Error& e) {
    r.fail(e.what());
  }
  p.epochs = static_cast<std::size_t>(r.integer("epochs", 10, 1));
  p.batch_fraction = 1.0 / static_cast<double>(r.integer("batch", 16, 1));
  try {
    p.loss = parse_loss_kind(r.text("loss", "bce"));
  } catch (const Error& e) {
    r.fail(e.what());
  }
  p.learning_rate = r.real("lr", 1e-3);
  p.focal_gamma = r.real("gamma", 2.0);
  p.focal_alpha = r.real("alpha", 0.25);
  p.rescale_weight = r.real("weight", 1.0);
  p.seed = derive_seed(seed, "model");
  try {
    validate(p);
  } catch (const Error& e) {
    r.fail(e.what());
  }
  return p;
}

SplitMode read_mode(ConfigReader& r) {
  try {
    return parse_split_mode(r.text("mode", "Sp"));
  } catch (const Error& e) {
    r.fail(e.what());
    return SplitMode::Sp;
  }
}

SplitRatios read_ratios(ConfigReader& r) {
  const auto v = r.reals("ratios", std::vector<double>{0.75, 0.15, 0.10});
  if (v.size() != 3) {
    r.fail("option 'ratios' needs exactly three values");
    return {};
  }
  if (v[0] <= 0 || v[1] <= 0 || v[2] <= 0 || std::abs(v[0] + v[1] + v[2] - 1.0) > 1e-9)
    r.fail("option 'ratios' must be positive and sum to 1");
  return {v[0], v[1], v[2]};
}

WindowConfig read_window(ConfigReader& r, std::uint64_t seed, bool with_t) {
  WindowConfig w;
  w.discard_max = r.real("discard", 2.5);
  w.holdout_max = r.real("holdout", 5.0);
  w.widen_limit = r.real("widen_limit", 20.0);
  w.ratio = static_cast<std::size_t>(r.integer("ratio", 1, 1));
  if (with_t) w.train_max = r.real("t", 6.0);
  w.seed = derive_seed(seed, "rmsd-window");
  if (with_t) {
    try {
      validate(w);
    } catch (const Error& e) {
      r.fail(e.what());
    }
  }
  return w;
}

std::string fold_tsv(const Fold& f) {
  std::string s = "drug_id\tprotein_id\tpart\n";
  auto rows = [&](const std::vector<EdgeRef>& edges, const char* part) {
    for (const auto& e : edges) s += e.drug + "\t" + e.protein + "\t" + part + "\n";
  };
  rows(f.train, "train");
  rows(f.val, "val");
  rows(f.test, "test");
  return s;
}

std::string counts_json(const SampledDataset& ds) {
  json j;
  j["positives"] = ds.positives.size();
  j["train_negatives"] = ds.train_negatives.size();
  j["holdout_negatives"] = ds.holdout_negatives.size();
  j["unfilled"] = ds.unfilled;
  for (auto p : {Provenance::Random, Provenance::Window, Provenance::WidenedWindow, Provenance::FallbackRandom})
    j["provenance"][std::string(to_string(p))] = ds.count(p);
  return j.dump(1) + "\n";
}

void cmd_stats(ConfigReader& r, Run& run) {
  const auto edges = r.optional_existing("edges");
  const auto affinity = r.optional_existing("affinity");
  const bool swap = r.flag("swap");
  const double threshold = r.real("threshold", 30.0);
  const auto name = r.text("name", "");
  const bool degree = r.flag("degree_hist");
  const bool isolated = !r.flag("no_isolated_components");
  if (edges.has_value() == affinity.has_value()) r.fail("exactly one of 'edges' or 'affinity' is required");
  r.check();

  DTIGraph g;
  if (edges) {
    g = load_edge_list(*edges, {.swap_columns = swap, .name = {}}).graph;
  } else {
    g = binarize_affinities(load_affinity_table(*affinity), threshold, affinity->stem().string());
    run.write("binarized_edges.tsv", format_edge_list(g));
  }
  const auto label = name.empty() ? g.name() : name;
  const auto s = compute_stats(g, {.count_isolated_components = isolated});
  run.write("stats.csv", stats_csv(label, s));
  if (degree) {
    run.write("degree_drugs.csv", degree_histogram_csv(degree_histogram(g, NodeKind::Drug)));
    run.write("degree_proteins.csv", degree_histogram_csv(degree_histogram(g, NodeKind::Protein)));
  }
  run.log << label << ": " << s.n_drugs << " drugs, " << s.n_proteins << " proteins, " << s.n_edges << " edges, "
          << s.n_components << " components\n";
}

void cmd_split(ConfigReader& r, Run& run, const Common& c) {
  const auto in = read_graph(r);
  const auto seed = r.seed();
  const auto mode = read_mode(r);
  const auto ratios = read_ratios(r);
  const auto k = static_cast<std::size_t>(r.integer("k", 1, 1));
  const auto repeats = static_cast<std::size_t>(r.integer("repeats", 1, 1));
  const double val_fraction = r.real("val_fraction", 0.0);
  if (val_fraction < 0 || val_fraction >= 1) r.fail("option 'val_fraction' must be in [0, 1)");
  r.check();
  (void)c;

  const auto g = load_graph(in.path, in.swap);
  std::vector<FoldPlan> plans;
  if (k == 1) {
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      auto plan = split(g, mode, ratios, derive_seed(seed, "split", rep));
      plan.repeat = rep;
      plans.push_back(std::move(plan));
    }
  } else {
    plans = kfold(g, mode, {.k = k, .repeats = repeats, .val_fraction = val_fraction}, seed);
  }
  json verification = {{"ok", true}, {"violations", json::array()}};
  std::size_t files = 0;
  for (const auto& plan : plans) {
    const auto tag = "repeat" + std::to_string(plan.repeat);
    run.write("plans/plan_" + tag + ".json", format_plan_json(plan));
    for (std::size_t f = 0; f < plan.folds.size(); ++f, ++files)
      run.write("folds/" + tag + "/fold" + std::to_string(f) + ".tsv", fold_tsv(plan.folds[f]));
    const auto v = verify_plan(g, plan);
    for (const auto& msg : v.violations) {
      verification["ok"] = false;
      verification["violations"].push_back(tag + ": " + msg);
    }
  }
  run.write("verification.json", verification.dump(1) + "\n");
  run.summary["fold_files"] = files;
  run.summary["verified"] = verification["ok"];
  run.log << files << " fold files, verification " << (verification["ok"].get<bool>() ? "passed" : "FAILED") << "\n";
  if (!verification["ok"].get<bool>())
    throw Error(ErrorKind::Validation, "plan verification failed; see verification.json");
}

void cmd_verify_plan(ConfigReader& r, Run& run) {
  const auto in = read_graph(r);
  const auto plan_path = r.existing("plan");
  r.check();
  const auto g = load_graph(in.path, in.swap);
  std::string text;
  for (const auto& line : io::read_lines(plan_path)) text += line + "\n";
  const auto v = verify_plan(g, parse_plan_json(text));
  json out = {{"ok", v.ok()}, {"violations", v.violations}};
  run.write("verification.json", out.dump(1) + "\n");
  run.summary["verified"] = v.ok();
  run.log << (v.ok() ? "plan verified\n" : "plan has violations\n");
  if (!v.ok()) throw Error(ErrorKind::Validation, std::to_string(v.violations.size()) + " plan violation(s)");
}

void cmd_sample(ConfigReader& r, Run& run) {
  const auto in = read_graph(r);
  const auto seed = r.seed();
  const auto sampler = r.text("sampler", "random");
  std::optional<fs::path> matrix;
  WindowConfig w;
  if (sampler == "rmsd") {
    matrix = r.existing("rmsd_matrix");
    w = read_window(r, seed, true);
  } else if (sampler == "random") {
    w.ratio = static_cast<std::size_t>(r.integer("ratio", 1, 1));
  } else {
    r.fail("option 'sampler' must be random or rmsd");
  }
  r.check();

  const auto g = load_graph(in.path, in.swap);
  const auto ds = matrix ? sample_rmsd_window(g, load_matrix_tsv(*matrix, SimilarityKind::Rmsd), w)
                         : sample_random(g, w.ratio, derive_seed(seed, "random-negatives"));
  run.write("sampled.tsv", format_sampled_tsv(ds));
  run.write("sample_summary.json", counts_json(ds));
  run.log << ds.positives.size() << " positives, " << ds.train_negatives.size() << " train negatives, "
          << ds.holdout_negatives.size() << " holdout negatives\n";
}

void cmd_rmsd(ConfigReader& r, Run& run, const Common& c) {
  const auto dir = r.existing("structures");
  const auto cache = r.text("cache", "");
  PdbOptions pdb;
  if (r.has("chain")) {
    const auto chain = r.text("chain");
    if (chain.size() == 1)
      pdb.chain = chain[0];
    else
      r.fail("option 'chain' must be a single character");
  }
  RmsdParams params;
  params.cycles = static_cast<int>(r.integer("cycles", 5, 0));
  params.reject_cutoff = r.real("cutoff", 2.0);
  params.gaps.open = r.real("gap_open", -10.0);
  params.gaps.extend = r.real("gap_extend", -1.0);
  QualityThresholds q;
  q.max_resolution = r.real("max_resolution", 2.0);
  q.min_plddt = r.real("min_plddt", 70.0);
  const bool filter = !r.flag("no_quality_filter");
  const double bin = r.real("hist_bin", 0.5);
  if (!(bin > 0)) r.fail("option 'hist_bin' must be positive");
  if (!(params.reject_cutoff > 0)) r.fail("option 'cutoff' must be positive");
  if (!fs::is_directory(dir) && fs::exists(dir)) r.fail("option 'structures' must be a directory");
  r.check();

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".pdb" || ext == ".ent")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ProteinStructure> structures(files.size());
  parallel_for(files.size(), c.jobs, [&](std::size_t i) { structures[i] = parse_pdb_ca(files[i], pdb); });
  std::vector<QualityRejection> rejected;
  if (filter) {
    auto report = quality_filter(structures, q);
    structures = std::move(report.kept);
    rejected = std::move(report.rejected);
  }
  if (structures.size() < 2) throw Error(ErrorKind::Validation, "need at least two usable structures");
  const auto m = cache.empty() ? pairwise_rmsd(structures, params, c.jobs)
                               : pairwise_rmsd_cached(structures, cache, params, c.jobs);
  run.write("rmsd.tsv", format_matrix_tsv(m));
  std::string rej = "id\treason\n";
  for (const auto& x : rejected) rej += x.id + "\t" + x.reason + "\n";
  run.write("rejected.tsv", rej);
  const auto values = m.upper_triangle();
  run.write("rmsd_histogram.csv", histogram_csv(histogram(values, bin)));
  const auto na = m.upper_triangle(false).size() - values.size();
  run.summary["structures"] = structures.size();
  run.summary["rejected"] = rejected.size();
  run.summary["incomparable_pairs"] = na;
  run.log << structures.size() << " structures, " << rejected.size() << " rejected, " << na << " NA pairs\n";
}

void cmd_tanimoto(ConfigReader& r, Run& run, const Common& c) {
  const auto path = r.existing("fingerprints");
  const auto width = static_cast<std::size_t>(r.integer("width", static_cast<std::int64_t>(kFingerprintWidth), 4));
  const double bin = r.real("hist_bin", 0.05);
  if (!(bin > 0)) r.fail("option 'hist_bin' must be positive");
  if (width % 4 != 0) r.fail("option 'width' must be a multiple of 4");
  r.check();
  const auto fps = load_fingerprints(path, width);
  const auto pw = pairwise_tanimoto(fps, c.jobs);
  run.write("tanimoto.tsv", format_matrix_tsv(pw.matrix));
  run.write("tanimoto_histogram.csv", histogram_csv(histogram(pw.matrix.upper_triangle(), bin, 0.0, 1.0)));
  run.summary["drugs"] = fps.size();
  run.summary["all_zero_pairs"] = pw.zero_pairs;
  run.log << fps.size() << " fingerprints, " << pw.zero_pairs << " all-zero pairs\n";
}

void cmd_embed(ConfigReader& r, Run& run, const Common& c) {
  const auto in = read_graph(r);
  const auto seed = r.seed();
  const auto params = read_embedding(r, seed, c.jobs);
  r.check();
  const auto g = load_graph(in.path, in.swap);
  const auto emb = embed(g, params);
  run.write("embeddings.txt", format_embeddings(emb));
  const auto isolated = std::count(emb.isolated.begin(), emb.isolated.end(), 1);
  run.summary["isolated_nodes"] = isolated;
  run.log << emb.nodes.size() << " nodes embedded in " << params.dim << " dimensions, " << isolated << " isolated\n";
}

json metric_row(const SNNModel<double>& model, const EmbeddingTable& emb, const LabeledPairs& set) {
  const auto s = predict(model, pair_features(emb, set.pairs));
  return {{"auroc", auroc(s, set.labels)}, {"auprc", auprc(s, set.labels)}};
}

void cmd_train(ConfigReader& r, Run& run, const Common& c) {
  const auto in = read_graph(r);
  const auto seed = r.seed();
  const auto mode = read_mode(r);
  const auto ratios = read_ratios(r);
  const auto emb_path = r.optional_existing("embeddings");
  const auto n2v = read_embedding(r, seed, c.jobs);
  const auto model_params = read_model(r, seed);
  r.check();

  const auto g = load_graph(in.path, in.swap);
  const auto plan = split(g, mode, ratios, derive_seed(seed, "split"));
  run.write("plan.json", format_plan_json(plan));
  const auto data = make_grid_data(g, plan.folds[0], derive_seed(seed, "negatives"));
  EmbeddingTable emb;
  if (emb_path) {
    std::string text;
    for (const auto& line : io::read_lines(*emb_path)) text += line + "\n";
    emb = parse_embeddings(text, g);
  } else {
    emb = embed(subgraph_with_edges(g, plan.folds[0].train), n2v);
  }
  const Eigen::MatrixXd xt = pair_features(emb, data.train.pairs);
  const Eigen::MatrixXd xv = pair_features(emb, data.val.pairs);
  const auto result = train<double>(xt, data.train.labels, model_params, &xv, data.val.labels);
  run.write("model.json", model_json(result.model, model_params));
  run.write("trace.csv", trace_csv(result.trace));
  const auto val = metric_row(result.model, emb, data.val);
  const auto test = metric_row(result.model, emb, data.test);
  std::string csv = "split,auroc,auprc\n";
  csv += "val," + io::format_double(val["auroc"]) + "," + io::format_double(val["auprc"]) + "\n";
  csv += "test," + io::format_double(test["auroc"]) + "," + io::format_double(test["auprc"]) + "\n";
  run.write("metrics.csv", csv);
  run.summary["val"] = val;
  run.summary["test"] = test;
  run.log << "val AUROC " << io::format_fixed(val["auroc"], 3) << ", test AUROC " << io::format_fixed(test["auroc"], 3)
          << "\n";
}

std::vector<std::size_t> positive_integers(ConfigReader& r, std::string_view key, std::vector<double> fallback) {
  std::vector<std::size_t> out;
  for (double v : r.reals(key, std::move(fallback))) {
    if (v < 1 || v != std::floor(v)) {
      r.fail("option '" + std::string(key) + "' must list positive integers");
      continue;
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void cmd_gridsearch(ConfigReader& r, Run& run, const Common& c) {
  const auto in = read_graph(r);
  const auto seed = r.seed();
  const auto mode = read_mode(r);
  const auto ratios = read_ratios(r);
  const auto n2v = read_embedding(r, seed, c.jobs, false);
  GridLattice lattice;
  lattice.dims = positive_integers(r, "dims", {25, 90, 180, 256, 480, 720});
  lattice.architectures.clear();
  for (auto a : positive_integers(r, "archs", {1, 2, 3, 4})) lattice.architectures.push_back(static_cast<int>(a));
  lattice.epochs = positive_integers(r, "epoch_grid", {2, 5, 10, 50});
  lattice.batch_divisors = positive_integers(r, "batches", {16, 64});
  lattice.losses.clear();
  for (const auto& l : r.texts("losses", std::vector<std::string>{"bce", "focal"})) {
    try {
      lattice.losses.push_back(parse_loss_kind(l));
    } catch (const Error& e) {
      r.fail(e.what());
    }
  }
  try {
    validate(lattice);
  } catch (const Error& e) {
    r.fail(e.what());
  }
  GridOptions opt;
  opt.runs = static_cast<std::size_t>(r.integer("runs", 3, 1));
  opt.base.learning_rate = r.real("lr", 1e-3);
  opt.base.focal_gamma = r.real("gamma", 2.0);
  opt.base.focal_alpha = r.real("alpha", 0.25);
  opt.base.rescale_weight = r.real("weight", 1.0);
  opt.seed = derive_seed(seed, "grid");
  opt.jobs = c.jobs;
  r.check();

  const auto g = load_graph(in.path, in.swap);
  const auto plan = split(g, mode, ratios, derive_seed(seed, "split"));
  run.write("plan.json", format_plan_json(plan));
  const auto data = make_grid_data(g, plan.folds[0], derive_seed(seed, "negatives"));
  const auto train_graph = subgraph_with_edges(g, plan.folds[0].train);
  const EmbeddingProvider provider = [&](std::size_t dim) {
    auto p = n2v;
    p.dim = dim;
    run.log << "embedding d=" << dim << "\n";
    return embed(train_graph, p);
  };
  const auto report = grid_search(data, provider, lattice, opt);
  run.write("grid.csv", grid_csv(report));
  const auto& best = report.winner();
  json winner = {{"dim", best.config.dim},
                 {"architecture", best.config.architecture},
                 {"hidden", hidden_width(best.config.architecture)},
                 {"epochs", best.config.epochs},
                 {"batch", "1/" + std::to_string(best.config.batch_divisor)},
                 {"loss", std::string(to_string(best.config.loss))},
                 {"val_auroc", best.val.format()},
                 {"test_auroc", best.test->format()},
                 {"note", "architecture types 1-4 are hidden widths 32/64/128/256"}};
  run.write("grid_best.json", winner.dump(1) + "\n");
  run.summary["rows"] = report.rows.size();
  run.summary["winner"] = winner;
  run.log << report.rows.size() << " configurations; best val AUROC " << best.val.format() << ", test "
          << best.test->format() << "\n";
}

void cmd_leakage(ConfigReader& r, Run& run, const Common& c) {
  const auto paths = r.texts("edges");
  for (const auto& p : paths)
    if (!fs::exists(p)) r.fail("option 'edges': path '" + p + "' does not exist");
  if (paths.size() < 2) r.fail("option 'edges' needs at least two edge lists");
  const bool swap = r.flag("swap");
  const auto seed = r.seed();
  const auto repeats = static_cast<std::size_t>(r.integer("repeats", 1, 1));
  ExperimentOptions opt;
  opt.embedding = read_embedding(r, seed, c.jobs);
  opt.model = read_model(r, seed);
  opt.train_fraction = r.real("train_fraction", 0.7);
  if (!(opt.train_fraction > 0 && opt.train_fraction < 1)) r.fail("option 'train_fraction' must be in (0, 1)");
  opt.jobs = c.jobs;
  r.check();

  std::vector<DTIGraph> graphs;
  std::set<std::string> names;
  for (const auto& p : paths) {
    auto name = fs::path(p).stem().string();
    for (int n = 2; names.contains(name); ++n) name = fs::path(p).stem().string() + "_" + std::to_string(n);
    names.insert(name);
    graphs.push_back(load_edge_list(p, {.swap_columns = swap, .name = name}).graph);
  }
  LeakageMatrix mean;
  for (std::size_t rep = 0; rep < repeats; ++rep) {
    auto o = opt;
    o.seed = derive_seed(seed, "leakage", rep);
    const auto m = leakage_matrix(graphs, o);
    if (rep == 0) {
      mean = m;
    } else {
      mean.auroc += m.auroc;
      mean.auprc += m.auprc;
    }
  }
  mean.auroc /= static_cast<double>(repeats);
  mean.auprc /= static_cast<double>(repeats);
  run.write("leakage_matrix.csv", leakage_matrix_csv(mean));
  run.write("leakage_long.csv", leakage_long_csv(mean));
  run.log << leakage_matrix_csv(mean);
}

void cmd_sweep(ConfigReader& r, Run& run, const Common& c) {
  const auto in = read_graph(r);
  const auto seed = r.seed();
  const auto matrix = r.existing("rmsd_matrix");
  const auto ts = r.reals("t", std::vector<double>{6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20});
  const auto repeats = static_cast<std::size_t>(r.integer("repeats", 5, 1));
  auto window = read_window(r, seed, false);
  for (double t : ts) {
    auto w = window;
    w.train_max = t;
    try {
      validate(w);
    } catch (const Error& e) {
      r.fail("t=" + io::format_double(t) + ": " + e.what());
    }
  }
  ExperimentOptions opt;
  opt.embedding = read_embedding(r, seed, c.jobs);
  opt.model = read_model(r, seed);
  opt.train_fraction = r.real("train_fraction", 0.7);
  if (!(opt.train_fraction > 0 && opt.train_fraction < 1)) r.fail("option 'train_fraction' must be in (0, 1)");
  const auto holdout_runs = static_cast<std::size_t>(r.integer("holdout_runs", 0, 0));
  r.check();

  const auto g = load_graph(in.path, in.swap);
  const auto rmsd = load_matrix_tsv(matrix, SimilarityKind::Rmsd);
  const auto emb = embed(g, opt.embedding);
  const auto rows = window_sweep(g, rmsd, ts, window, embedding_evaluator(emb, opt), repeats, derive_seed(seed, "sweep"));
  run.write("sweep.csv", sweep_csv(rows));
  run.summary["trend_auroc_per_angstrom"] = sweep_trend(rows);
  for (const auto& row : rows) run.log << row.label << "\t" << row.summary.format() << "\n";

  if (holdout_runs > 0) {
    auto w = window;
    w.train_max = ts.front();
    const auto ds = sample_rmsd_window(g, rmsd, w);
    const auto scores = score_holdout(embedding_scorer(emb, labeled(ds), opt), ds.holdout_negatives, holdout_runs,
                                      derive_seed(seed, "holdout"));
    run.write("holdout_scores.csv", holdout_csv(scores));
    run.summary["holdout_pairs"] = scores.size();
  }
}

void cmd_fetch(ConfigReader& r, Run& run) {
  const auto manifest = r.existing("manifest");
  const auto name = r.text("name");
  const auto cache = r.text("cache_dir", default_cache_dir().string());
  r.check();
  const auto res = fetch_dataset(manifest, name, cache);
  const auto ext = res.file.extension().string();
  std::ifstream src(res.file, std::ios::binary);
  std::ostringstream buf;
  buf << src.rdbuf();
  run.write(name + (ext.empty() ? ".tsv" : ext), buf.str());
  run.summary["sha256"] = res.sha256;
  run.summary["cache_hit"] = res.cache_hit;
  run.summary["cache_file"] = res.file.string();
  run.log << name << ": " << (res.cache_hit ? "cache hit" : "fetched") << " " << res.sha256 << "\n";
}

}  // namespace

void run_command(std::string_view command, const json& config, std::ostream& log) {
  const auto& table = specs();
  const auto spec = std::find_if(table.begin(), table.end(), [&](const CommandSpec& s) { return s.name == command; });
  if (spec == table.end()) throw Error(ErrorKind::Validation, "unknown command '" + std::string(command) + "'");
  std::vector<std::string> keys;
  for (const auto& o : spec->options) keys.push_back(config_key(o.name));

  ConfigReader r(config);
  const auto started = utc_now();
  Common common;
  if (command != "fetch") {
    common = read_common(r);
  } else {
    common.out = r.text("out");
  }
  Run run{common.out, {}, json::object(), log};
  // Unknown keys join the other problems reported by each command's check().
  for (const auto& [key, value] : config.items())
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) r.fail("unknown option '" + key + "'");

  if (command == "stats") cmd_stats(r, run);
  else if (command == "split") cmd_split(r, run, common);
  else if (command == "verify-plan") cmd_verify_plan(r, run);
  else if (command == "sample") cmd_sample(r, run);
  else if (command == "rmsd") cmd_rmsd(r, run, common);
  else if (command == "tanimoto") cmd_tanimoto(r, run, common);
  else if (command == "embed") cmd_embed(r, run, common);
  else if (command == "train") cmd_train(r, run, common);
  else if (command == "gridsearch") cmd_gridsearch(r, run, common);
  else if (command == "leakage") cmd_leakage(r, run, common);
  else if (command == "sweep") cmd_sweep(r, run, common);
  else if (command == "fetch") cmd_fetch(r, run);

  json provenance;
  provenance["command"] = std::string(command);
  provenance["config"] = r.resolved();
  provenance["version"] = std::string(kVersion);
  provenance["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION);
  provenance["compiler"] = __VERSION__;
  provenance["started_at"] = started;
  provenance["finished_at"] = utc_now();
  provenance["artifacts"] = run.artifacts;
  provenance["summary"] = run.summary;
  io::write_text(run.out / "run.json", provenance.dump(1) + "\n");
}

json error_json(const std::exception& e) {
  json err;
  if (const auto* ce = dynamic_cast<const ConfigErrors*>(&e)) {
    err["kind"] = std::string(to_string(ce->kind()));
    err["message"] = ce->what();
    err["details"] = ce->problems();
  } else if (const auto* de = dynamic_cast<const Error*>(&e)) {
    err["kind"] = std::string(to_string(de->kind()));
    err["message"] = de->what();
  } else {
    err["kind"] = "internal-error";
    err["message"] = e.what();
  }
  return {{"error", err}};
}

}  // namespace dtibench
