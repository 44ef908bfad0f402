// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/structure.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "dtibench/error.hpp"
#include "dtibench/io.hpp"
#include "dtibench/parallel.hpp"

namespace dtibench {

std::string_view to_string(StructureSource s) {
  switch (s) {
    case StructureSource::XRay: return "xray";
    case StructureSource::AlphaFold: return "alphafold";
    case StructureSource::Unknown: return "unknown";
  }
  return "unknown";
}

char one_letter_code(std::string_view residue_name) {
  static const std::unordered_map<std::string_view, char> kCodes = {
      {"ALA", 'A'}, {"ARG", 'R'}, {"ASN", 'N'}, {"ASP", 'D'}, {"CYS", 'C'}, {"GLN", 'Q'}, {"GLU", 'E'},
      {"GLY", 'G'}, {"HIS", 'H'}, {"ILE", 'I'}, {"LEU", 'L'}, {"LYS", 'K'}, {"MET", 'M'}, {"PHE", 'F'},
      {"PRO", 'P'}, {"SER", 'S'}, {"THR", 'T'}, {"TRP", 'W'}, {"TYR", 'Y'}, {"VAL", 'V'}, {"ASX", 'B'},
      {"GLX", 'Z'}, {"MSE", 'M'}, {"SEC", 'U'}, {"PYL", 'O'}};
  const auto it = kCodes.find(io::trim(residue_name));
  return it == kCodes.end() ? 'X' : it->second;
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string_view field(std::string_view line, std::size_t begin, std::size_t end) {
  if (begin >= line.size()) return {};
  return line.substr(begin, std::min(end, line.size()) - begin);
}

}  // namespace

ProteinStructure parse_pdb_ca_text(std::string_view text, std::string_view source_name, const PdbOptions& options) {
  const std::string source(source_name);
  ProteinStructure out;
  out.id = options.id;

  std::vector<double> xyz;
  std::vector<double> bfactors;
  std::set<std::string> seen_residues;
  std::optional<char> chain = options.chain;
  std::optional<StructureSource> detected;
  std::optional<double> resolution;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string_view line = raw;
    const auto record = io::trim(field(line, 0, 6));

    if (record == "ENDMDL") break;  // first model only
    if (record == "EXPDTA" && upper(line).find("X-RAY") != std::string::npos) {
      detected = StructureSource::XRay;
      continue;
    }
    if (record == "HEADER" || record == "TITLE" || record == "REMARK" || record == "KEYWDS") {
      if (upper(line).find("ALPHAFOLD") != std::string::npos) detected = StructureSource::AlphaFold;
      if (record == "REMARK" && io::trim(field(line, 6, 10)) == "2") {
        const auto pos = upper(line).find("RESOLUTION.");
        if (pos != std::string::npos) {
          std::istringstream rs(raw.substr(pos + 11));
          double value;
          if (rs >> value) resolution = value;
        }
      }
      continue;
    }
    if (record != "ATOM") continue;
    if (io::trim(field(line, 12, 16)) != "CA") continue;
    if (line.size() < 54) throw ParseError(source, lineno, "ATOM record too short for coordinates");

    const char chain_id = line[21];
    if (!chain) chain = chain_id;
    if (chain_id != *chain) continue;

    // resSeq + insertion code identify the residue; later altLocs are dropped
    const std::string key(field(line, 22, 27));
    if (!seen_residues.insert(key).second) continue;

    double x, y, z;
    if (!io::parse_double(field(line, 30, 38), x) || !io::parse_double(field(line, 38, 46), y) ||
        !io::parse_double(field(line, 46, 54), z) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw ParseError(source, lineno, "malformed coordinate field");
    }
    xyz.insert(xyz.end(), {x, y, z});
    out.sequence.push_back(one_letter_code(field(line, 17, 20)));
    double b;
    if (io::parse_double(field(line, 60, 66), b)) bfactors.push_back(b);
  }

  if (out.sequence.empty()) {
    throw Error(ErrorKind::EmptyStructure, source + ": no CA atoms" +
                                               (options.chain ? std::string(" in chain ") + *options.chain : ""));
  }
  const auto n = static_cast<Eigen::Index>(out.sequence.size());
  out.ca.resize(n, 3);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) out.ca(r, c) = xyz[static_cast<std::size_t>(3 * r + c)];
  }

  out.source = options.source.value_or(detected.value_or(StructureSource::Unknown));
  if (out.source == StructureSource::XRay) {
    out.quality = resolution;
  } else if (out.source == StructureSource::AlphaFold && bfactors.size() == out.sequence.size()) {
    double sum = 0.0;
    for (double b : bfactors) sum += b;
    out.quality = sum / static_cast<double>(bfactors.size());
  }
  return out;
}

ProteinStructure parse_pdb_ca(const std::filesystem::path& path, const PdbOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  PdbOptions opts = options;
  if (opts.id.empty()) opts.id = path.stem().string();
  return parse_pdb_ca_text(buf.str(), path.string(), opts);
}

QualityReport quality_filter(std::span<const ProteinStructure> structures, const QualityThresholds& t) {
  QualityReport report;
  for (const auto& s : structures) {
    if (!s.quality || s.source == StructureSource::Unknown) {
      report.rejected.push_back({s.id, "unknown-quality"});
    } else if (s.source == StructureSource::XRay && !(*s.quality < t.max_resolution)) {
      report.rejected.push_back({s.id, "resolution"});
    } else if (s.source == StructureSource::AlphaFold && !(*s.quality > t.min_plddt)) {
      report.rejected.push_back({s.id, "low-plddt"});
    } else {
      report.kept.push_back(s);
    }
  }
  return report;
}

ResidueMapping align_residues(const ProteinStructure& a, const ProteinStructure& b, const GapPenalties& gaps) {
  if (a.size() < 3 || b.size() < 3) {
    throw Error(ErrorKind::InsufficientOverlap, "structures need at least 3 residues (" + a.id + ", " + b.id + ")");
  }
  auto aln = needleman_wunsch(a.sequence, b.sequence, gaps);
  if (aln.pairs.size() < 3) {
    throw Error(ErrorKind::InsufficientOverlap, "fewer than 3 aligned residues between " + a.id + " and " + b.id);
  }
  return {std::move(aln.pairs), aln.score};
}

RefinedRmsd refine_superposition(const Points3<double>& a, const Points3<double>& b,
                                 std::vector<std::pair<std::size_t, std::size_t>> pairs, const RmsdParams& params) {
  if (pairs.size() < 3) throw Error(ErrorKind::InsufficientOverlap, "fewer than 3 residue pairs");
  auto gather = [&](const std::vector<std::pair<std::size_t, std::size_t>>& ps, Points3<double>& pa,
                    Points3<double>& pb) {
    const auto n = static_cast<Eigen::Index>(ps.size());
    pa.resize(n, 3);
    pb.resize(n, 3);
    for (Eigen::Index k = 0; k < n; ++k) {
      pa.row(k) = a.row(static_cast<Eigen::Index>(ps[static_cast<std::size_t>(k)].first));
      pb.row(k) = b.row(static_cast<Eigen::Index>(ps[static_cast<std::size_t>(k)].second));
    }
  };

  RefinedRmsd out;
  out.aligned_pairs = pairs.size();
  Points3<double> pa, pb;
  for (int cycle = 0; cycle < params.cycles; ++cycle) {
    gather(pairs, pa, pb);
    const auto fit = kabsch_superpose(pa, pb);
    const Eigen::VectorXd dev = (apply(fit, pa) - pb).rowwise().norm();
    std::vector<std::pair<std::size_t, std::size_t>> kept;
    for (Eigen::Index k = 0; k < dev.size(); ++k) {
      if (dev(k) <= params.reject_cutoff) kept.push_back(pairs[static_cast<std::size_t>(k)]);
    }
    if (kept.size() == pairs.size() || kept.size() < 3) break;
    pairs = std::move(kept);
    out.cycles_run = cycle + 1;
  }
  gather(pairs, pa, pb);
  const auto fit = kabsch_superpose(pa, pb);
  out.rmsd = fit.rmsd;
  out.degenerate = fit.degenerate;
  out.kept_pairs = pairs.size();
  return out;
}

RefinedRmsd rmsd_refined(const ProteinStructure& a, const ProteinStructure& b, const RmsdParams& params) {
  // Alignment tie-breaks are order dependent; fix the order so the result is symmetric.
  const bool swap = std::tie(b.id, b.sequence) < std::tie(a.id, a.sequence);
  const auto& first = swap ? b : a;
  const auto& second = swap ? a : b;
  auto mapping = align_residues(first, second, params.gaps);
  return refine_superposition(first.ca, second.ca, std::move(mapping.pairs), params);
}

SimilarityMatrix pairwise_rmsd(std::span<const ProteinStructure> structures, const RmsdParams& params,
                               unsigned jobs) {
  if (structures.size() < 2) throw Error(ErrorKind::Validation, "need at least 2 structures");
  std::vector<const ProteinStructure*> sorted;
  for (const auto& s : structures) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->id < y->id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->id == sorted[i - 1]->id) throw Error(ErrorKind::Validation, "duplicate structure id " + sorted[i]->id);
  }

  SimilarityMatrix m;
  m.kind = SimilarityKind::Rmsd;
  const auto n = static_cast<Eigen::Index>(sorted.size());
  for (auto* s : sorted) m.ids.push_back(s->id);
  m.values = Eigen::MatrixXd::Zero(n, n);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> work;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) work.emplace_back(i, j);
  }
  parallel_for(work.size(), jobs, [&](std::size_t k) {
    const auto [i, j] = work[k];
    double v;
    try {
      v = rmsd_refined(*sorted[static_cast<std::size_t>(i)], *sorted[static_cast<std::size_t>(j)], params).rmsd;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientOverlap) throw;
      v = std::numeric_limits<double>::quiet_NaN();
    }
    m.values(i, j) = v;
    m.values(j, i) = v;
  });
  return m;
}

SimilarityMatrix pairwise_rmsd_cached(std::span<const ProteinStructure> structures,
                                      const std::filesystem::path& cache, const RmsdParams& params, unsigned jobs) {
  std::vector<std::string> ids;
  for (const auto& s : structures) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());
  // parameters live in a sidecar so a cache built with other settings is not reused
  const std::string stamp = "cycles=" + std::to_string(params.cycles) +
                            " cutoff=" + io::format_double(params.reject_cutoff) +
                            " gap_open=" + io::format_double(params.gaps.open) +
                            " gap_extend=" + io::format_double(params.gaps.extend) + "\n";
  auto stamp_path = cache;
  stamp_path += ".params";
  if (std::filesystem::exists(cache) && std::filesystem::exists(stamp_path)) {
    const auto lines = io::read_lines(stamp_path);
    if (!lines.empty() && lines[0] + "\n" == stamp) {
      auto m = load_matrix_tsv(cache, SimilarityKind::Rmsd);
      if (m.ids == ids) return m;
    }
  }
  auto m = pairwise_rmsd(structures, params, jobs);
  save_matrix_tsv(m, cache);
  io::write_text(stamp_path, stamp);
  return m;
}

}  // namespace dtibench
