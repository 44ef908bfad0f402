// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtibench/align.hpp"
#include "dtibench/kabsch.hpp"
#include "dtibench/similarity.hpp"

namespace dtibench {

enum class StructureSource { XRay, AlphaFold, Unknown };

std::string_view to_string(StructureSource s);

/// C-alpha trace of one chain. Row r of `ca` belongs to residue `sequence[r]`.
struct ProteinStructure {
  std::string id;
  std::string sequence;
  Points3<double> ca;
  StructureSource source = StructureSource::Unknown;
  std::optional<double> quality;  // resolution in Å (XRay) or mean pLDDT (AlphaFold)

  std::size_t size() const noexcept { return sequence.size(); }
};

struct PdbOptions {
  std::string id;                   // defaults to the file stem
  std::optional<char> chain;        // defaults to the first chain with a CA atom
  std::optional<StructureSource> source;  // overrides header detection
};

/// Reads ATOM records named CA: first model, first alternate location, one
/// chain. Resolution comes from REMARK 2, AlphaFold pLDDT from B-factors.
ProteinStructure parse_pdb_ca(const std::filesystem::path& path, const PdbOptions& options = {});
ProteinStructure parse_pdb_ca_text(std::string_view text, std::string_view source_name,
                                   const PdbOptions& options = {});

char one_letter_code(std::string_view residue_name);

struct QualityThresholds {
  double max_resolution = 2.0;  // XRay kept iff resolution < this
  double min_plddt = 70.0;      // AlphaFold kept iff mean pLDDT > this
};

struct QualityRejection {
  std::string id;
  std::string reason;  // "resolution", "low-plddt" or "unknown-quality"
};

struct QualityReport {
  std::vector<ProteinStructure> kept;
  std::vector<QualityRejection> rejected;
};

QualityReport quality_filter(std::span<const ProteinStructure> structures, const QualityThresholds& t = {});

/// Index pairs (into a, into b), strictly increasing in both coordinates.
struct ResidueMapping {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double score = 0.0;
};

ResidueMapping align_residues(const ProteinStructure& a, const ProteinStructure& b,
                              const GapPenalties& gaps = {});

struct RmsdParams {
  int cycles = 5;
  double reject_cutoff = 2.0;  // Å, per-pair deviation
  GapPenalties gaps;
};

struct RefinedRmsd {
  double rmsd = 0.0;
  std::size_t aligned_pairs = 0;
  std::size_t kept_pairs = 0;
  int cycles_run = 0;
  bool degenerate = false;
};

/// Superpose on the current pair set, drop pairs deviating more than the
/// cutoff, repeat. Stops after `cycles` rejection rounds, when nothing is
/// dropped, or when fewer than 3 pairs would remain (previous set kept).
RefinedRmsd refine_superposition(const Points3<double>& a, const Points3<double>& b,
                                 std::vector<std::pair<std::size_t, std::size_t>> pairs,
                                 const RmsdParams& params = {});

/// Symmetric in its arguments: the pair is put in canonical order first.
RefinedRmsd rmsd_refined(const ProteinStructure& a, const ProteinStructure& b, const RmsdParams& params = {});

/// All-pairs RMSD over structures sorted by id. Pairs that cannot be compared
/// are NaN (written `NA`).
SimilarityMatrix pairwise_rmsd(std::span<const ProteinStructure> structures, const RmsdParams& params = {},
                               unsigned jobs = 1);

/// As pairwise_rmsd, reusing `cache` when it holds exactly the same ids.
SimilarityMatrix pairwise_rmsd_cached(std::span<const ProteinStructure> structures,
                                      const std::filesystem::path& cache, const RmsdParams& params = {},
                                      unsigned jobs = 1);

}  // namespace dtibench
