// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dtibench/error.hpp"
#include "dtibench/io.hpp"
#include "dtibench/kabsch.hpp"
#include "dtibench/structure.hpp"
#include "support.hpp"

namespace dtibench {
namespace {

using P3 = Points3<double>;

Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Quaterniond q(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), uniform_real(rng, -1, 1),
                       uniform_real(rng, -1, 1));
  q.normalize();
  return q.toRotationMatrix();
}

P3 random_points(Rng& rng, Eigen::Index n, double scale = 10) {
  P3 p(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) p(i, c) = uniform_real(rng, -scale, scale);
  return p;
}

double centred_rmsd(const P3& p, const P3& q, const Eigen::Quaterniond& rot) {
  const P3 pc = p.rowwise() - p.colwise().mean();
  const P3 qc = q.rowwise() - q.colwise().mean();
  const P3 moved = pc * rot.normalized().toRotationMatrix().transpose();
  return rmsd(moved, qc);
}

// Sampled rotations followed by a shrinking random local search.
double brute_force_rmsd(const P3& p, const P3& q, Rng& rng) {
  Eigen::Quaterniond best(1, 0, 0, 0);
  double best_val = centred_rmsd(p, q, best);
  for (int s = 0; s < 20000; ++s) {
    Eigen::Quaterniond c(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), uniform_real(rng, -1, 1),
                         uniform_real(rng, -1, 1));
    const double v = centred_rmsd(p, q, c);
    if (v < best_val) best_val = v, best = c.normalized();
  }
  for (double step = 0.1; step > 1e-7; step *= 0.7) {
    for (int k = 0; k < 200; ++k) {
      Eigen::Quaterniond c(best.w() + uniform_real(rng, -step, step), best.x() + uniform_real(rng, -step, step),
                           best.y() + uniform_real(rng, -step, step), best.z() + uniform_real(rng, -step, step));
      const double v = centred_rmsd(p, q, c);
      if (v < best_val) best_val = v, best = c.normalized();
    }
  }
  return best_val;
}

TEST(Kabsch, RigidTransformGivesZero) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const P3 p = random_points(rng, 3 + static_cast<Eigen::Index>(uniform_index(rng, 30)));
    const Eigen::Matrix3d r = random_rotation(rng);
    const Eigen::RowVector3d shift(uniform_real(rng, -50, 50), uniform_real(rng, -50, 50), uniform_real(rng, -50, 50));
    const P3 q = (p * r.transpose()).rowwise() + shift;
    const auto s = kabsch_superpose(p, q);
    EXPECT_LT(s.rmsd, 1e-9);
    EXPECT_NEAR(s.rotation.determinant(), 1.0, 1e-12);
    EXPECT_LT((s.rotation - r).norm(), 1e-8);
  }
}

TEST(Kabsch, MatchesBruteForceRotationSearch) {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const P3 p = random_points(rng, 4, 5);
    const P3 q = random_points(rng, 4, 5);
    const auto s = kabsch_superpose(p, q);
    const double brute = brute_force_rmsd(p, q, rng);
    EXPECT_NEAR(s.rmsd, brute, 1e-3);
    EXPECT_LE(s.rmsd, brute + 1e-12);
  }
}

TEST(Kabsch, MirrorImageIsNotSuperposable) {
  P3 p(4, 3);
  p << 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 3;
  P3 q = p;
  q.col(0) *= -1;
  const auto s = kabsch_superpose(p, q);
  EXPECT_GT(s.rmsd, 0.1);
  EXPECT_NEAR(s.rotation.determinant(), 1.0, 1e-12);
  Rng rng(3);
  EXPECT_NEAR(s.rmsd, brute_force_rmsd(p, q, rng), 1e-3);
}

TEST(Kabsch, ShapeAndSizeErrors) {
  EXPECT_THROW(kabsch_superpose(P3::Zero(3, 3), P3::Zero(4, 3)), Error);
  EXPECT_THROW(kabsch_superpose(P3::Zero(2, 3), P3::Zero(2, 3)), Error);
  P3 line(4, 3);
  line << 0, 0, 0, 1, 0, 0, 2, 0, 0, 3, 0, 0;
  EXPECT_TRUE(kabsch_superpose(line, line).degenerate);
}

TEST(Kabsch, WorksInSinglePrecision) {
  Rng rng(4);
  const P3 p = random_points(rng, 10);
  const Eigen::Matrix3d r = random_rotation(rng);
  const Points3<float> pf = p.cast<float>();
  const Points3<float> qf = (p * r.transpose()).cast<float>();
  EXPECT_LT(kabsch_superpose(pf, qf).rmsd, 1e-4f);
}

std::string atom_line(int serial, const char* res, char chain, int seq, double x, double y, double z, double b = 50,
                      char alt = ' ', const char* name = " CA ", const char* record = "ATOM") {
  char buf[100];
  std::snprintf(buf, sizeof buf, "%-6s%5d %-4s%c%3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f\n", record, serial, name, alt,
                res, chain, seq, x, y, z, 1.0, b);
  return buf;
}

TEST(Pdb, ReadsFirstModelChainAndAltLoc) {
  std::string text = "HEADER    TRANSFERASE\nEXPDTA    X-RAY DIFFRACTION\nREMARK   2 RESOLUTION.    1.80 ANGSTROMS.\n";
  text += "MODEL        1\n";
  text += atom_line(1, "MET", 'A', 1, 1, 2, 3);
  text += atom_line(2, "MET", 'A', 1, 9, 9, 9, 50, ' ', " N  ");
  text += atom_line(3, "LYS", 'A', 2, 4, 5, 6, 50, 'A');
  text += atom_line(4, "LYS", 'A', 2, 7, 8, 9, 50, 'B');
  text += atom_line(5, "TRP", 'A', 3, 1, 1, 1);
  text += atom_line(6, "HOH", 'A', 4, 0, 0, 0, 50, ' ', " O  ", "HETATM");
  text += atom_line(7, "GLY", 'B', 1, 5, 5, 5);
  text += "ENDMDL\nMODEL        2\n";
  text += atom_line(8, "ALA", 'A', 5, 0, 0, 0);
  text += "ENDMDL\n";
  const auto s = parse_pdb_ca_text(text, "1abc.pdb", {.id = "1abc"});
  EXPECT_EQ(s.id, "1abc");
  EXPECT_EQ(s.sequence, "MKW");
  EXPECT_DOUBLE_EQ(s.ca(1, 0), 4.0);
  EXPECT_EQ(s.source, StructureSource::XRay);
  ASSERT_TRUE(s.quality);
  EXPECT_DOUBLE_EQ(*s.quality, 1.8);

  const auto b = parse_pdb_ca_text(text, "1abc.pdb", {.id = "1abc", .chain = 'B'});
  EXPECT_EQ(b.sequence, "G");
}

TEST(Pdb, AlphaFoldConfidenceFromBFactors) {
  std::string text = "TITLE     ALPHAFOLD MONOMER V2.0 PREDICTION\n";
  text += atom_line(1, "ALA", 'A', 1, 0, 0, 0, 90);
  text += atom_line(2, "GLY", 'A', 2, 3.8, 0, 0, 60);
  const auto s = parse_pdb_ca_text(text, "af.pdb");
  EXPECT_EQ(s.source, StructureSource::AlphaFold);
  EXPECT_DOUBLE_EQ(*s.quality, 75.0);
}

TEST(Pdb, Errors) {
  EXPECT_THROW(parse_pdb_ca_text("HEADER x\n", "empty.pdb"), Error);
  try {
    parse_pdb_ca_text("ATOM      1  CA  ALA A   1      1.000   2.000\n", "short.pdb");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
  EXPECT_EQ(one_letter_code("MSE"), 'M');
  EXPECT_EQ(one_letter_code("ZZZ"), 'X');
}

TEST(Pdb, ReadsFile) {
  testing::TempDir dir;
  io::write_text(dir / "p1.pdb", atom_line(1, "ALA", 'A', 1, 0, 0, 0));
  EXPECT_EQ(parse_pdb_ca(dir / "p1.pdb").id, "p1");
  EXPECT_THROW(parse_pdb_ca(dir / "none.pdb"), Error);
}

ProteinStructure make_structure(std::string id, std::string seq, P3 ca,
                                StructureSource src = StructureSource::Unknown,
                                std::optional<double> quality = std::nullopt) {
  return {std::move(id), std::move(seq), std::move(ca), src, quality};
}

TEST(Quality, ThresholdsAreStrict) {
  const P3 ca = P3::Zero(1, 3);
  const std::vector<ProteinStructure> s{
      make_structure("a", "A", ca, StructureSource::XRay, 1.9), make_structure("b", "A", ca, StructureSource::XRay, 2.0),
      make_structure("c", "A", ca, StructureSource::AlphaFold, 70.0),
      make_structure("d", "A", ca, StructureSource::AlphaFold, 70.5), make_structure("e", "A", ca)};
  const auto r = quality_filter(s);
  ASSERT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.kept[0].id, "a");
  EXPECT_EQ(r.kept[1].id, "d");
  ASSERT_EQ(r.rejected.size(), 3u);
  EXPECT_EQ(r.rejected[0].reason, "resolution");
  EXPECT_EQ(r.rejected[1].reason, "low-plddt");
  EXPECT_EQ(r.rejected[2].reason, "unknown-quality");
}

ProteinStructure random_chain(Rng& rng, std::string id, std::size_t n) {
  static const std::string alphabet = "ARNDCQEGHILKMFPSTWYV";
  std::string seq;
  P3 ca(static_cast<Eigen::Index>(n), 3);
  Eigen::RowVector3d pos = Eigen::RowVector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    seq += alphabet[uniform_index(rng, alphabet.size())];
    Eigen::RowVector3d dir(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), uniform_real(rng, -1, 1));
    pos += 3.8 * dir.normalized();
    ca.row(static_cast<Eigen::Index>(i)) = pos;
  }
  return make_structure(std::move(id), seq, ca);
}

TEST(RefinedRmsd, RigidCopyIsZeroAndSymmetric) {
  Rng rng(5);
  const auto a = random_chain(rng, "a", 40);
  auto b = a;
  b.id = "b";
  b.ca = (a.ca * random_rotation(rng).transpose()).rowwise() + Eigen::RowVector3d(3, -2, 7);
  const auto r = rmsd_refined(a, b);
  EXPECT_LT(r.rmsd, 1e-9);
  EXPECT_EQ(r.aligned_pairs, 40u);

  const auto c = random_chain(rng, "c", 35);
  EXPECT_EQ(rmsd_refined(a, c).rmsd, rmsd_refined(c, a).rmsd);
}

TEST(RefinedRmsd, OutlierIsRejected) {
  Rng rng(6);
  const auto a = random_chain(rng, "a", 30);
  auto b = a;
  b.id = "b";
  b.ca.row(10) += Eigen::RowVector3d(15, 0, 0);
  const auto r = rmsd_refined(a, b);
  EXPECT_EQ(r.kept_pairs, 29u);
  EXPECT_LT(r.rmsd, 1e-9);
  EXPECT_GE(r.cycles_run, 1);
  EXPECT_FALSE(r.degenerate);
}

TEST(RefinedRmsd, ZeroCyclesIsPlainSuperposition) {
  Rng rng(7);
  const P3 a = random_points(rng, 8), b = random_points(rng, 8);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < 8; ++i) pairs.emplace_back(i, i);
  const auto r = refine_superposition(a, b, pairs, {.cycles = 0});
  EXPECT_NEAR(r.rmsd, kabsch_superpose(a, b).rmsd, 1e-12);
}

TEST(RefinedRmsd, ShortStructuresAreIncomparable) {
  Rng rng(8);
  const auto a = random_chain(rng, "a", 2);
  const auto b = random_chain(rng, "b", 20);
  EXPECT_THROW(rmsd_refined(a, b), Error);
  const std::vector<ProteinStructure> all{b, a, random_chain(rng, "c", 20)};
  const auto m = pairwise_rmsd(all, {}, 2);
  EXPECT_EQ(m.ids, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(m.is_na(0, 1));
  EXPECT_FALSE(m.is_na(1, 2));
  EXPECT_EQ(m.values(1, 1), 0.0);
  EXPECT_EQ(m.values(1, 2), m.values(2, 1));
}

TEST(RefinedRmsd, CacheIsReusedOnlyForSameParameters) {
  Rng rng(9);
  const std::vector<ProteinStructure> all{random_chain(rng, "a", 25), random_chain(rng, "b", 25),
                                          random_chain(rng, "c", 25)};
  testing::TempDir dir;
  const auto cache = dir / "rmsd.tsv";
  const auto first = pairwise_rmsd_cached(all, cache);
  ASSERT_TRUE(std::filesystem::exists(cache));
  // Tamper with the cache: a hit returns the tampered value.
  auto tampered = first;
  tampered.values(0, 1) = tampered.values(1, 0) = 123.0;
  save_matrix_tsv(tampered, cache);
  EXPECT_EQ(pairwise_rmsd_cached(all, cache).values(0, 1), 123.0);
  // Different parameters force recomputation.
  const auto other = pairwise_rmsd_cached(all, cache, {.cycles = 0});
  EXPECT_NE(other.values(0, 1), 123.0);
}

}  // namespace
}  // namespace dtibench
