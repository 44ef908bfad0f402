// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dtibench/graph.hpp"

namespace dtibench {

struct Node2VecParams {
  std::size_t dim = 90;
  double p = 1.0;  // return bias
  double q = 1.0;  // in-out bias
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 80;
  std::size_t window = 10;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;  // decays linearly towards 1e-4 of itself
  std::uint64_t seed = 0;
  unsigned jobs = 1;  // > 1 trains lock-free in parallel, not bit-reproducible
};

void validate(const Node2VecParams& params);

/// Undirected adjacency over the unified index space: drugs occupy
/// [0, num_drugs), proteins follow. Neighbor lists are sorted.
using Adjacency = std::vector<std::vector<std::uint32_t>>;

Adjacency unified_adjacency(const DTIGraph& g);

/// Unnormalised second-order weights over neighbors(cur), given the walk
/// arrived from prev: 1/p back to prev, 1 to a neighbor of prev, 1/q otherwise.
std::vector<double> transition_weights(const Adjacency& adj, std::uint32_t prev, std::uint32_t cur, double p,
                                       double q);

using Walk = std::vector<std::uint32_t>;

/// walks_per_node walks from every non-isolated node, in unified indices.
std::vector<Walk> generate_walks(const DTIGraph& g, const Node2VecParams& params);

struct EmbeddingTable {
  std::vector<NodeRef> nodes;  // unified order
  Eigen::MatrixXd vectors;     // one row per node
  std::vector<char> isolated;  // zero vector, never visited by a walk
  Node2VecParams params;
  Eigen::MatrixXd context;     // output vectors after training; not serialised

  std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors.cols()); }
  std::optional<Eigen::Index> row(NodeKind kind, std::string_view id) const;

 private:
  friend EmbeddingTable make_table(std::vector<NodeRef>, Eigen::MatrixXd, std::vector<char>, const Node2VecParams&);
  std::unordered_map<std::string, Eigen::Index> drug_rows_, protein_rows_;
};

EmbeddingTable make_table(std::vector<NodeRef> nodes, Eigen::MatrixXd vectors, std::vector<char> isolated,
                          const Node2VecParams& params);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Skip-gram negative-sampling loss for one (center, context) pair:
/// -log s(u.v0) - sum_k log s(-u.vk), where row 0 of `outputs` is the true
/// context and the other rows are negatives. Gradients are written when the
/// pointers are non-null.
template <typename Scalar>
Scalar sgns_loss(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& center,
                 const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>& outputs,
                 Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* grad_center = nullptr,
                 Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>* grad_outputs = nullptr) {
  using std::exp;
  using std::log1p;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> scores = outputs * center;
  Scalar loss = 0;
  if (grad_center) grad_center->setZero(center.size());
  if (grad_outputs) grad_outputs->setZero(outputs.rows(), outputs.cols());
  for (Eigen::Index k = 0; k < outputs.rows(); ++k) {
    // label 1 for the context, 0 for negatives; softplus kept stable
    const Scalar z = k == 0 ? scores(k) : -scores(k);
    loss += z > 0 ? log1p(exp(-z)) : -z + log1p(exp(z));
    const Scalar sig = Scalar(1) / (Scalar(1) + exp(-scores(k)));
    const Scalar g = k == 0 ? sig - Scalar(1) : sig;  // d loss / d score_k
    if (grad_center) *grad_center += g * outputs.row(k).transpose();
    if (grad_outputs) grad_outputs->row(k) = g * center.transpose();
  }
  return loss;
}

/// Word2vec-style SGNS over the walk corpus; returns the input vectors.
/// `num_nodes` rows; nodes absent from every walk stay zero and are flagged.
EmbeddingTable train_sgns(std::span<const Walk> walks, std::vector<NodeRef> nodes, const Node2VecParams& params);

/// generate_walks + train_sgns over the unified node list of g.
EmbeddingTable embed(const DTIGraph& g, const Node2VecParams& params);

/// K x 2d, row k = [drug vector | protein vector] of edges[k].
Eigen::MatrixXd pair_features(const EmbeddingTable& emb, std::span<const EdgeRef> edges);

/// word2vec text format: "n d" then "id v1 ... vd" per node.
std::string format_embeddings(const EmbeddingTable& emb);
/// Node kinds are resolved against g; where an id names both a drug and a
/// protein the first row is the drug.
EmbeddingTable parse_embeddings(std::string_view text, const DTIGraph& g);

}  // namespace dtibench
