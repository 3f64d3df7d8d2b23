// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pds/preprocess.hpp"
#include "pds/tensor_io.hpp"

namespace pds {

enum class ClusterMode { separate, joint };
enum class ClusterInit { kmeans_plus_plus, random_points };

std::string to_string(ClusterMode mode);
std::string to_string(ClusterInit init);
ClusterMode parse_cluster_mode(const std::string& s);
ClusterInit parse_cluster_init(const std::string& s);

struct ClusterConfig {
  std::size_t k = 1;
  /// 0 selects min(1024, N).
  std::size_t batch_size = 0;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
  ClusterMode mode = ClusterMode::separate;
  ClusterInit init = ClusterInit::kmeans_plus_plus;

  void validate() const;
};

struct ClusterModel {
  std::size_t k = 0;
  EmbeddingMatrix centroids;               // k x D
  std::vector<std::uint32_t> assignments;  // one per clustered point
  std::vector<std::size_t> counts;         // one per cluster
  double inertia = 0.0;
  std::uint64_t seed = 0;
  /// Lloyd only: inertia after each assignment step.
  std::vector<double> inertia_trace;
  std::size_t iterations = 0;
};

/// Mini-batch k-means with per-center learning rate 1/count. A final full
/// pass assigns every point to its nearest centroid (ties to the lowest
/// centroid index) and repairs empty clusters.
ClusterModel minibatch_kmeans(const EmbeddingMatrix& points, const ClusterConfig& config);

/// Batch Lloyd iterations until the assignment stops changing or
/// max_iters updates. Empty clusters are reseeded to the point farthest
/// from its own centroid.
ClusterModel lloyd_kmeans(const EmbeddingMatrix& points, const ClusterConfig& config);

/// Clusters the kept pairs of both modalities. Point p of either model is
/// pruned.kept_pair_indices[p].
///
/// separate: independent mini-batch runs seeded seed (image) and seed+1 (text).
/// joint:    one run on [img/sqrt2, txt/sqrt2]; both models share the joint
///           assignments and carry per-modality cluster means as centroids.
std::pair<ClusterModel, ClusterModel> cluster_modalities(const EmbeddingMatrix& img,
                                                         const EmbeddingMatrix& txt,
                                                         std::span<const PairRows> pair_rows,
                                                         const PrunedDataset& pruned,
                                                         const ClusterConfig& config);

/// Nearest centroid index for every point, ties to the lowest index.
std::vector<std::uint32_t> nearest_centroids(const EmbeddingMatrix& points,
                                             const EmbeddingMatrix& centroids,
                                             std::vector<double>* squared_distances = nullptr);

/// Writes <stem>.emb (centroids) and <stem>.json (assignments, counts,
/// inertia, seed).
void write_cluster_model(const ClusterModel& model, const std::filesystem::path& stem);
ClusterModel read_cluster_model(const std::filesystem::path& stem);

}  // namespace pds
