// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pds/tensor_io.hpp"

namespace pds {

/// Pairs surviving similarity pruning.
struct PrunedDataset {
  std::vector<std::size_t> kept_pair_indices;  // ascending
  double prune_ratio = 0.0;
  std::vector<double> per_pair_similarity;      // aligned to the pair table
};

inline constexpr double kDefaultPruneRatio = 0.1;

/// Unit-L2 rows. Throws Errc::zero_norm on an all-zero row.
EmbeddingMatrix l2_normalize(const EmbeddingMatrix& matrix);

double dot(std::span<const float> a, std::span<const float> b);
double squared_distance(std::span<const float> a, std::span<const float> b);
double norm(std::span<const float> a);
double cosine(std::span<const float> a, std::span<const float> b);

/// Cosine of (image, caption) per pair, in pair order. Inputs must be
/// L2-normalized, so this is the plain dot product.
std::vector<double> pair_similarities(const EmbeddingMatrix& img, const EmbeddingMatrix& txt,
                                      const PairTable& pairs);
std::vector<double> pair_similarities(const EmbeddingMatrix& img, const EmbeddingMatrix& txt,
                                      std::span<const PairRows> rows);

/// Drops floor(prune_ratio * N) lowest-similarity pairs. Equal scores drop
/// the lower pair index first.
PrunedDataset prune_pairs(std::span<const double> similarities, double prune_ratio);

}  // namespace pds
