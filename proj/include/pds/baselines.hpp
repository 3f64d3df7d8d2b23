// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

// Subset-selection baselines. Every selector returns pair indices; ties
// always resolve to the lower index.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pds/tensor_io.hpp"

namespace pds {

enum class SelectionMethod { herding, kcenter, clip_score, laion, image_based, random };

std::string to_string(SelectionMethod method);
SelectionMethod parse_selection_method(const std::string& s);

struct Selection {
  SelectionMethod method = SelectionMethod::random;
  std::vector<std::size_t> selected_pair_indices;
  std::size_t budget = 0;
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultLangThreshold = 0.8;

/// Per-pair feature [img ; txt], each half L2-normalized. Row n belongs to
/// pair n.
EmbeddingMatrix pair_features(const EmbeddingMatrix& img, const EmbeddingMatrix& txt,
                              std::span<const PairRows> pair_rows);

/// Greedy herding: each step adds the point whose inclusion brings the
/// subset mean closest to the full mean.
Selection herding_select(const EmbeddingMatrix& features, std::size_t budget);

/// Greedy farthest-point selection, seeded with the point farthest from
/// the dataset mean.
Selection kcenter_select(const EmbeddingMatrix& features, std::size_t budget);

/// Top-budget pairs by similarity, in descending score order.
Selection clip_score_select(std::span<const double> similarities, std::size_t budget);

/// lang_prob >= threshold, then clip_score_select on the survivors. Fewer
/// survivors than budget returns all of them with a warning.
Selection laion_select(const PairTable& pairs, std::span<const double> similarities,
                       double lang_threshold, std::size_t budget);

/// Clusters pair-aligned image embeddings (row n = image of pair n), keeps
/// pairs whose cluster is nearest to at least one reference embedding, then
/// clip_score_select on the survivors.
Selection image_based_select(const EmbeddingMatrix& pair_images, const EmbeddingMatrix& reference,
                             std::span<const double> similarities, std::size_t num_clusters,
                             std::size_t budget, std::uint64_t seed);

/// Uniformly random budget-subset, ascending.
Selection random_select(std::size_t n, std::size_t budget, std::uint64_t seed);

/// Image and caption rows of the selected pairs, in selection order.
std::pair<EmbeddingMatrix, EmbeddingMatrix> selected_pairs(const EmbeddingMatrix& img,
                                                           const EmbeddingMatrix& txt,
                                                           std::span<const PairRows> pair_rows,
                                                           const Selection& selection);

nlohmann::ordered_json to_json(const Selection& selection);
Selection selection_from_json(const nlohmann::json& j);

}  // namespace pds
