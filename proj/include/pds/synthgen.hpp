// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

// Correlated two-modality Gaussian mixtures with known labels, used by the
// tests and the acceptance runs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pds/tensor_io.hpp"

namespace pds {

struct MixtureSpec {
  std::size_t n_components = 5;
  std::size_t points_per_component = 20;  // images per component
  std::size_t dim = 16;
  double component_separation = 10.0;     // distance between any two centers
  double component_radius = 1.0;          // expected norm of a point's offset
  double alignment_noise = 0.0;           // per-coordinate std of text noise
  double misaligned_fraction = 0.0;
  std::size_t captions_per_image = 1;
  std::uint64_t seed = 0;
  /// Seed for the component centers; defaults to `seed`. Reuse it with a
  /// different `seed` to draw a held-out split of the same mixture.
  std::optional<std::uint64_t> geometry_seed;

  void validate() const;
};

struct SyntheticDataset {
  EmbeddingMatrix img;                   // one row per image
  EmbeddingMatrix txt;                   // one row per caption
  PairTable pairs;                       // one pair per caption
  std::vector<std::size_t> image_labels; // component per image row
  std::vector<std::size_t> text_labels;  // component the caption was drawn from
  std::vector<bool> misaligned;          // per pair
};

/// Images are drawn per component; an aligned caption is its image plus
/// N(0, sigma^2 I); a misaligned caption is a fresh draw from a different
/// component. Exactly round(fraction * pairs) pairs are misaligned.
SyntheticDataset generate(const MixtureSpec& spec);

/// Component centers for the mixture's geometry seed.
std::vector<std::vector<double>> mixture_centers(const MixtureSpec& spec);

/// Writes img.emb, txt.emb, pairs.tsv and labels.json into `dir`.
void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace pds
