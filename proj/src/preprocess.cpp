// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pds/error.hpp"
#include "pds/parallel.hpp"

namespace pds {

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

double squared_distance(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

double norm(std::span<const float> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const float> a, std::span<const float> b) {
  double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw Error(Errc::zero_norm, "cosine of a zero vector");
  return dot(a, b) / (na * nb);
}

EmbeddingMatrix l2_normalize(const EmbeddingMatrix& matrix) {
  EmbeddingMatrix out = matrix;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double n = norm(row);
    if (n == 0.0 || !std::isfinite(n))
      throw Error(Errc::zero_norm, "row " + std::to_string(r) + " ('" + matrix.ids()[r] +
                                       "') has zero norm");
    for (float& v : row) v = static_cast<float>(v / n);
  }
  return out;
}

std::vector<double> pair_similarities(const EmbeddingMatrix& img, const EmbeddingMatrix& txt,
                                      std::span<const PairRows> rows) {
  if (img.dims() != txt.dims())
    throw Error(Errc::size_mismatch, "image and text embeddings differ in dimension");
  std::vector<double> sims(rows.size());
  parallel_for(rows.size(), [&](std::size_t n) {
    sims[n] = dot(img.row(rows[n].image_row), txt.row(rows[n].caption_row));
  });
  return sims;
}

std::vector<double> pair_similarities(const EmbeddingMatrix& img, const EmbeddingMatrix& txt,
                                      const PairTable& pairs) {
  auto rows = resolve_pairs(pairs, img, txt);
  return pair_similarities(img, txt, rows);
}

PrunedDataset prune_pairs(std::span<const double> similarities, double prune_ratio) {
  if (!(prune_ratio >= 0.0 && prune_ratio < 1.0))
    throw Error(Errc::invalid_argument, "prune ratio must lie in [0,1)");
  const std::size_t n = similarities.size();
  // The epsilon keeps e.g. 0.29 * 100 from flooring to 28.
  auto drop = static_cast<std::size_t>(std::floor(prune_ratio * static_cast<double>(n) + 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return similarities[a] < similarities[b];
  });

  PrunedDataset out;
  out.prune_ratio = prune_ratio;
  out.per_pair_similarity.assign(similarities.begin(), similarities.end());
  out.kept_pair_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(drop), order.end());
  std::sort(out.kept_pair_indices.begin(), out.kept_pair_indices.end());
  return out;
}

}  // namespace pds
