// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pds/cluster.hpp"
#include "pds/error.hpp"
#include "pds/parallel.hpp"
#include "pds/preprocess.hpp"

namespace pds {

namespace {

std::vector<double> column_mean(const EmbeddingMatrix& m) {
  std::vector<double> mean(m.dims(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto x = m.row(r);
    for (std::size_t d = 0; d < m.dims(); ++d) mean[d] += x[d];
  }
  for (double& v : mean) v /= static_cast<double>(m.rows());
  return mean;
}

void check_budget(std::size_t n, std::size_t budget) {
  if (n == 0) throw Error(Errc::empty_input, "empty dataset");
  if (budget == 0) throw Error(Errc::invalid_argument, "budget must be >= 1");
  if (budget > n)
    throw Error(Errc::invalid_argument, "budget " + std::to_string(budget) + " exceeds " +
                                            std::to_string(n) + " candidates");
}

}  // namespace

std::string to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::herding: return "herding";
    case SelectionMethod::kcenter: return "kcenter";
    case SelectionMethod::clip_score: return "clip_score";
    case SelectionMethod::laion: return "laion";
    case SelectionMethod::image_based: return "image_based";
    case SelectionMethod::random: return "random";
  }
  return "unknown";
}

SelectionMethod parse_selection_method(const std::string& s) {
  for (auto m : {SelectionMethod::herding, SelectionMethod::kcenter, SelectionMethod::clip_score,
                 SelectionMethod::laion, SelectionMethod::image_based, SelectionMethod::random})
    if (to_string(m) == s) return m;
  throw Error(Errc::invalid_argument, "unknown selection method '" + s + "'");
}

EmbeddingMatrix pair_features(const EmbeddingMatrix& img, const EmbeddingMatrix& txt,
                              std::span<const PairRows> pair_rows) {
  const std::size_t dims = img.dims();
  if (txt.dims() != dims) throw Error(Errc::size_mismatch, "image and text dims differ");
  EmbeddingMatrix out(pair_rows.size(), 2 * dims);
  for (std::size_t n = 0; n < pair_rows.size(); ++n) {
    auto a = img.row(pair_rows[n].image_row);
    auto b = txt.row(pair_rows[n].caption_row);
    double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0)
      throw Error(Errc::zero_norm, "pair " + std::to_string(n) + " has a zero embedding");
    auto row = out.row(n);
    for (std::size_t d = 0; d < dims; ++d) {
      row[d] = static_cast<float>(a[d] / na);
      row[dims + d] = static_cast<float>(b[d] / nb);
    }
  }
  return out;
}

Selection herding_select(const EmbeddingMatrix& features, std::size_t budget) {
  const std::size_t n = features.rows();
  check_budget(n, budget);
  const std::size_t dims = features.dims();
  const std::vector<double> target = column_mean(features);

  Selection sel;
  sel.method = SelectionMethod::herding;
  sel.budget = budget;
  std::vector<double> sum(dims, 0.0);
  std::vector<char> used(n, 0);
  std::vector<double> gap(n);
  for (std::size_t step = 0; step < budget; ++step) {
    const double size = static_cast<double>(step + 1);
    parallel_for(n, [&](std::size_t i) {
      if (used[i]) return;
      auto x = features.row(i);
      double g = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        double diff = (sum[d] + x[d]) / size - target[d];
        g += diff * diff;
      }
      gap[i] = g;
    });
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && (best == n || gap[i] < gap[best])) best = i;
    used[best] = 1;
    auto x = features.row(best);
    for (std::size_t d = 0; d < dims; ++d) sum[d] += x[d];
    sel.selected_pair_indices.push_back(best);
  }
  return sel;
}

Selection kcenter_select(const EmbeddingMatrix& features, std::size_t budget) {
  const std::size_t n = features.rows();
  check_budget(n, budget);
  const std::vector<double> mean = column_mean(features);

  Selection sel;
  sel.method = SelectionMethod::kcenter;
  sel.budget = budget;
  std::vector<double> cover(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = features.row(i);
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) s += (x[d] - mean[d]) * (x[d] - mean[d]);
    cover[i] = s;
  }
  std::vector<char> used(n, 0);
  for (std::size_t step = 0; step < budget; ++step) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && (best == n || cover[i] > cover[best])) best = i;
    used[best] = 1;
    sel.selected_pair_indices.push_back(best);
    // From here on cover[i] is the squared distance to the selected set.
    auto c = features.row(best);
    parallel_for(n, [&](std::size_t i) {
      double d = squared_distance(features.row(i), c);
      cover[i] = step == 0 ? d : std::min(cover[i], d);
    });
  }
  return sel;
}

Selection clip_score_select(std::span<const double> similarities, std::size_t budget) {
  const std::size_t n = similarities.size();
  if (budget > n)
    throw Error(Errc::invalid_argument, "budget " + std::to_string(budget) + " exceeds " +
                                            std::to_string(n) + " candidates");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return similarities[a] > similarities[b]; });
  Selection sel;
  sel.method = SelectionMethod::clip_score;
  sel.budget = budget;
  sel.selected_pair_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget));
  return sel;
}

namespace {

// clip_score_select restricted to `candidates`, returning original indices.
Selection top_scored(std::span<const std::size_t> candidates, std::span<const double> similarities,
                     std::size_t budget, SelectionMethod method) {
  std::vector<double> sub;
  sub.reserve(candidates.size());
  for (std::size_t c : candidates) sub.push_back(similarities[c]);
  Selection sel;
  sel.method = method;
  sel.budget = budget;
  std::size_t take = std::min(budget, candidates.size());
  if (take < budget)
    sel.warnings.push_back("only " + std::to_string(candidates.size()) +
                           " candidates survived filtering; budget " + std::to_string(budget));
  for (std::size_t i : clip_score_select(sub, take).selected_pair_indices)
    sel.selected_pair_indices.push_back(candidates[i]);
  return sel;
}

}  // namespace

Selection laion_select(const PairTable& pairs, std::span<const double> similarities,
                       double lang_threshold, std::size_t budget) {
  if (pairs.size() != similarities.size())
    throw Error(Errc::size_mismatch, "similarity count does not match the pair table");
  if (!pairs.has_lang_prob())
    throw Error(Errc::missing_column, "laion filtering needs lang_prob for every pair");
  std::vector<std::size_t> survivors;
  for (std::size_t n = 0; n < pairs.size(); ++n)
    if (*pairs.pairs[n].lang_prob >= lang_threshold) survivors.push_back(n);
  return top_scored(survivors, similarities, budget, SelectionMethod::laion);
}

Selection image_based_select(const EmbeddingMatrix& pair_images, const EmbeddingMatrix& reference,
                             std::span<const double> similarities, std::size_t num_clusters,
                             std::size_t budget, std::uint64_t seed) {
  if (reference.empty()) throw Error(Errc::empty_input, "reference embedding set is empty");
  if (pair_images.rows() != similarities.size())
    throw Error(Errc::size_mismatch, "similarity count does not match the image rows");
  if (reference.dims() != pair_images.dims())
    throw Error(Errc::size_mismatch, "reference and image dims differ");
  ClusterConfig config;
  config.k = num_clusters;
  config.seed = seed;
  ClusterModel model = lloyd_kmeans(pair_images, config);

  std::vector<char> hit(model.k, 0);
  for (auto c : nearest_centroids(reference, model.centroids)) hit[c] = 1;
  std::vector<std::size_t> survivors;
  for (std::size_t n = 0; n < pair_images.rows(); ++n)
    if (hit[model.assignments[n]]) survivors.push_back(n);
  return top_scored(survivors, similarities, budget, SelectionMethod::image_based);
}

Selection random_select(std::size_t n, std::size_t budget, std::uint64_t seed) {
  check_budget(n, budget);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < budget; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  Selection sel;
  sel.method = SelectionMethod::random;
  sel.budget = budget;
  sel.selected_pair_indices.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(budget));
  std::sort(sel.selected_pair_indices.begin(), sel.selected_pair_indices.end());
  return sel;
}

std::pair<EmbeddingMatrix, EmbeddingMatrix> selected_pairs(const EmbeddingMatrix& img,
                                                           const EmbeddingMatrix& txt,
                                                           std::span<const PairRows> pair_rows,
                                                           const Selection& selection) {
  std::vector<std::size_t> img_rows, txt_rows;
  for (std::size_t n : selection.selected_pair_indices) {
    if (n >= pair_rows.size()) throw Error(Errc::invalid_argument, "selected pair out of range");
    img_rows.push_back(pair_rows[n].image_row);
    txt_rows.push_back(pair_rows[n].caption_row);
  }
  return {img.gather(img_rows), txt.gather(txt_rows)};
}

nlohmann::ordered_json to_json(const Selection& selection) {
  nlohmann::ordered_json j;
  j["method"] = to_string(selection.method);
  j["budget"] = selection.budget;
  j["indices"] = selection.selected_pair_indices;
  j["warnings"] = selection.warnings;
  return j;
}

Selection selection_from_json(const nlohmann::json& j) {
  try {
    Selection s;
    s.method = parse_selection_method(j.at("method").get<std::string>());
    s.budget = j.at("budget").get<std::size_t>();
    s.selected_pair_indices = j.at("indices").get<std::vector<std::size_t>>();
    s.warnings = j.value("warnings", std::vector<std::string>{});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_field, std::string("malformed selection: ") + e.what());
  }
}

}  // namespace pds
