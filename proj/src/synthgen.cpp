// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <string>

#include <json.hpp>

#include "pds/error.hpp"

namespace pds {

void MixtureSpec::validate() const {
  if (n_components == 0) throw Error(Errc::invalid_argument, "need at least one component");
  if (points_per_component == 0) throw Error(Errc::invalid_argument, "points_per_component must be >= 1");
  if (dim == 0) throw Error(Errc::invalid_argument, "dim must be >= 1");
  if (captions_per_image == 0) throw Error(Errc::invalid_argument, "captions_per_image must be >= 1");
  if (!(component_separation > 0.0)) throw Error(Errc::invalid_argument, "separation must be > 0");
  if (!(component_radius >= 0.0)) throw Error(Errc::invalid_argument, "radius must be >= 0");
  if (!(alignment_noise >= 0.0)) throw Error(Errc::invalid_argument, "alignment noise must be >= 0");
  if (!(misaligned_fraction >= 0.0 && misaligned_fraction <= 1.0))
    throw Error(Errc::invalid_argument, "misaligned fraction must lie in [0,1]");
  if (misaligned_fraction > 0.0 && n_components < 2)
    throw Error(Errc::invalid_argument, "misalignment needs at least two components");
}

std::vector<std::vector<double>> mixture_centers(const MixtureSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.geometry_seed.value_or(spec.seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Centers sit at distance separation/sqrt2 from the origin along
  // orthonormal directions, so every pair is exactly `separation` apart.
  // With fewer dims than components the directions are only unit-norm.
  const double scale = spec.component_separation / std::sqrt(2.0);
  std::vector<std::vector<double>> dirs;
  while (dirs.size() < spec.n_components) {
    std::vector<double> v(spec.dim);
    for (double& x : v) x = gauss(rng);
    if (dirs.size() < spec.dim) {
      for (const auto& u : dirs) {
        double p = std::inner_product(v.begin(), v.end(), u.begin(), 0.0);
        for (std::size_t d = 0; d < v.size(); ++d) v[d] -= p * u[d];
      }
    }
    double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (n < 1e-9) continue;
    for (double& x : v) x /= n;
    dirs.push_back(std::move(v));
  }
  for (auto& v : dirs)
    for (double& x : v) x *= scale;
  return dirs;
}

SyntheticDataset generate(const MixtureSpec& spec) {
  auto centers = mixture_centers(spec);
  std::mt19937_64 rng(spec.seed ^ 0xa5a5a5a5deadbeefULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double offset_std = spec.component_radius / std::sqrt(static_cast<double>(spec.dim));

  auto draw = [&](std::size_t component, std::span<float> out) {
    for (std::size_t d = 0; d < spec.dim; ++d)
      out[d] = static_cast<float>(centers[component][d] + offset_std * gauss(rng));
  };

  const std::size_t n_images = spec.n_components * spec.points_per_component;
  const std::size_t n_pairs = n_images * spec.captions_per_image;

  SyntheticDataset ds;
  std::vector<std::string> img_ids, txt_ids;
  for (std::size_t i = 0; i < n_images; ++i) img_ids.push_back("img_" + std::to_string(i));
  for (std::size_t c = 0; c < n_pairs; ++c) txt_ids.push_back("cap_" + std::to_string(c));
  ds.img = EmbeddingMatrix(n_images, spec.dim, std::move(img_ids));
  ds.txt = EmbeddingMatrix(n_pairs, spec.dim, std::move(txt_ids));

  for (std::size_t i = 0; i < n_images; ++i) {
    std::size_t component = i / spec.points_per_component;
    ds.image_labels.push_back(component);
    draw(component, ds.img.row(i));
  }

  const auto n_misaligned =
      static_cast<std::size_t>(std::floor(spec.misaligned_fraction * static_cast<double>(n_pairs) + 0.5));
  std::vector<std::size_t> order(n_pairs);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < n_misaligned; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_pairs - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  ds.misaligned.assign(n_pairs, false);
  for (std::size_t i = 0; i < n_misaligned; ++i) ds.misaligned[order[i]] = true;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, spec.alignment_noise > 0.0 ? spec.alignment_noise : 1.0);
  for (std::size_t c = 0; c < n_pairs; ++c) {
    std::size_t image = c / spec.captions_per_image;
    std::size_t component = ds.image_labels[image];
    auto out = ds.txt.row(c);
    if (ds.misaligned[c]) {
      std::uniform_int_distribution<std::size_t> other(0, spec.n_components - 2);
      std::size_t o = other(rng);
      if (o >= component) ++o;
      draw(o, out);
      ds.text_labels.push_back(o);
    } else {
      auto src = ds.img.row(image);
      for (std::size_t d = 0; d < spec.dim; ++d)
        out[d] = spec.alignment_noise > 0.0 ? static_cast<float>(src[d] + noise(rng)) : src[d];
      ds.text_labels.push_back(component);
    }
    PairRecord rec;
    rec.pair_id = "p_" + std::to_string(c);
    rec.image_id = ds.img.ids()[image];
    rec.caption_id = ds.txt.ids()[c];
    rec.caption_text = "component " + std::to_string(ds.text_labels.back()) + " caption " +
                       std::to_string(c);
    rec.lang_prob = unit(rng);
    ds.pairs.pairs.push_back(std::move(rec));
  }
  return ds;
}

void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_embeddings(data.img, dir / "img.emb");
  write_embeddings(data.txt, dir / "txt.emb");
  write_pairs(data.pairs, dir / "pairs.tsv");
  nlohmann::ordered_json labels;
  labels["image_labels"] = data.image_labels;
  labels["text_labels"] = data.text_labels;
  labels["misaligned"] = data.misaligned;
  write_file(dir / "labels.json", labels.dump() + "\n");
}

}  // namespace pds
