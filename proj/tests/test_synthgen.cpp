// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pds/cluster.hpp"
#include "pds/synthgen.hpp"
#include "support.hpp"

using namespace pds;
using pds::testing::error_of;

TEST_CASE("zero noise and no misalignment copies the images") {
  MixtureSpec spec;
  spec.seed = 81;
  SyntheticDataset d = generate(spec);
  REQUIRE(d.img.rows() == 100);
  REQUIRE(d.txt.rows() == 100);
  CHECK(d.img.data() == d.txt.data());
  CHECK(d.text_labels == d.image_labels);
  CHECK(d.pairs.size() == 100);
}

TEST_CASE("full misalignment changes every label") {
  MixtureSpec spec;
  spec.n_components = 4;
  spec.misaligned_fraction = 1.0;
  spec.captions_per_image = 2;
  spec.seed = 82;
  SyntheticDataset d = generate(spec);
  REQUIRE(d.text_labels.size() == 160);
  for (std::size_t c = 0; c < 160; ++c) {
    CHECK(d.misaligned[c]);
    CHECK(d.text_labels[c] != d.image_labels[c / 2]);
    CHECK(d.text_labels[c] < 4);
  }
}

TEST_CASE("misaligned count is the rounded fraction") {
  for (double f : {0.0, 0.1, 0.25, 0.333, 0.5, 0.9}) {
    MixtureSpec spec;
    spec.n_components = 3;
    spec.points_per_component = 7;
    spec.misaligned_fraction = f;
    spec.seed = 83;
    SyntheticDataset d = generate(spec);
    auto count = static_cast<std::size_t>(std::count(d.misaligned.begin(), d.misaligned.end(), true));
    CHECK(count == static_cast<std::size_t>(std::lround(f * 21)));
    for (std::size_t c = 0; c < 21; ++c)
      CHECK((d.text_labels[c] != d.image_labels[c]) == d.misaligned[c]);
  }
}

TEST_CASE("well separated components are recovered by Lloyd") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    MixtureSpec spec;
    spec.n_components = 5;
    spec.component_separation = 100.0;
    spec.seed = 84 + s;
    SyntheticDataset d = generate(spec);
    ClusterConfig c;
    c.k = 5;
    c.seed = s;
    ClusterModel m = lloyd_kmeans(d.img, c);
    CHECK(pds::testing::same_partition(m.assignments, d.image_labels));
  }
}

TEST_CASE("centers are pairwise at the requested separation") {
  MixtureSpec spec;
  spec.n_components = 6;
  spec.dim = 10;
  spec.component_separation = 7.0;
  auto c = mixture_centers(spec);
  REQUIRE(c.size() == 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < 10; ++d) s += (c[i][d] - c[j][d]) * (c[i][d] - c[j][d]);
      CHECK(std::sqrt(s) == doctest::Approx(7.0).epsilon(1e-9));
    }
}

TEST_CASE("generation is deterministic and the geometry seed is shared across splits") {
  MixtureSpec spec;
  spec.alignment_noise = 0.4;
  spec.misaligned_fraction = 0.2;
  spec.seed = 85;
  SyntheticDataset a = generate(spec), b = generate(spec);
  CHECK(a.img == b.img);
  CHECK(a.txt == b.txt);
  CHECK(a.pairs.pairs == b.pairs.pairs);

  MixtureSpec held = spec;
  held.seed = 86;
  held.geometry_seed = 85;
  CHECK(mixture_centers(held) == mixture_centers(spec));
  CHECK(generate(held).img != a.img);
  MixtureSpec other = spec;
  other.seed = 86;
  CHECK(mixture_centers(other) != mixture_centers(spec));
}

TEST_CASE("noise level is close to the requested sigma") {
  MixtureSpec spec;
  spec.points_per_component = 200;
  spec.dim = 20;
  spec.alignment_noise = 0.5;
  spec.seed = 87;
  SyntheticDataset d = generate(spec);
  double sum = 0.0;
  for (std::size_t r = 0; r < d.img.rows(); ++r)
    for (std::size_t k = 0; k < 20; ++k) {
      double diff = d.txt.at(r, k) - d.img.at(r, k);
      sum += diff * diff;
    }
  double sigma = std::sqrt(sum / (d.img.rows() * 20.0));
  CHECK(sigma == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("written datasets read back") {
  pds::testing::TempDir dir("synth");
  MixtureSpec spec;
  spec.n_components = 3;
  spec.points_per_component = 4;
  spec.captions_per_image = 5;
  spec.seed = 88;
  SyntheticDataset d = generate(spec);
  write_dataset(d, dir.path() / "data");
  CHECK(read_embeddings(dir.path() / "data" / "img.emb") == d.img);
  CHECK(read_embeddings(dir.path() / "data" / "txt.emb") == d.txt);
  PairTable pairs = read_pairs(dir.path() / "data" / "pairs.tsv");
  CHECK(pairs.size() == 60);
  CHECK(pairs.pairs[7].image_id == "img_1");
  CHECK(resolve_pairs(pairs, d.img, d.txt).size() == 60);
  auto labels = nlohmann::json::parse(read_file(dir.path() / "data" / "labels.json"));
  CHECK(labels.at("image_labels").size() == 12);
}

TEST_CASE("invalid mixture settings are rejected") {
  MixtureSpec s;
  s.component_separation = 0.0;
  CHECK(error_of([&] { generate(s); }) == Errc::invalid_argument);
  s = MixtureSpec{};
  s.misaligned_fraction = 1.5;
  CHECK(error_of([&] { generate(s); }) == Errc::invalid_argument);
  s = MixtureSpec{};
  s.n_components = 1;
  s.misaligned_fraction = 0.5;
  CHECK(error_of([&] { generate(s); }) == Errc::invalid_argument);
  s = MixtureSpec{};
  s.alignment_noise = -1.0;
  CHECK(error_of([&] { generate(s); }) == Errc::invalid_argument);
}
