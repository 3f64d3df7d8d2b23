// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pds/evalkit.hpp"
#include "pds/preprocess.hpp"
#include "pds/synthgen.hpp"
#include "support.hpp"

using namespace pds;
using pds::testing::error_of;

namespace {

const std::vector<std::size_t> kKs{1, 5, 10};

std::vector<std::vector<std::size_t>> identity_truth(std::size_t n) {
  std::vector<std::vector<std::size_t>> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = {i};
  return t;
}

TestSet identity_test_set(const EmbeddingMatrix& x) {
  TestSet t;
  t.images = x;
  t.captions = x;
  t.caption_image.resize(x.rows());
  std::iota(t.caption_image.begin(), t.caption_image.end(), 0);
  return t;
}

}  // namespace

TEST_CASE("recall examples") {
  std::mt19937_64 rng(71);
  EmbeddingMatrix q = l2_normalize(pds::testing::random_matrix(12, 5, rng));
  std::vector<std::size_t> ks{1, 3};
  RecallCurve self = recall_at_k(q, q, identity_truth(12), ks);
  CHECK(self.at.at(1) == 1.0);
  CHECK(self.n_queries == 12);

  EmbeddingMatrix two(2, 2, {1, 0, 0, 1}, {});
  std::vector<std::vector<std::size_t>> swapped{{1}, {0}};
  std::vector<std::size_t> k12{1, 2};
  RecallCurve s = recall_at_k(two, two, swapped, k12);
  CHECK(s.at.at(1) == 0.0);
  CHECK(s.at.at(2) == 1.0);

  // A tie at the top goes to the lower gallery index.
  EmbeddingMatrix gallery(3, 2, {0, 1, 1, 0, 1, 0}, {});
  EmbeddingMatrix query(1, 2, {1, 0}, {});
  std::vector<std::size_t> k1{1};
  CHECK(recall_at_k(query, gallery, {{1}}, k1).at.at(1) == 1.0);
  CHECK(recall_at_k(query, gallery, {{2}}, k1).at.at(1) == 0.0);
  CHECK(recall_at_k(query, gallery, {{0, 2}}, k1).at.at(1) == 0.0);
  std::vector<std::size_t> k2{2};
  CHECK(recall_at_k(query, gallery, {{0, 2}}, k2).at.at(2) == 1.0);
}

TEST_CASE("recall equals the full-sort oracle and is monotone in k") {
  std::mt19937_64 rng(72);
  for (int t = 0; t < 1000; ++t) {
    auto inst = pds::testing::random_retrieval(rng);
    std::vector<std::size_t> ks(inst.gallery.rows());
    std::iota(ks.begin(), ks.end(), 1);
    RecallCurve c = recall_at_k(inst.query, inst.gallery, inst.truth, ks);
    double previous = 0.0;
    for (std::size_t k : ks) {
      CHECK(c.at.at(k) == pds::testing::recall_by_full_sort(inst.query, inst.gallery, inst.truth, k));
      CHECK(c.at.at(k) >= previous);
      CHECK(c.at.at(k) <= 1.0);
      previous = c.at.at(k);
    }
    CHECK(c.at.at(ks.back()) == 1.0);
  }
}

TEST_CASE("recall argument errors") {
  EmbeddingMatrix two(2, 2, {1, 0, 0, 1}, {});
  EmbeddingMatrix empty(0, 2, std::vector<float>{}, {});
  std::vector<std::size_t> k1{1}, k3{3}, k0{0};
  CHECK(error_of([&] { recall_at_k(two, empty, identity_truth(2), k1); }) == Errc::empty_input);
  CHECK(error_of([&] { recall_at_k(two, two, identity_truth(2), k3); }) == Errc::invalid_argument);
  CHECK(error_of([&] { recall_at_k(two, two, identity_truth(2), k0); }) == Errc::invalid_argument);
  CHECK(error_of([&] { recall_at_k(two, two, {{0}, {}}, k1); }) == Errc::precondition);
  CHECK(error_of([&] { recall_at_k(two, two, {{0}}, k1); }) == Errc::size_mismatch);
}

TEST_CASE("rare subset examples") {
  EmbeddingMatrix train(2, 2, {1, 0, -1, 0}, {});
  EmbeddingMatrix test(3, 2, {0, 1, 3, 0, 0, -2}, {});
  CHECK(rare_subset(test, train, 2) == std::vector<std::size_t>{1, 2});
  CHECK(rare_subset(test, train, 3) == std::vector<std::size_t>{0, 1, 2});
  CHECK(rare_subset(test, train, 0).empty());
  EmbeddingMatrix line(2, 1, {1, -1}, {});
  EmbeddingMatrix tied(3, 1, {2, -2, 1}, {});
  CHECK(rare_subset(tied, line, 1) == std::vector<std::size_t>{0});
  CHECK(error_of([&] { rare_subset(test, train, 4); }) == Errc::invalid_argument);
  CHECK(kDefaultRareCount == 200);
}

TEST_CASE("rare subset equals the brute-force farthest set") {
  std::mt19937_64 rng(73);
  std::uniform_int_distribution<int> coarse(-2, 2);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + t % 30, r = t % (n + 1);
    EmbeddingMatrix test(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      test.at(i, 0) = static_cast<float>(coarse(rng));
      test.at(i, 1) = static_cast<float>(coarse(rng));
    }
    EmbeddingMatrix train = pds::testing::random_matrix(5, 2, rng, 0.1);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < 5; ++i) mx += train.at(i, 0) / 5.0, my += train.at(i, 1) / 5.0;
    // Index i is in the set iff fewer than r rows beat it (farther, or equal
    // and earlier).
    auto d = [&](std::size_t i) {
      float dx = test.at(i, 0) - static_cast<float>(mx), dy = test.at(i, 1) - static_cast<float>(my);
      return static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
    };
    std::vector<std::size_t> want;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t beaten = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (d(j) > d(i) || (d(j) == d(i) && j < i)) ++beaten;
      if (beaten < r) want.push_back(i);
    }
    CHECK(rare_subset(test, train, r) == want);
  }
}

TEST_CASE("test set keeps every caption of an image") {
  EmbeddingMatrix img(2, 2, {2, 0, 0, 3}, {"a", "b"});
  EmbeddingMatrix txt(3, 2, {1, 0, 1, 1, 0, 5}, {"x", "y", "z"});
  PairTable t = parse_pairs("pair_id\timage_id\tcaption_id\np1\ta\tx\np2\ta\ty\np3\tb\tz\n");
  TestSet s = TestSet::from_pairs(img, txt, t);
  CHECK(s.caption_image == std::vector<std::size_t>{0, 0, 1});
  CHECK(s.images.at(0, 0) == 1.0f);
  CHECK(s.captions.at(2, 1) == 1.0f);
  PairTable twice = parse_pairs("pair_id\timage_id\tcaption_id\np1\ta\tx\np2\tb\tx\n");
  CHECK(error_of([&] { TestSet::from_pairs(img, txt, twice); }) == Errc::duplicate_id);
}

TEST_CASE("image to text counts any caption of the image") {
  // Image 0 has captions 0 and 1; caption 1 lies on it, caption 0 does not.
  TestSet t;
  t.images = EmbeddingMatrix(2, 2, {1, 0, 0, 1}, {});
  t.captions = EmbeddingMatrix(3, 2, {0, 1, 1, 0, 0, 1}, {});
  t.caption_image = {0, 0, 1};
  ProbeModel identity;
  identity.w_img = DenseMatrix::identity(2);
  identity.w_txt = DenseMatrix::identity(2);
  EvalOptions o;
  o.ks = {1, 2};
  RetrievalReport r = evaluate_probe(identity, t, o);
  CHECK(r.n_tr_queries == 2);
  CHECK(r.n_ir_queries == 3);
  // Image 0 ranks caption 1 first (a hit); image 1 ties captions 0 and 2
  // and the lower row wins (a miss).
  CHECK(r.tr_at.at(1) == 0.5);
  CHECK(r.tr_at.at(2) == 1.0);
  CHECK(r.ir_at.at(1) == doctest::Approx(2.0 / 3.0));
  CHECK(r.ir_at.at(2) == 1.0);
}

TEST_CASE("identical towers give equal recall in both directions") {
  std::mt19937_64 rng(74);
  EmbeddingMatrix x = l2_normalize(pds::testing::random_matrix(40, 6, rng));
  ProbeModel identity;
  identity.w_img = DenseMatrix::identity(6);
  identity.w_txt = DenseMatrix::identity(6);
  EvalOptions o;
  RetrievalReport r = evaluate_probe(identity, identity_test_set(x), o);
  CHECK(r.ir_at == r.tr_at);
  CHECK(r.ir_at.at(1) == 1.0);

  // Shared random weights keep both directions symmetric.
  TrainConfig c;
  c.projection_dims = 3;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    ProbeModel shared = init_probe(6, c);
    shared.w_txt = shared.w_img;
    RetrievalReport s = evaluate_probe(shared, identity_test_set(x), o);
    CHECK(s.ir_at == s.tr_at);
  }
}

TEST_CASE("evaluate_distilled end to end") {
  MixtureSpec spec;
  spec.n_components = 5;
  spec.points_per_component = 20;
  spec.dim = 12;
  spec.component_separation = 8.0;
  spec.alignment_noise = 0.3;
  spec.seed = 75;
  SyntheticDataset data = generate(spec);
  TestSet test = TestSet::from_pairs(data.img, data.txt, data.pairs);
  TrainConfig c;
  c.epochs = 60;
  c.projection_dims = 12;
  c.seed = 1;
  EvalOptions o;
  RetrievalReport r = evaluate_distilled(data.img, data.txt, c, test, o);
  CHECK(r.ir_at.at(1) > 1.0 / 100.0);
  CHECK(r.tr_at.at(1) > 1.0 / 100.0);
  CHECK(r.ir_at.size() == 3);
  CHECK(r.tr_at.size() == 3);
  for (std::size_t k : kKs) {
    CHECK(r.ir_at.count(k) == 1);
    CHECK(r.tr_at.count(k) == 1);
  }
  CHECK(r.ir_at.at(1) <= r.ir_at.at(5));
  CHECK(r.ir_at.at(5) <= r.ir_at.at(10));
  CHECK(r.train_pairs == 100);
  CHECK(r.loss_trace.size() == 60);

  RetrievalReport again = evaluate_distilled(data.img, data.txt, c, test, o);
  CHECK(to_json(again).dump() == to_json(r).dump());

  EvalOptions rare = o;
  rare.query_images = rare_subset(test.images, data.img, 10);
  rare.subset = "rare";
  RetrievalReport rr = evaluate_distilled(data.img, data.txt, c, test, rare);
  CHECK(rr.n_tr_queries == 10);
  CHECK(rr.n_ir_queries == 10);
}

TEST_CASE("report JSON and CSV") {
  RetrievalReport r;
  r.method = "herding";
  r.ks = {1, 5};
  r.ir_at = {{1, 0.25}, {5, 0.5}};
  r.tr_at = {{1, 0.125}, {5, 1.0}};
  r.n_ir_queries = 8;
  r.n_tr_queries = 4;
  r.train_pairs = 10;
  auto j = to_json(r);
  CHECK(j.at("method") == "herding");
  CHECK(j.at("ir_at").at("5") == 0.5);
  CHECK(j.at("tr_at").at("1") == 0.125);
  CHECK(j.at("n_queries").at("tr") == 4);
  CHECK(j.at("config").at("subset") == "full");
  std::vector<std::size_t> ks{1, 5};
  CHECK(csv_header(ks) == "method,subset,train_pairs,ir@1,ir@5,tr@1,tr@5");
  CHECK(csv_row(r) == "herding,full,10,0.250000,0.500000,0.125000,1.000000");
}
