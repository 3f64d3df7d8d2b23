// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "pds/error.hpp"
#include "pds/tensor_io.hpp"
#include "support.hpp"

using namespace pds;
using pds::testing::emb1_bytes;
using pds::testing::error_of;

namespace {

const std::string kHeader2x2 =
    R"({"dtype":"f32","shape":[2,2],"order":"row-major","ids":["a","b"]})";

EmbeddingMatrix decode(const std::string& bytes) { return decode_embeddings(bytes); }

}  // namespace

TEST_CASE("hand-built file decodes to the declared matrix") {
  EmbeddingMatrix m = decode(emb1_bytes(kHeader2x2, {1, 0, 0, 1}));
  CHECK(m.rows() == 2);
  CHECK(m.dims() == 2);
  CHECK(m.at(0, 0) == 1.0f);
  CHECK(m.at(0, 1) == 0.0f);
  CHECK(m.at(1, 1) == 1.0f);
  CHECK(m.ids() == std::vector<std::string>{"a", "b"});
  CHECK(m.find("b") == 1u);
  CHECK_FALSE(m.find("c").has_value());
}

TEST_CASE("encoder writes the documented byte layout") {
  EmbeddingMatrix m(1, 1, {0.5f}, {"x"});
  std::string bytes = encode_embeddings(m);
  const std::string header = R"({"dtype":"f32","shape":[1,1],"order":"row-major","ids":["x"]})";
  CHECK(bytes == emb1_bytes(header, {0.5f}));
  // 0.5f is 0x3f000000, stored little-endian.
  CHECK(bytes.substr(bytes.size() - 4) == std::string("\x00\x00\x00\x3f", 4));
}

TEST_CASE("empty matrix round-trips with a zero-length payload") {
  EmbeddingMatrix m(0, 4, std::vector<float>{}, {});
  std::string bytes = encode_embeddings(m);
  const std::string header = R"({"dtype":"f32","shape":[0,4],"order":"row-major","ids":[]})";
  CHECK(bytes == emb1_bytes(header, {}));
  EmbeddingMatrix back = decode(bytes);
  CHECK(back.rows() == 0);
  CHECK(back.dims() == 4);
}

TEST_CASE("round-trip is bit-exact over random matrices") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    EmbeddingMatrix m = pds::testing::random_matrix(5, 7, rng, 3.0);
    std::string bytes = encode_embeddings(m);
    EmbeddingMatrix back = decode(bytes);
    REQUIRE(back.rows() == 5);
    CHECK(std::memcmp(back.data().data(), m.data().data(), m.data().size() * 4) == 0);
    CHECK(back.ids() == m.ids());
    CHECK(encode_embeddings(back) == bytes);
  }
}

TEST_CASE("file round-trip through the filesystem") {
  pds::testing::TempDir dir("tensor_io");
  std::mt19937_64 rng(6);
  EmbeddingMatrix m = pds::testing::random_matrix(10, 3, rng);
  write_embeddings(m, dir.path() / "m.emb");
  CHECK(read_embeddings(dir.path() / "m.emb") == m);
  write_embeddings(m, dir.path() / "again.emb");
  CHECK(read_file(dir.path() / "m.emb") == read_file(dir.path() / "again.emb"));
}

TEST_CASE("each corruption maps to its own error") {
  const std::string good = emb1_bytes(kHeader2x2, {1, 0, 0, 1});

  SUBCASE("bad magic") {
    std::string bytes = good;
    bytes[3] = '2';
    CHECK(error_of([&] { decode(bytes); }) == Errc::bad_magic);
    CHECK(error_of([&] { decode(""); }) == Errc::bad_magic);
  }
  SUBCASE("header length past end of file") {
    CHECK(error_of([&] { decode(good.substr(0, 20)); }) == Errc::bad_header);
  }
  SUBCASE("header not JSON") {
    CHECK(error_of([&] { decode(emb1_bytes("{nope", {})); }) == Errc::bad_header);
  }
  SUBCASE("wrong dtype") {
    const std::string h = R"({"dtype":"f64","shape":[1,1],"order":"row-major","ids":["a"]})";
    CHECK(error_of([&] { decode(emb1_bytes(h, {1})); }) == Errc::bad_header);
  }
  SUBCASE("truncated payload") {
    const std::string h =
        R"({"dtype":"f32","shape":[3,4],"order":"row-major","ids":["a","b","c"]})";
    CHECK(error_of([&] { decode(emb1_bytes(h, std::vector<float>(8, 1.0f))); }) ==
          Errc::truncated_payload);
  }
  SUBCASE("trailing payload bytes") {
    CHECK(error_of([&] { decode(emb1_bytes(kHeader2x2, {1, 0, 0, 1, 7})); }) ==
          Errc::shape_mismatch);
  }
  SUBCASE("id count disagrees with shape") {
    const std::string h = R"({"dtype":"f32","shape":[2,2],"order":"row-major","ids":["a"]})";
    CHECK(error_of([&] { decode(emb1_bytes(h, {1, 0, 0, 1})); }) == Errc::shape_mismatch);
  }
  SUBCASE("non-finite values") {
    const float nan = std::numeric_limits<float>::quiet_NaN();
    const float inf = std::numeric_limits<float>::infinity();
    CHECK(error_of([&] { decode(emb1_bytes(kHeader2x2, {1, nan, 0, 1})); }) == Errc::non_finite);
    CHECK(error_of([&] { decode(emb1_bytes(kHeader2x2, {1, 0, -inf, 1})); }) == Errc::non_finite);
  }
  SUBCASE("duplicate ids") {
    const std::string h = R"({"dtype":"f32","shape":[2,2],"order":"row-major","ids":["a","a"]})";
    CHECK(error_of([&] { decode(emb1_bytes(h, {1, 0, 0, 1})); }) == Errc::duplicate_id);
  }
  SUBCASE("missing file") {
    CHECK(error_of([] { read_embeddings("/nonexistent/pds/x.emb"); }) == Errc::io_failure);
  }
}

TEST_CASE("gather keeps ids unique when rows repeat") {
  EmbeddingMatrix m(2, 1, {1.0f, 2.0f}, {"a", "b"});
  std::vector<std::size_t> rows{1, 0, 1};
  EmbeddingMatrix g = m.gather(rows);
  CHECK(g.rows() == 3);
  CHECK(g.at(0, 0) == 2.0f);
  CHECK(g.at(2, 0) == 2.0f);
  std::vector<std::string> ids = g.ids();
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
}

TEST_CASE("pair manifest parsing") {
  SUBCASE("three unique rows") {
    PairTable t = parse_pairs(
        "pair_id\timage_id\tcaption_id\tcaption_text\tlang_prob\n"
        "p1\ti1\tc1\ta dog\t0.9\n"
        "p2\ti2\tc2\ta cat\t0.25\n"
        "p3\ti3\tc3\t\t\n");
    REQUIRE(t.size() == 3);
    CHECK(t.pairs[0].caption_text == "a dog");
    CHECK(t.pairs[1].lang_prob == doctest::Approx(0.25));
    CHECK_FALSE(t.pairs[2].caption_text.has_value());
    CHECK_FALSE(t.pairs[2].lang_prob.has_value());
    CHECK_FALSE(t.has_lang_prob());
  }
  SUBCASE("optional columns may be absent entirely") {
    PairTable t = parse_pairs("pair_id\timage_id\tcaption_id\np1\ti1\tc1\n");
    REQUIRE(t.size() == 1);
    CHECK(t.pairs[0].image_id == "i1");
  }
  SUBCASE("one image in five pairs") {
    std::string tsv = "pair_id\timage_id\tcaption_id\n";
    for (int c = 0; c < 5; ++c) tsv += "p" + std::to_string(c) + "\ti1\tc" + std::to_string(c) + "\n";
    PairTable t = parse_pairs(tsv);
    CHECK(t.size() == 5);
    for (const auto& p : t.pairs) CHECK(p.image_id == "i1");
  }
  SUBCASE("duplicate pair id") {
    CHECK(error_of([] { parse_pairs("pair_id\timage_id\tcaption_id\np1\ti1\tc1\np1\ti2\tc2\n"); }) ==
          Errc::duplicate_pair);
  }
  SUBCASE("missing required column") {
    CHECK(error_of([] { parse_pairs("pair_id\tcaption_id\np1\tc1\n"); }) == Errc::missing_column);
    CHECK(error_of([] { parse_pairs(""); }) == Errc::missing_column);
  }
  SUBCASE("malformed lang_prob") {
    const std::string head = "pair_id\timage_id\tcaption_id\tcaption_text\tlang_prob\n";
    CHECK(error_of([&] { parse_pairs(head + "p1\ti1\tc1\tx\tabc\n"); }) == Errc::malformed_field);
    CHECK(error_of([&] { parse_pairs(head + "p1\ti1\tc1\tx\t1.5\n"); }) == Errc::malformed_field);
    CHECK(error_of([&] { parse_pairs(head + "p1\ti1\tc1\tx\t0.5z\n"); }) == Errc::malformed_field);
  }
}

TEST_CASE("pair manifest round-trips through write_pairs") {
  pds::testing::TempDir dir("pairs");
  PairTable t;
  t.pairs.push_back({"p1", "i1", "c1", "first caption", 0.1});
  t.pairs.push_back({"p2", "i1", "c2", std::nullopt, std::nullopt});
  t.pairs.push_back({"p3", "i2", "c3", "third", 1.0 / 3.0});
  write_pairs(t, dir.path() / "pairs.tsv");
  PairTable back = read_pairs(dir.path() / "pairs.tsv");
  CHECK(back.pairs == t.pairs);
}

TEST_CASE("joining pairs against the id maps") {
  EmbeddingMatrix img(2, 1, {1.0f, 2.0f}, {"i1", "i2"});
  EmbeddingMatrix txt(2, 1, {3.0f, 4.0f}, {"c1", "c2"});
  PairTable t = parse_pairs("pair_id\timage_id\tcaption_id\np1\ti2\tc1\np2\ti2\tc2\n");
  auto rows = resolve_pairs(t, img, txt);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].image_row == 1);
  CHECK(rows[0].caption_row == 0);
  CHECK(rows[1].caption_row == 1);

  PairTable dangling = parse_pairs("pair_id\timage_id\tcaption_id\np1\ti9\tc1\n");
  CHECK(error_of([&] { resolve_pairs(dangling, img, txt); }) == Errc::dangling_id);
  PairTable dangling_caption = parse_pairs("pair_id\timage_id\tcaption_id\np1\ti1\tc9\n");
  CHECK(error_of([&] { resolve_pairs(dangling_caption, img, txt); }) == Errc::dangling_id);
}

TEST_CASE("in-memory construction validates shape") {
  CHECK(error_of([] { EmbeddingMatrix(2, 2, std::vector<float>(3), {}); }) == Errc::shape_mismatch);
  CHECK(error_of([] { EmbeddingMatrix(1, 0, std::vector<float>{}, {}); }) == Errc::shape_mismatch);
  CHECK(error_of([] { EmbeddingMatrix(2, 1, std::vector<float>{1, 2}, {"a"}); }) ==
        Errc::shape_mismatch);
}
