// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

// On-disk formats shared by every stage of the pipeline:
//
//   EMB1 embedding container
//     bytes 0..3    ASCII "EMB1"
//     bytes 4..7    u32 little-endian header length H
//     bytes 8..8+H  UTF-8 JSON {"dtype":"f32","shape":[N,D],"order":"row-major","ids":[...]}
//     remainder     N*D little-endian float32, row-major
//
//   Pair manifest
//     UTF-8 TSV with header pair_id, image_id, caption_id, caption_text, lang_prob.
//     The last two columns are optional and may be empty.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace pds {

/// Dense N x D float32 matrix with one string id per row.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Zero-filled matrix. ids default to "0".."rows-1" when empty.
  EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<std::string> ids = {});
  EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> data,
                  std::vector<std::string> ids);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dims() const noexcept { return dims_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<float> row(std::size_t r) { return {data_.data() + r * dims_, dims_}; }
  std::span<const float> row(std::size_t r) const { return {data_.data() + r * dims_, dims_}; }
  float& at(std::size_t r, std::size_t c) { return data_[r * dims_ + c]; }
  float at(std::size_t r, std::size_t c) const { return data_[r * dims_ + c]; }

  const std::vector<float>& data() const noexcept { return data_; }
  std::vector<float>& data() noexcept { return data_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  /// Row index for an id, if present.
  std::optional<std::size_t> find(const std::string& id) const;

  /// Matrix made of the given rows, in order. Duplicate source rows get
  /// "#k" suffixed ids to keep ids unique.
  EmbeddingMatrix gather(std::span<const std::size_t> rows) const;

  /// Checks shape, finiteness and id uniqueness. Throws pds::Error.
  void validate() const;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  void index_ids();

  std::size_t rows_ = 0;
  std::size_t dims_ = 1;
  std::vector<float> data_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> id_index_;
};

EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

/// EMB1 bytes for a matrix; write_embeddings writes exactly these.
std::string encode_embeddings(const EmbeddingMatrix& matrix);
EmbeddingMatrix decode_embeddings(std::span<const char> bytes);

struct PairRecord {
  std::string pair_id;
  std::string image_id;
  std::string caption_id;
  std::optional<std::string> caption_text;
  std::optional<double> lang_prob;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

struct PairTable {
  std::vector<PairRecord> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool has_lang_prob() const;
  /// First caption_text recorded for a caption id.
  std::optional<std::string> caption_text(const std::string& caption_id) const;
};

PairTable read_pairs(const std::filesystem::path& path);
PairTable parse_pairs(const std::string& tsv);
void write_pairs(const PairTable& table, const std::filesystem::path& path);

/// Row indices of one pair inside the image and caption matrices.
struct PairRows {
  std::size_t image_row;
  std::size_t caption_row;
};

/// Joins a pair table against both id maps. Throws Errc::dangling_id on
/// any id that does not resolve.
std::vector<PairRows> resolve_pairs(const PairTable& pairs, const EmbeddingMatrix& img,
                                    const EmbeddingMatrix& txt);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace pds
