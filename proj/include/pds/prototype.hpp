// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pds/assign.hpp"
#include "pds/cluster.hpp"
#include "pds/preprocess.hpp"
#include "pds/tensor_io.hpp"

namespace pds {

enum class PairlessMode { keep, discard };
enum class PrototypeSource { shared_pairs, centroid_fallback };

std::string to_string(PairlessMode mode);
std::string to_string(PrototypeSource source);
PairlessMode parse_pairless_mode(const std::string& s);

/// keep for m <= 300, discard above.
PairlessMode default_pairless_mode(std::size_t m);

struct Prototype {
  std::size_t proto_id = 0;
  std::size_t image_cluster = 0;
  std::size_t text_cluster = 0;
  std::vector<float> image;  // mean of retained image embeddings (not renormalized)
  std::vector<float> text;
  std::size_t retained_pair_count = 0;
  std::string retrieved_caption_id;
  std::optional<std::string> retrieved_caption_text;
  PrototypeSource source = PrototypeSource::shared_pairs;
};

struct PrototypeSet {
  std::vector<Prototype> entries;
  PairlessMode pairless_mode = PairlessMode::keep;
  std::size_t pairless_matches = 0;

  std::size_t dims() const { return entries.empty() ? 0 : entries.front().image.size(); }
  EmbeddingMatrix image_matrix() const;
  EmbeddingMatrix text_matrix() const;
};

/// Everything needed to turn clusters into prototypes. pair_rows maps each
/// pair of the table to its image/caption rows.
struct PrototypeInputs {
  const ClusterModel& img_model;
  const ClusterModel& txt_model;
  const MatchResult& match;
  const PrunedDataset& pruned;
  const PairTable& pairs;
  std::span<const PairRows> pair_rows;
  const EmbeddingMatrix& img;
  const EmbeddingMatrix& txt;
};

/// Kept-pair positions p (indices into pruned.kept_pair_indices) whose image
/// and text both fall in matched cluster pair (i, permutation[i]); one list
/// per image cluster.
std::vector<std::vector<std::size_t>> retained_pairs(const ClusterModel& img_model,
                                                     const ClusterModel& txt_model,
                                                     const MatchResult& match);

/// Averages the retained shared pairs of every matched cluster pair.
/// Pairless matches fall back to the two centroids (keep) or are dropped
/// (discard). Caption retrieval runs over all rows of `txt`.
PrototypeSet build_prototypes(const PrototypeInputs& in, PairlessMode mode);

/// Plain matched centroids without shared-pair filtering.
PrototypeSet centroid_prototypes(const ClusterModel& img_model, const ClusterModel& txt_model,
                                 const MatchResult& match);

struct RetrievedCaption {
  std::size_t row = 0;
  std::string caption_id;
  std::optional<std::string> caption_text;
};

/// Caption row with maximal cosine to the prototype, ties to the lowest row.
RetrievedCaption retrieve_caption(std::span<const float> text_prototype, const EmbeddingMatrix& txt,
                                  const PairTable& pairs);

struct GenerationRecord {
  std::size_t proto_id = 0;
  std::vector<float> image_embedding;
  std::string caption_id;
  std::string caption_text;
  double guidance_scale = 5.0;
  std::size_t num_steps = 100;
  std::size_t output_size = 224;
  std::uint64_t seed = 0;
};

struct GenerationManifest {
  std::vector<GenerationRecord> records;
};

struct GenerationParams {
  double guidance_scale = 5.0;
  std::size_t num_steps = 100;
  std::size_t output_size = 224;
  std::uint64_t seed = 0;
};

/// One record per prototype; record seed = seed + proto_id.
GenerationManifest emit_manifest(const PrototypeSet& protos, const GenerationParams& params = {});

/// JSON-lines text, one object per record.
std::string manifest_to_jsonl(const GenerationManifest& manifest);
GenerationManifest manifest_from_jsonl(const std::string& text);
void write_manifest(const GenerationManifest& manifest, const std::filesystem::path& path);

/// Cosine between the image and text prototype of every entry.
std::vector<double> prototype_alignment_report(const PrototypeSet& protos);

}  // namespace pds
