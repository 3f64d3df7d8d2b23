// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/prototype.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "pds/error.hpp"
#include "pds/parallel.hpp"

namespace pds {

namespace {

constexpr std::size_t kPairlessKeepLimit = 300;

std::vector<float> row_copy(const EmbeddingMatrix& m, std::size_t r) {
  auto row = m.row(r);
  return {row.begin(), row.end()};
}

std::size_t best_caption_row(std::span<const float> prototype, const EmbeddingMatrix& txt) {
  if (txt.empty()) throw Error(Errc::empty_input, "no captions to retrieve from");
  if (prototype.size() != txt.dims())
    throw Error(Errc::size_mismatch, "prototype and caption dims differ");
  if (norm(prototype) == 0.0) throw Error(Errc::zero_norm, "zero text prototype");
  // Captions are unit rows, so the dot product ranks by cosine.
  std::vector<double> scores(txt.rows());
  parallel_for(txt.rows(), [&](std::size_t r) { scores[r] = dot(prototype, txt.row(r)); });
  std::size_t best = 0;
  for (std::size_t r = 1; r < scores.size(); ++r)
    if (scores[r] > scores[best]) best = r;
  return best;
}

EmbeddingMatrix stack(const PrototypeSet& set, bool image) {
  const std::size_t dims = set.dims() == 0 ? 1 : set.dims();
  EmbeddingMatrix m(set.entries.size(), dims);
  std::vector<std::string> ids;
  for (std::size_t e = 0; e < set.entries.size(); ++e) {
    const auto& v = image ? set.entries[e].image : set.entries[e].text;
    std::copy(v.begin(), v.end(), m.row(e).begin());
    ids.push_back("proto_" + std::to_string(set.entries[e].proto_id));
  }
  return EmbeddingMatrix(m.rows(), dims, std::move(m.data()), std::move(ids));
}

}  // namespace

std::string to_string(PairlessMode mode) { return mode == PairlessMode::discard ? "discard" : "keep"; }

std::string to_string(PrototypeSource source) {
  return source == PrototypeSource::centroid_fallback ? "centroid-fallback" : "shared-pairs";
}

PairlessMode parse_pairless_mode(const std::string& s) {
  if (s == "keep") return PairlessMode::keep;
  if (s == "discard") return PairlessMode::discard;
  throw Error(Errc::invalid_argument, "unknown pairless mode '" + s + "'");
}

PairlessMode default_pairless_mode(std::size_t m) {
  return m <= kPairlessKeepLimit ? PairlessMode::keep : PairlessMode::discard;
}

EmbeddingMatrix PrototypeSet::image_matrix() const { return stack(*this, true); }
EmbeddingMatrix PrototypeSet::text_matrix() const { return stack(*this, false); }

std::vector<std::vector<std::size_t>> retained_pairs(const ClusterModel& img_model,
                                                     const ClusterModel& txt_model,
                                                     const MatchResult& match) {
  if (img_model.k != txt_model.k || match.permutation.size() != img_model.k)
    throw Error(Errc::size_mismatch, "cluster counts and matching size disagree");
  if (img_model.assignments.size() != txt_model.assignments.size())
    throw Error(Errc::size_mismatch, "image and text models cluster different point sets");
  std::vector<std::vector<std::size_t>> retained(img_model.k);
  for (std::size_t p = 0; p < img_model.assignments.size(); ++p) {
    std::size_t i = img_model.assignments[p];
    if (txt_model.assignments[p] == match.permutation[i]) retained[i].push_back(p);
  }
  return retained;
}

RetrievedCaption retrieve_caption(std::span<const float> text_prototype, const EmbeddingMatrix& txt,
                                  const PairTable& pairs) {
  RetrievedCaption out;
  out.row = best_caption_row(text_prototype, txt);
  out.caption_id = txt.ids()[out.row];
  out.caption_text = pairs.caption_text(out.caption_id);
  return out;
}

PrototypeSet build_prototypes(const PrototypeInputs& in, PairlessMode mode) {
  const std::size_t m = in.img_model.k;
  if (in.img.dims() != in.txt.dims())
    throw Error(Errc::size_mismatch, "image and text embeddings differ in dimension");
  if (in.img_model.centroids.rows() != m || in.txt_model.centroids.rows() != m)
    throw Error(Errc::size_mismatch, "centroid counts disagree with k");
  if (in.img_model.assignments.size() != in.pruned.kept_pair_indices.size())
    throw Error(Errc::size_mismatch, "cluster assignments do not match the kept pairs");
  auto retained = retained_pairs(in.img_model, in.txt_model, in.match);

  std::unordered_map<std::string, std::string> caption_texts;
  for (const auto& p : in.pairs.pairs)
    if (p.caption_text) caption_texts.emplace(p.caption_id, *p.caption_text);

  const std::size_t dims = in.img.dims();
  PrototypeSet set;
  set.pairless_mode = mode;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = in.match.permutation[i];
    Prototype proto;
    proto.image_cluster = i;
    proto.text_cluster = j;
    proto.retained_pair_count = retained[i].size();
    if (retained[i].empty()) {
      ++set.pairless_matches;
      if (mode == PairlessMode::discard) continue;
      proto.source = PrototypeSource::centroid_fallback;
      proto.image = row_copy(in.img_model.centroids, i);
      proto.text = row_copy(in.txt_model.centroids, j);
    } else {
      std::vector<double> img_sum(dims, 0.0), txt_sum(dims, 0.0);
      for (std::size_t p : retained[i]) {
        const PairRows& rows = in.pair_rows[in.pruned.kept_pair_indices[p]];
        auto a = in.img.row(rows.image_row);
        auto b = in.txt.row(rows.caption_row);
        for (std::size_t d = 0; d < dims; ++d) {
          img_sum[d] += a[d];
          txt_sum[d] += b[d];
        }
      }
      double count = static_cast<double>(retained[i].size());
      proto.image.resize(dims);
      proto.text.resize(dims);
      for (std::size_t d = 0; d < dims; ++d) {
        proto.image[d] = static_cast<float>(img_sum[d] / count);
        proto.text[d] = static_cast<float>(txt_sum[d] / count);
      }
    }
    std::size_t row = best_caption_row(proto.text, in.txt);
    proto.retrieved_caption_id = in.txt.ids()[row];
    if (auto it = caption_texts.find(proto.retrieved_caption_id); it != caption_texts.end())
      proto.retrieved_caption_text = it->second;
    proto.proto_id = set.entries.size();
    set.entries.push_back(std::move(proto));
  }
  return set;
}

PrototypeSet centroid_prototypes(const ClusterModel& img_model, const ClusterModel& txt_model,
                                 const MatchResult& match) {
  if (img_model.k != txt_model.k || match.permutation.size() != img_model.k)
    throw Error(Errc::size_mismatch, "cluster counts and matching size disagree");
  PrototypeSet set;
  for (std::size_t i = 0; i < img_model.k; ++i) {
    Prototype proto;
    proto.proto_id = i;
    proto.image_cluster = i;
    proto.text_cluster = match.permutation[i];
    proto.image = row_copy(img_model.centroids, i);
    proto.text = row_copy(txt_model.centroids, proto.text_cluster);
    proto.source = PrototypeSource::centroid_fallback;
    set.entries.push_back(std::move(proto));
  }
  return set;
}

GenerationManifest emit_manifest(const PrototypeSet& protos, const GenerationParams& params) {
  if (protos.entries.empty()) throw Error(Errc::empty_input, "no prototypes to emit");
  if (!(params.guidance_scale > 0.0)) throw Error(Errc::invalid_argument, "guidance scale must be > 0");
  if (params.num_steps == 0) throw Error(Errc::invalid_argument, "num_steps must be >= 1");
  if (params.output_size == 0) throw Error(Errc::invalid_argument, "output size must be >= 1");
  GenerationManifest manifest;
  for (const auto& p : protos.entries) {
    GenerationRecord r;
    r.proto_id = p.proto_id;
    r.image_embedding = p.image;
    r.caption_id = p.retrieved_caption_id;
    r.caption_text = p.retrieved_caption_text.value_or("");
    r.guidance_scale = params.guidance_scale;
    r.num_steps = params.num_steps;
    r.output_size = params.output_size;
    r.seed = params.seed + p.proto_id;
    manifest.records.push_back(std::move(r));
  }
  return manifest;
}

std::string manifest_to_jsonl(const GenerationManifest& manifest) {
  std::string out;
  for (const auto& r : manifest.records) {
    nlohmann::ordered_json j;
    j["proto_id"] = r.proto_id;
    j["image_embedding"] = r.image_embedding;
    j["caption_id"] = r.caption_id;
    j["caption_text"] = r.caption_text;
    j["guidance_scale"] = r.guidance_scale;
    j["num_steps"] = r.num_steps;
    j["output_size"] = r.output_size;
    j["seed"] = r.seed;
    out += j.dump();
    out += '\n';
  }
  return out;
}

GenerationManifest manifest_from_jsonl(const std::string& text) {
  GenerationManifest manifest;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      GenerationRecord r;
      r.proto_id = j.at("proto_id").get<std::size_t>();
      r.image_embedding = j.at("image_embedding").get<std::vector<float>>();
      r.caption_id = j.at("caption_id").get<std::string>();
      r.caption_text = j.at("caption_text").get<std::string>();
      r.guidance_scale = j.at("guidance_scale").get<double>();
      r.num_steps = j.at("num_steps").get<std::size_t>();
      r.output_size = j.at("output_size").get<std::size_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      manifest.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_field,
                  "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return manifest;
}

void write_manifest(const GenerationManifest& manifest, const std::filesystem::path& path) {
  write_file(path, manifest_to_jsonl(manifest));
}

std::vector<double> prototype_alignment_report(const PrototypeSet& protos) {
  std::vector<double> out;
  out.reserve(protos.entries.size());
  for (const auto& p : protos.entries) out.push_back(cosine(p.image, p.text));
  return out;
}

}  // namespace pds
