// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pds/probe.hpp"
#include "pds/tensor_io.hpp"

namespace pds {

/// Recall per k for one retrieval direction.
struct RecallCurve {
  std::map<std::size_t, double> at;
  std::size_t n_queries = 0;
};

/// Fraction of queries whose top-k gallery rows (cosine, ties to the lower
/// gallery index) contain at least one ground-truth row. Inputs must be
/// L2-normalized.
RecallCurve recall_at_k(const EmbeddingMatrix& query, const EmbeddingMatrix& gallery,
                        const std::vector<std::vector<std::size_t>>& ground_truth,
                        std::span<const std::size_t> ks);

inline constexpr std::size_t kDefaultRareCount = 200;

/// The r rows of `test` farthest (L2) from the mean of `train`, ascending by
/// row index. Distance ties go to the lower index.
std::vector<std::size_t> rare_subset(const EmbeddingMatrix& test, const EmbeddingMatrix& train,
                                     std::size_t r);

/// Held-out retrieval data: every caption row belongs to one image row.
struct TestSet {
  EmbeddingMatrix images;
  EmbeddingMatrix captions;
  std::vector<std::size_t> caption_image;  // caption row -> image row

  /// Builds an L2-normalized test set from the pair table; captions are the
  /// rows of `txt` referenced by the table, each exactly once.
  static TestSet from_pairs(const EmbeddingMatrix& img, const EmbeddingMatrix& txt,
                            const PairTable& pairs);
};

struct RetrievalReport {
  std::string method;
  std::string subset = "full";
  std::vector<std::size_t> ks;
  std::map<std::size_t, double> ir_at;  // text -> image
  std::map<std::size_t, double> tr_at;  // image -> text
  std::size_t n_ir_queries = 0;
  std::size_t n_tr_queries = 0;
  std::size_t train_pairs = 0;
  std::vector<double> loss_trace;
};

struct EvalOptions {
  std::vector<std::size_t> ks{1, 5, 10};
  /// Restricts queries to these image rows (and their captions for IR).
  std::optional<std::vector<std::size_t>> query_images;
  std::string subset = "full";
  std::string method = "distilled";
};

/// Trains a probe on the L2-normalized training pairs, projects the test set
/// and scores both retrieval directions.
RetrievalReport evaluate_distilled(const EmbeddingMatrix& train_img, const EmbeddingMatrix& train_txt,
                                   const TrainConfig& probe, const TestSet& test,
                                   const EvalOptions& options);

/// Scores an already trained probe.
RetrievalReport evaluate_probe(const ProbeModel& model, const TestSet& test,
                               const EvalOptions& options);

nlohmann::ordered_json to_json(const RetrievalReport& report);
std::string csv_header(std::span<const std::size_t> ks);
std::string csv_row(const RetrievalReport& report);

}  // namespace pds
