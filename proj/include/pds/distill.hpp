// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end prototype distillation: normalize, prune, cluster each
// modality, match clusters, average shared pairs, retrieve captions.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pds/assign.hpp"
#include "pds/cluster.hpp"
#include "pds/preprocess.hpp"
#include "pds/prototype.hpp"
#include "pds/tensor_io.hpp"

namespace pds {

struct DistillConfig {
  std::size_t m = 100;
  double prune_ratio = kDefaultPruneRatio;
  /// k is overwritten with m.
  ClusterConfig cluster;
  /// Unset picks default_pairless_mode(m).
  std::optional<PairlessMode> pairless;
};

struct DistillResult {
  EmbeddingMatrix img;  // L2-normalized inputs
  EmbeddingMatrix txt;
  std::vector<PairRows> pair_rows;
  PrunedDataset pruned;
  ClusterModel img_model;
  ClusterModel txt_model;
  CostMatrix cost;
  MatchResult match;
  PrototypeSet prototypes;
};

DistillResult distill(const EmbeddingMatrix& img, const EmbeddingMatrix& txt, const PairTable& pairs,
                      const DistillConfig& config);

}  // namespace pds
