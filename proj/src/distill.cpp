// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/distill.hpp"

#include "pds/error.hpp"

namespace pds {

DistillResult distill(const EmbeddingMatrix& img, const EmbeddingMatrix& txt, const PairTable& pairs,
                      const DistillConfig& config) {
  if (config.m == 0) throw Error(Errc::invalid_argument, "m must be >= 1");
  DistillResult r;
  r.img = l2_normalize(img);
  r.txt = l2_normalize(txt);
  r.pair_rows = resolve_pairs(pairs, r.img, r.txt);
  r.pruned = prune_pairs(pair_similarities(r.img, r.txt, r.pair_rows), config.prune_ratio);

  ClusterConfig cluster = config.cluster;
  cluster.k = config.m;
  std::tie(r.img_model, r.txt_model) =
      cluster_modalities(r.img, r.txt, r.pair_rows, r.pruned, cluster);
  r.cost = build_cost_matrix(r.img_model, r.txt_model, r.pruned);
  r.match = solve_assignment(r.cost);

  PrototypeInputs in{r.img_model, r.txt_model, r.match, r.pruned, pairs, r.pair_rows, r.img, r.txt};
  r.prototypes = build_prototypes(in, config.pairless.value_or(default_pairless_mode(config.m)));
  return r;
}

}  // namespace pds
