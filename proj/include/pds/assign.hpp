// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "pds/cluster.hpp"
#include "pds/preprocess.hpp"

namespace pds {

/// Square integer cost matrix. For cluster matching, entry (i, j) is minus
/// the number of kept pairs with image in cluster i and text in cluster j.
struct CostMatrix {
  std::size_t m = 0;
  std::vector<std::int64_t> entries;  // row-major m x m

  CostMatrix() = default;
  explicit CostMatrix(std::size_t size) : m(size), entries(size * size, 0) {}
  CostMatrix(std::size_t size, std::vector<std::int64_t> values);

  std::int64_t& at(std::size_t i, std::size_t j) { return entries[i * m + j]; }
  std::int64_t at(std::size_t i, std::size_t j) const { return entries[i * m + j]; }

  CostMatrix transposed() const;
};

struct MatchResult {
  std::vector<std::size_t> permutation;  // image cluster i -> text cluster permutation[i]
  std::int64_t total_cost = 0;
  std::vector<std::int64_t> shared_counts;  // -cost[i][permutation[i]]
};

/// Contingency counts over the kept pairs, negated. Both models cluster
/// the kept pairs in pruned.kept_pair_indices order.
CostMatrix build_cost_matrix(const ClusterModel& img_model, const ClusterModel& txt_model,
                             const PrunedDataset& pruned);

/// Minimum-cost permutation. Among co-optimal permutations the
/// lexicographically smallest assignment vector is returned.
MatchResult solve_assignment(const CostMatrix& cost);

/// Exhaustive search over all m! permutations, m <= 9. Same tie-break.
MatchResult brute_force_assignment(const CostMatrix& cost);

inline constexpr std::size_t kBruteForceLimit = 9;

nlohmann::ordered_json to_json(const CostMatrix& cost);
nlohmann::ordered_json to_json(const MatchResult& match);
CostMatrix cost_matrix_from_json(const nlohmann::json& j);

}  // namespace pds
