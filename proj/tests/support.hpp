// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures and independent oracles for the test binaries.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "pds/assign.hpp"
#include "pds/distill.hpp"
#include "pds/error.hpp"
#include "pds/probe.hpp"
#include "pds/tensor_io.hpp"

namespace pds::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Error code thrown by f, or nullopt when it returns normally.
template <class F>
std::optional<Errc> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// EMB1 bytes assembled by hand from a header string and raw floats.
std::string emb1_bytes(const std::string& header, const std::vector<float>& payload);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

EmbeddingMatrix random_matrix(std::size_t rows, std::size_t dims, std::mt19937_64& rng,
                              double scale = 1.0);
DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
CostMatrix random_cost(std::size_t m, std::int64_t lo, std::int64_t hi, std::mt19937_64& rng);

/// Every permutation enumerated by recursion; first strict minimum in
/// lexicographic order.
std::vector<std::size_t> optimal_permutation(const CostMatrix& cost, std::int64_t* total = nullptr);

/// True when both labelings induce the same partition.
bool same_partition(const std::vector<std::uint32_t>& got, const std::vector<std::size_t>& truth);

/// Points p with img[p] == i and txt[p] == perm[i], one list per i.
std::vector<std::vector<std::size_t>> enumerate_shared(const std::vector<std::uint32_t>& img,
                                                       const std::vector<std::uint32_t>& txt,
                                                       const std::vector<std::size_t>& perm);

/// Checks every shared-pair prototype against the plain mean of its
/// retained pairs.
bool prototypes_match_means(const DistillResult& r,
                            const std::vector<std::vector<std::size_t>>& retained, double tol);

/// Norm-wise relative error of the analytic InfoNCE gradient against
/// central finite differences.
double gradient_relative_error(const DenseMatrix& img, const DenseMatrix& txt, double temperature);

struct RetrievalInstance {
  EmbeddingMatrix query;
  EmbeddingMatrix gallery;
  std::vector<std::vector<std::size_t>> truth;
};

/// Small instances on a coarse value grid so score ties are common.
RetrievalInstance random_retrieval(std::mt19937_64& rng);

/// Recall@k by sorting the whole gallery (score desc, index asc).
double recall_by_full_sort(const EmbeddingMatrix& query, const EmbeddingMatrix& gallery,
                           const std::vector<std::vector<std::size_t>>& truth, std::size_t k);

}  // namespace pds::testing
