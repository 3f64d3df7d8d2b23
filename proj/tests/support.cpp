// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "pds/cli.hpp"

namespace pds::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  path_ = fs::temp_directory_path() / ("pds_" + tag + "_" + std::to_string(rd()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string emb1_bytes(const std::string& header, const std::vector<float>& payload) {
  std::string out = "EMB1";
  const auto len = static_cast<std::uint32_t>(header.size());
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((len >> (8 * b)) & 0xff));
  out += header;
  for (float f : payload) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

EmbeddingMatrix random_matrix(std::size_t rows, std::size_t dims, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<float> data(rows * dims);
  for (float& v : data) v = static_cast<float>(normal(rng));
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < rows; ++r) ids.push_back("r" + std::to_string(r));
  return EmbeddingMatrix(rows, dims, std::move(data), std::move(ids));
}

DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix m(rows, cols);
  for (double& v : m.values) v = normal(rng);
  return m;
}

CostMatrix random_cost(std::size_t m, std::int64_t lo, std::int64_t hi, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> pick(lo, hi);
  CostMatrix c(m);
  for (auto& v : c.entries) v = pick(rng);
  return c;
}

namespace {

void enumerate(const CostMatrix& cost, std::vector<std::size_t>& current, std::vector<bool>& used,
               std::int64_t partial, std::vector<std::size_t>& best, std::int64_t& best_total) {
  const std::size_t row = current.size();
  if (row == cost.m) {
    if (best.empty() || partial < best_total) {
      best = current;
      best_total = partial;
    }
    return;
  }
  for (std::size_t j = 0; j < cost.m; ++j) {
    if (used[j]) continue;
    used[j] = true;
    current.push_back(j);
    enumerate(cost, current, used, partial + cost.at(row, j), best, best_total);
    current.pop_back();
    used[j] = false;
  }
}

}  // namespace

std::vector<std::size_t> optimal_permutation(const CostMatrix& cost, std::int64_t* total) {
  std::vector<std::size_t> current, best;
  std::vector<bool> used(cost.m, false);
  std::int64_t best_total = 0;
  enumerate(cost, current, used, 0, best, best_total);
  if (total) *total = best_total;
  return best;
}

bool same_partition(const std::vector<std::uint32_t>& got, const std::vector<std::size_t>& truth) {
  if (got.size() != truth.size()) return false;
  for (std::size_t a = 0; a < got.size(); ++a)
    for (std::size_t b = a + 1; b < got.size(); ++b)
      if ((got[a] == got[b]) != (truth[a] == truth[b])) return false;
  return true;
}

std::vector<std::vector<std::size_t>> enumerate_shared(const std::vector<std::uint32_t>& img,
                                                       const std::vector<std::uint32_t>& txt,
                                                       const std::vector<std::size_t>& perm) {
  std::vector<std::vector<std::size_t>> out(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t p = 0; p < img.size(); ++p)
      if (img[p] == i && txt[p] == perm[i]) out[i].push_back(p);
  return out;
}

bool prototypes_match_means(const DistillResult& r,
                            const std::vector<std::vector<std::size_t>>& retained, double tol) {
  const std::size_t dims = r.img.dims();
  for (const auto& proto : r.prototypes.entries) {
    const auto& members = retained[proto.image_cluster];
    if (proto.source == PrototypeSource::centroid_fallback) {
      if (!members.empty()) return false;
      continue;
    }
    if (members.size() != proto.retained_pair_count || members.empty()) return false;
    for (std::size_t d = 0; d < dims; ++d) {
      double mi = 0.0, mt = 0.0;
      for (std::size_t p : members) {
        const PairRows& rows = r.pair_rows[r.pruned.kept_pair_indices[p]];
        mi += r.img.at(rows.image_row, d);
        mt += r.txt.at(rows.caption_row, d);
      }
      mi /= static_cast<double>(members.size());
      mt /= static_cast<double>(members.size());
      if (std::abs(mi - proto.image[d]) > tol || std::abs(mt - proto.text[d]) > tol) return false;
    }
  }
  return true;
}

double gradient_relative_error(const DenseMatrix& img, const DenseMatrix& txt, double temperature) {
  InfoNceResult analytic = infonce_loss(img, txt, temperature);
  const double h = 1e-4;
  double diff = 0.0, scale = 0.0;
  auto probe = [&](DenseMatrix a, DenseMatrix b, bool on_img, std::size_t idx, double g) {
    DenseMatrix& target = on_img ? a : b;
    const double x = target.values[idx];
    target.values[idx] = x + h;
    double up = infonce_loss(a, b, temperature).loss;
    target.values[idx] = x - h;
    double down = infonce_loss(a, b, temperature).loss;
    double fd = (up - down) / (2.0 * h);
    diff += (fd - g) * (fd - g);
    scale += fd * fd;
  };
  for (std::size_t i = 0; i < img.values.size(); ++i) probe(img, txt, true, i, analytic.grad_img.values[i]);
  for (std::size_t i = 0; i < txt.values.size(); ++i) probe(img, txt, false, i, analytic.grad_txt.values[i]);
  return std::sqrt(diff) / std::max(std::sqrt(scale), 1e-12);
}

RetrievalInstance random_retrieval(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size(1, 12), dims(1, 4);
  std::uniform_int_distribution<int> grid(-2, 2);
  const std::size_t nq = size(rng), ng = size(rng), d = dims(rng);
  auto coarse = [&](std::size_t rows) {
    std::vector<float> data(rows * d);
    for (float& v : data) v = static_cast<float>(grid(rng)) * 0.5f;
    return EmbeddingMatrix(rows, d, std::move(data), {});
  };
  RetrievalInstance inst{coarse(nq), coarse(ng), {}};
  std::uniform_int_distribution<std::size_t> item(0, ng - 1);
  std::uniform_int_distribution<std::size_t> count(1, std::min<std::size_t>(3, ng));
  for (std::size_t q = 0; q < nq; ++q) {
    std::vector<std::size_t> t;
    for (std::size_t c = count(rng); t.size() < c;) {
      std::size_t g = item(rng);
      if (std::find(t.begin(), t.end(), g) == t.end()) t.push_back(g);
    }
    inst.truth.push_back(std::move(t));
  }
  return inst;
}

double recall_by_full_sort(const EmbeddingMatrix& query, const EmbeddingMatrix& gallery,
                           const std::vector<std::vector<std::size_t>>& truth, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t q = 0; q < query.rows(); ++q) {
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t g = 0; g < gallery.rows(); ++g) {
      double s = 0.0;
      for (std::size_t d = 0; d < gallery.dims(); ++d)
        s += static_cast<double>(query.at(q, d)) * static_cast<double>(gallery.at(g, d));
      scored.emplace_back(-s, g);
    }
    std::sort(scored.begin(), scored.end());
    for (std::size_t r = 0; r < k; ++r)
      if (std::count(truth[q].begin(), truth[q].end(), scored[r].second)) {
        ++hits;
        break;
      }
  }
  return query.rows() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(query.rows());
}

}  // namespace pds::testing
