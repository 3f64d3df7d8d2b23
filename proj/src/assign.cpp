// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/assign.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "pds/error.hpp"

namespace pds {

namespace {

MatchResult make_result(const CostMatrix& cost, std::vector<std::size_t> perm) {
  MatchResult r;
  r.permutation = std::move(perm);
  r.shared_counts.resize(cost.m);
  for (std::size_t i = 0; i < cost.m; ++i) {
    std::int64_t c = cost.at(i, r.permutation[i]);
    r.total_cost += c;
    r.shared_counts[i] = -c;
  }
  return r;
}

// Shortest augmenting path (Jonker-Volgenant style, O(m^3)) on exact
// integer costs. Returns row->col and the final dual potentials, which
// stay feasible: cost(i,j) - u[i] - v[j] >= 0 everywhere, with equality
// on the returned matching.
struct Duals {
  std::vector<std::size_t> row_to_col;
  std::vector<std::int64_t> u;
  std::vector<std::int64_t> v;
};

Duals shortest_augmenting_path(const CostMatrix& cost) {
  const std::size_t n = cost.m;
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based with column 0 as the virtual source.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      std::int64_t delta = kInf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        std::int64_t cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        // Strict comparison: equal slack resolves to the lower column.
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Duals d;
  d.row_to_col.resize(n);
  for (std::size_t j = 1; j <= n; ++j) d.row_to_col[p[j] - 1] = j - 1;
  d.u.assign(u.begin() + 1, u.end());
  d.v.assign(v.begin() + 1, v.end());
  return d;
}

// Every optimal permutation uses only tight edges (zero reduced cost under
// optimal duals), so the lexicographically smallest optimum is the
// lexicographically smallest perfect matching of the tight subgraph.
// Rows are fixed in order, each to the lowest column that still leaves a
// perfect matching on the remaining rows.
std::vector<std::size_t> lexicographic_optimum(const CostMatrix& cost, Duals duals) {
  const std::size_t n = cost.m;
  std::vector<std::vector<std::size_t>> tight(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (cost.at(i, j) - duals.u[i] - duals.v[j] == 0) tight[i].push_back(j);

  std::vector<std::size_t> row_to_col = std::move(duals.row_to_col);
  std::vector<std::size_t> col_to_row(n);
  for (std::size_t i = 0; i < n; ++i) col_to_row[row_to_col[i]] = i;

  // Columns owned by fixed rows, plus the one under trial.
  std::vector<char> blocked(n, 0);
  std::vector<std::size_t> row_from(n);
  std::vector<char> seen(n);
  std::vector<std::size_t> stack;

  // Alternating path from `start` (which gives up its column) to `target`
  // over unblocked tight columns. On success the path is flipped.
  auto reroute = [&](std::size_t start, std::size_t target) {
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, start);
    bool found = false;
    while (!stack.empty() && !found) {
      std::size_t r = stack.back();
      stack.pop_back();
      for (std::size_t c : tight[r]) {
        if (blocked[c] || seen[c]) continue;
        seen[c] = 1;
        row_from[c] = r;
        if (c == target) {
          found = true;
          break;
        }
        stack.push_back(col_to_row[c]);
      }
    }
    if (!found) return false;
    for (std::size_t c = target;;) {
      std::size_t r = row_from[c];
      std::size_t prev = row_to_col[r];
      row_to_col[r] = c;
      col_to_row[c] = r;
      if (r == start) break;
      c = prev;
    }
    return true;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : tight[i]) {
      if (blocked[j]) continue;
      if (row_to_col[i] == j) break;
      std::size_t owner = col_to_row[j];
      std::size_t freed = row_to_col[i];
      blocked[j] = 1;
      if (reroute(owner, freed)) {
        row_to_col[i] = j;
        col_to_row[j] = i;
        break;
      }
      blocked[j] = 0;
    }
    blocked[row_to_col[i]] = 1;
  }
  return row_to_col;
}

}  // namespace

CostMatrix::CostMatrix(std::size_t size, std::vector<std::int64_t> values)
    : m(size), entries(std::move(values)) {
  if (entries.size() != m * m)
    throw Error(Errc::size_mismatch, "cost matrix is not square");
}

CostMatrix CostMatrix::transposed() const {
  CostMatrix t(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) t.at(j, i) = at(i, j);
  return t;
}

CostMatrix build_cost_matrix(const ClusterModel& img_model, const ClusterModel& txt_model,
                             const PrunedDataset& pruned) {
  if (img_model.k != txt_model.k)
    throw Error(Errc::size_mismatch, "image and text cluster counts differ (" +
                                         std::to_string(img_model.k) + " vs " +
                                         std::to_string(txt_model.k) + ")");
  const std::size_t kept = pruned.kept_pair_indices.size();
  if (img_model.assignments.size() != kept || txt_model.assignments.size() != kept)
    throw Error(Errc::precondition, "cluster assignments do not cover every kept pair");
  CostMatrix cost(img_model.k);
  for (std::size_t p = 0; p < kept; ++p) {
    std::size_t i = img_model.assignments[p], j = txt_model.assignments[p];
    if (i >= cost.m || j >= cost.m) throw Error(Errc::precondition, "assignment out of range");
    cost.at(i, j) -= 1;
  }
  return cost;
}

MatchResult solve_assignment(const CostMatrix& cost) {
  if (cost.entries.size() != cost.m * cost.m)
    throw Error(Errc::size_mismatch, "cost matrix is not square");
  if (cost.m == 0) return {};
  Duals duals = shortest_augmenting_path(cost);
  return make_result(cost, lexicographic_optimum(cost, std::move(duals)));
}

MatchResult brute_force_assignment(const CostMatrix& cost) {
  if (cost.entries.size() != cost.m * cost.m)
    throw Error(Errc::size_mismatch, "cost matrix is not square");
  if (cost.m > kBruteForceLimit)
    throw Error(Errc::too_large, "brute force limited to m <= " + std::to_string(kBruteForceLimit));
  std::vector<std::size_t> perm(cost.m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
  // next_permutation walks in lexicographic order; keep the first minimum.
  do {
    std::int64_t c = 0;
    for (std::size_t i = 0; i < cost.m; ++i) c += cost.at(i, perm[i]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return make_result(cost, std::move(best));
}

nlohmann::ordered_json to_json(const CostMatrix& cost) {
  nlohmann::ordered_json j;
  j["m"] = cost.m;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < cost.m; ++i) {
    std::vector<std::int64_t> row(cost.entries.begin() + static_cast<std::ptrdiff_t>(i * cost.m),
                                  cost.entries.begin() + static_cast<std::ptrdiff_t>((i + 1) * cost.m));
    rows.push_back(row);
  }
  j["entries"] = std::move(rows);
  return j;
}

nlohmann::ordered_json to_json(const MatchResult& match) {
  nlohmann::ordered_json j;
  j["permutation"] = match.permutation;
  j["total_cost"] = match.total_cost;
  j["shared_counts"] = match.shared_counts;
  return j;
}

CostMatrix cost_matrix_from_json(const nlohmann::json& j) {
  try {
    const auto& rows = j.at("entries");
    CostMatrix cost(rows.size());
    for (std::size_t i = 0; i < cost.m; ++i) {
      auto row = rows.at(i).get<std::vector<std::int64_t>>();
      if (row.size() != cost.m) throw Error(Errc::size_mismatch, "cost matrix is not square");
      std::copy(row.begin(), row.end(), cost.entries.begin() + static_cast<std::ptrdiff_t>(i * cost.m));
    }
    return cost;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_header, std::string("malformed cost matrix: ") + e.what());
  }
}

}  // namespace pds
