// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "pds/error.hpp"
#include "pds/parallel.hpp"

namespace pds {

namespace {

// Centroids held in double while iterating.
struct Centers {
  std::size_t k = 0;
  std::size_t dims = 0;
  std::vector<double> values;

  std::span<double> row(std::size_t c) { return {values.data() + c * dims, dims}; }
  std::span<const double> row(std::size_t c) const { return {values.data() + c * dims, dims}; }

  void set(std::size_t c, std::span<const float> x) {
    std::copy(x.begin(), x.end(), row(c).begin());
  }
};

double sq_dist(std::span<const float> x, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - c[i];
    s += d * d;
  }
  return s;
}

struct Assignment {
  std::vector<std::uint32_t> labels;
  std::vector<double> dist;
  double inertia = 0.0;
};

Assignment assign_all(const EmbeddingMatrix& points, const Centers& centers) {
  Assignment a;
  a.labels.resize(points.rows());
  a.dist.resize(points.rows());
  parallel_for(points.rows(), [&](std::size_t n) {
    auto x = points.row(n);
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = 0;
    for (std::size_t c = 0; c < centers.k; ++c) {
      double d = sq_dist(x, centers.row(c));
      if (d < best) {
        best = d;
        arg = static_cast<std::uint32_t>(c);
      }
    }
    a.labels[n] = arg;
    a.dist[n] = best;
  });
  // Sequential sum keeps the total independent of the thread count.
  for (double d : a.dist) a.inertia += d;
  return a;
}

void check_inputs(const EmbeddingMatrix& points, const ClusterConfig& config) {
  config.validate();
  if (points.rows() < config.k)
    throw Error(Errc::precondition, "cannot form " + std::to_string(config.k) + " clusters from " +
                                        std::to_string(points.rows()) + " points");
}

Centers initial_centers(const EmbeddingMatrix& points, const ClusterConfig& config,
                        std::mt19937_64& rng) {
  const std::size_t n = points.rows();
  Centers centers{config.k, points.dims(), std::vector<double>(config.k * points.dims())};

  if (config.init == ClusterInit::random_points) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t c = 0; c < config.k; ++c) {
      std::uniform_int_distribution<std::size_t> pick(c, n - 1);
      std::swap(idx[c], idx[pick(rng)]);
      centers.set(c, points.row(idx[c]));
    }
    return centers;
  }

  // Greedy k-means++: each center is the best of 2 + floor(ln k) D^2 draws.
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  centers.set(0, points.row(first(rng)));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points.row(i), centers.row(0));
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(config.k)));

  auto draw = [&](double total) {
    if (total <= 0.0) return first(rng);
    std::uniform_real_distribution<double> u(0.0, total);
    const double target = u(rng);
    double acc = 0.0;
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      chosen = i;
      acc += d2[i];
      if (acc > target) break;
    }
    return chosen;
  };

  std::vector<double> trial_d2(n), best_d2(n);
  for (std::size_t c = 1; c < config.k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t chosen = n;
    double best_potential = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t candidate = draw(total);
      auto x = points.row(candidate);
      parallel_for(n, [&](std::size_t i) {
        const auto p = points.row(i);
        double s = 0.0;
        for (std::size_t d = 0; d < p.size(); ++d) {
          const double diff = static_cast<double>(p[d]) - static_cast<double>(x[d]);
          s += diff * diff;
        }
        trial_d2[i] = std::min(d2[i], s);
      });
      double potential = 0.0;
      for (double v : trial_d2) potential += v;
      if (chosen == n || potential < best_potential) {
        chosen = candidate;
        best_potential = potential;
        best_d2.swap(trial_d2);
      }
    }
    centers.set(c, points.row(chosen));
    d2.swap(best_d2);
  }
  return centers;
}

EmbeddingMatrix to_float(const Centers& centers) {
  EmbeddingMatrix m(centers.k, centers.dims);
  for (std::size_t i = 0; i < centers.values.size(); ++i)
    m.data()[i] = static_cast<float>(centers.values[i]);
  return m;
}

Centers to_double(const EmbeddingMatrix& m) {
  Centers c{m.rows(), m.dims(), std::vector<double>(m.data().begin(), m.data().end())};
  return c;
}

// Moves each empty cluster onto the point farthest from its centroid and
// reassigns until no cluster is empty or nothing can move.
void repair_empty(const EmbeddingMatrix& points, Centers& centers, Assignment& a) {
  for (std::size_t round = 0; round < centers.k; ++round) {
    std::vector<std::size_t> counts(centers.k, 0);
    for (auto l : a.labels) ++counts[l];
    bool moved = false;
    std::vector<bool> taken(points.rows(), false);
    for (std::size_t c = 0; c < centers.k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = points.rows();
      double best = 0.0;
      for (std::size_t i = 0; i < points.rows(); ++i) {
        if (!taken[i] && a.dist[i] > best) {
          best = a.dist[i];
          far = i;
        }
      }
      if (far == points.rows()) continue;
      taken[far] = true;
      centers.set(c, points.row(far));
      moved = true;
    }
    if (!moved) return;
    a = assign_all(points, centers);
  }
}

ClusterModel finish(const EmbeddingMatrix& points, Centers centers, const ClusterConfig& config) {
  // Round to float first so the stored centroids reproduce the stored labels.
  EmbeddingMatrix stored = to_float(centers);
  centers = to_double(stored);
  Assignment a = assign_all(points, centers);
  repair_empty(points, centers, a);
  stored = to_float(centers);

  ClusterModel model;
  model.k = config.k;
  model.centroids = std::move(stored);
  model.assignments = std::move(a.labels);
  model.counts.assign(config.k, 0);
  for (auto l : model.assignments) ++model.counts[l];
  model.inertia = a.inertia;
  model.seed = config.seed;
  return model;
}

}  // namespace

std::string to_string(ClusterMode mode) { return mode == ClusterMode::joint ? "joint" : "separate"; }

std::string to_string(ClusterInit init) {
  return init == ClusterInit::random_points ? "random-points" : "kmeans++";
}

ClusterMode parse_cluster_mode(const std::string& s) {
  if (s == "separate") return ClusterMode::separate;
  if (s == "joint") return ClusterMode::joint;
  throw Error(Errc::invalid_argument, "unknown cluster mode '" + s + "'");
}

ClusterInit parse_cluster_init(const std::string& s) {
  if (s == "kmeans++") return ClusterInit::kmeans_plus_plus;
  if (s == "random-points") return ClusterInit::random_points;
  throw Error(Errc::invalid_argument, "unknown init '" + s + "'");
}

void ClusterConfig::validate() const {
  if (k == 0) throw Error(Errc::invalid_argument, "k must be >= 1");
  if (max_iters == 0) throw Error(Errc::invalid_argument, "max_iters must be >= 1");
}

std::vector<std::uint32_t> nearest_centroids(const EmbeddingMatrix& points,
                                             const EmbeddingMatrix& centroids,
                                             std::vector<double>* squared_distances) {
  if (points.dims() != centroids.dims())
    throw Error(Errc::size_mismatch, "points and centroids differ in dimension");
  Assignment a = assign_all(points, to_double(centroids));
  if (squared_distances) *squared_distances = std::move(a.dist);
  return std::move(a.labels);
}

ClusterModel minibatch_kmeans(const EmbeddingMatrix& points, const ClusterConfig& config) {
  check_inputs(points, config);
  const std::size_t n = points.rows();
  const std::size_t dims = points.dims();
  const std::size_t batch = config.batch_size == 0 ? std::min<std::size_t>(1024, n) : config.batch_size;

  std::mt19937_64 rng(config.seed);
  Centers centers = initial_centers(points, config, rng);
  std::vector<std::size_t> per_center(config.k, 0);
  std::uniform_int_distribution<std::size_t> sample(0, n - 1);
  std::vector<std::size_t> picked(batch);
  std::vector<std::uint32_t> nearest(batch);

  for (std::size_t it = 0; it < config.max_iters; ++it) {
    for (auto& p : picked) p = sample(rng);
    // Nearest centers are cached for the whole batch before any update.
    parallel_for(batch, [&](std::size_t b) {
      auto x = points.row(picked[b]);
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t c = 0; c < config.k; ++c) {
        double d = sq_dist(x, centers.row(c));
        if (d < best) {
          best = d;
          arg = static_cast<std::uint32_t>(c);
        }
      }
      nearest[b] = arg;
    });
    for (std::size_t b = 0; b < batch; ++b) {
      std::size_t c = nearest[b];
      double eta = 1.0 / static_cast<double>(++per_center[c]);
      auto x = points.row(picked[b]);
      auto center = centers.row(c);
      for (std::size_t d = 0; d < dims; ++d) center[d] = (1.0 - eta) * center[d] + eta * x[d];
    }
  }
  ClusterModel model = finish(points, std::move(centers), config);
  model.iterations = config.max_iters;
  return model;
}

ClusterModel lloyd_kmeans(const EmbeddingMatrix& points, const ClusterConfig& config) {
  check_inputs(points, config);
  const std::size_t n = points.rows();
  const std::size_t dims = points.dims();

  std::mt19937_64 rng(config.seed);
  Centers centers = initial_centers(points, config, rng);
  std::vector<double> trace;
  std::vector<std::uint32_t> previous;
  std::size_t updates = 0;

  for (std::size_t it = 0;; ++it) {
    Assignment a = assign_all(points, centers);
    trace.push_back(a.inertia);
    if ((it > 0 && a.labels == previous) || updates == config.max_iters) break;

    std::vector<double> sums(config.k * dims, 0.0);
    std::vector<std::size_t> counts(config.k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t c = a.labels[i];
      ++counts[c];
      auto x = points.row(i);
      for (std::size_t d = 0; d < dims; ++d) sums[c * dims + d] += x[d];
    }
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < config.k; ++c) {
      if (counts[c] > 0) {
        for (std::size_t d = 0; d < dims; ++d)
          centers.values[c * dims + d] = sums[c * dims + d] / static_cast<double>(counts[c]);
        continue;
      }
      std::size_t far = n;
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && a.dist[i] > best) {
          best = a.dist[i];
          far = i;
        }
      }
      if (far < n) {
        taken[far] = true;
        centers.set(c, points.row(far));
      }
    }
    previous = std::move(a.labels);
    ++updates;
  }

  ClusterModel model = finish(points, std::move(centers), config);
  model.inertia_trace = std::move(trace);
  model.iterations = updates;
  return model;
}

std::pair<ClusterModel, ClusterModel> cluster_modalities(const EmbeddingMatrix& img,
                                                         const EmbeddingMatrix& txt,
                                                         std::span<const PairRows> pair_rows,
                                                         const PrunedDataset& pruned,
                                                         const ClusterConfig& config) {
  if (img.dims() != txt.dims())
    throw Error(Errc::size_mismatch, "image and text embeddings differ in dimension");
  std::vector<std::size_t> img_rows, txt_rows;
  img_rows.reserve(pruned.kept_pair_indices.size());
  txt_rows.reserve(pruned.kept_pair_indices.size());
  for (std::size_t p : pruned.kept_pair_indices) {
    if (p >= pair_rows.size()) throw Error(Errc::invalid_argument, "kept pair index out of range");
    img_rows.push_back(pair_rows[p].image_row);
    txt_rows.push_back(pair_rows[p].caption_row);
  }
  EmbeddingMatrix img_points = img.gather(img_rows);
  EmbeddingMatrix txt_points = txt.gather(txt_rows);

  if (config.mode == ClusterMode::separate) {
    ClusterConfig txt_config = config;
    txt_config.seed = config.seed + 1;
    return {minibatch_kmeans(img_points, config), minibatch_kmeans(txt_points, txt_config)};
  }

  const std::size_t n = img_points.rows();
  const std::size_t dims = img.dims();
  const double scale = 1.0 / std::sqrt(2.0);
  EmbeddingMatrix joint(n, 2 * dims);
  for (std::size_t i = 0; i < n; ++i) {
    auto out = joint.row(i);
    auto a = img_points.row(i);
    auto b = txt_points.row(i);
    for (std::size_t d = 0; d < dims; ++d) {
      out[d] = static_cast<float>(a[d] * scale);
      out[dims + d] = static_cast<float>(b[d] * scale);
    }
  }
  ClusterModel joint_model = minibatch_kmeans(joint, config);

  auto per_modality = [&](const EmbeddingMatrix& points, std::size_t offset) {
    ClusterModel m;
    m.k = joint_model.k;
    m.assignments = joint_model.assignments;
    m.counts = joint_model.counts;
    m.seed = joint_model.seed;
    m.iterations = joint_model.iterations;
    std::vector<double> sums(m.k * dims, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto x = points.row(i);
      for (std::size_t d = 0; d < dims; ++d) sums[m.assignments[i] * dims + d] += x[d];
    }
    m.centroids = EmbeddingMatrix(m.k, dims);
    for (std::size_t c = 0; c < m.k; ++c) {
      for (std::size_t d = 0; d < dims; ++d) {
        m.centroids.at(c, d) =
            m.counts[c] > 0
                ? static_cast<float>(sums[c * dims + d] / static_cast<double>(m.counts[c]))
                : static_cast<float>(joint_model.centroids.at(c, offset + d) / scale);
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      m.inertia += squared_distance(points.row(i), m.centroids.row(m.assignments[i]));
    return m;
  };
  return {per_modality(img_points, 0), per_modality(txt_points, dims)};
}

void write_cluster_model(const ClusterModel& model, const std::filesystem::path& stem) {
  write_embeddings(model.centroids, std::filesystem::path(stem).concat(".emb"));
  nlohmann::ordered_json side;
  side["k"] = model.k;
  side["assignments"] = model.assignments;
  side["counts"] = model.counts;
  side["inertia"] = model.inertia;
  side["seed"] = model.seed;
  side["iterations"] = model.iterations;
  if (!model.inertia_trace.empty()) side["inertia_trace"] = model.inertia_trace;
  write_file(std::filesystem::path(stem).concat(".json"), side.dump(2) + "\n");
}

ClusterModel read_cluster_model(const std::filesystem::path& stem) {
  ClusterModel model;
  model.centroids = read_embeddings(std::filesystem::path(stem).concat(".emb"));
  try {
    auto side = nlohmann::json::parse(read_file(std::filesystem::path(stem).concat(".json")));
    model.k = side.at("k").get<std::size_t>();
    model.assignments = side.at("assignments").get<std::vector<std::uint32_t>>();
    model.counts = side.at("counts").get<std::vector<std::size_t>>();
    model.inertia = side.at("inertia").get<double>();
    model.seed = side.at("seed").get<std::uint64_t>();
    model.iterations = side.value("iterations", std::size_t{0});
    if (side.contains("inertia_trace"))
      model.inertia_trace = side.at("inertia_trace").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_header, std::string("malformed cluster sidecar: ") + e.what());
  }
  if (model.k != model.centroids.rows() || model.counts.size() != model.k)
    throw Error(Errc::shape_mismatch, "cluster sidecar disagrees with centroid file");
  return model;
}

}  // namespace pds
