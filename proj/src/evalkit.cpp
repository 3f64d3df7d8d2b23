// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "pds/error.hpp"
#include "pds/parallel.hpp"
#include "pds/preprocess.hpp"

namespace pds {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

RecallCurve recall_at_k(const EmbeddingMatrix& query, const EmbeddingMatrix& gallery,
                        const std::vector<std::vector<std::size_t>>& ground_truth,
                        std::span<const std::size_t> ks) {
  if (gallery.empty()) throw Error(Errc::empty_input, "empty gallery");
  if (query.dims() != gallery.dims()) throw Error(Errc::size_mismatch, "query and gallery dims differ");
  if (ground_truth.size() != query.rows())
    throw Error(Errc::size_mismatch, "one ground-truth set per query required");
  if (ks.empty()) throw Error(Errc::invalid_argument, "no k values");
  std::size_t k_max = 0;
  for (std::size_t k : ks) {
    if (k == 0) throw Error(Errc::invalid_argument, "k must be >= 1");
    if (k > gallery.rows())
      throw Error(Errc::invalid_argument, "k=" + std::to_string(k) + " exceeds gallery size " +
                                              std::to_string(gallery.rows()));
    k_max = std::max(k_max, k);
  }
  for (std::size_t q = 0; q < ground_truth.size(); ++q) {
    if (ground_truth[q].empty())
      throw Error(Errc::precondition, "query " + std::to_string(q) + " has no ground truth");
    for (std::size_t g : ground_truth[q])
      if (g >= gallery.rows()) throw Error(Errc::invalid_argument, "ground truth outside gallery");
  }

  // first_hit[q]: rank of the best ground-truth item within the top k_max,
  // or k_max when none made it.
  std::vector<std::size_t> first_hit(query.rows(), k_max);
  parallel_for(query.rows(), [&](std::size_t q) {
    std::vector<double> scores(gallery.rows());
    for (std::size_t g = 0; g < gallery.rows(); ++g) scores[g] = dot(query.row(q), gallery.row(g));
    std::vector<std::size_t> order(gallery.rows());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_max), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                      });
    const auto& truth = ground_truth[q];
    for (std::size_t rank = 0; rank < k_max; ++rank) {
      if (std::find(truth.begin(), truth.end(), order[rank]) != truth.end()) {
        first_hit[q] = rank;
        break;
      }
    }
  });

  RecallCurve curve;
  curve.n_queries = query.rows();
  for (std::size_t k : ks) {
    std::size_t hits = 0;
    for (std::size_t r : first_hit) hits += r < k ? 1 : 0;
    curve.at[k] = query.rows() == 0 ? 0.0
                                    : static_cast<double>(hits) / static_cast<double>(query.rows());
  }
  return curve;
}

std::vector<std::size_t> rare_subset(const EmbeddingMatrix& test, const EmbeddingMatrix& train,
                                     std::size_t r) {
  if (r > test.rows())
    throw Error(Errc::invalid_argument, "rare subset size " + std::to_string(r) + " exceeds " +
                                            std::to_string(test.rows()) + " test rows");
  if (train.empty()) throw Error(Errc::empty_input, "empty training set for the rare-sample mean");
  if (train.dims() != test.dims()) throw Error(Errc::size_mismatch, "train and test dims differ");
  std::vector<float> mean(train.dims());
  {
    std::vector<double> acc(train.dims(), 0.0);
    for (std::size_t i = 0; i < train.rows(); ++i) {
      auto x = train.row(i);
      for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += x[d];
    }
    for (std::size_t d = 0; d < acc.size(); ++d)
      mean[d] = static_cast<float>(acc[d] / static_cast<double>(train.rows()));
  }
  std::vector<double> dist(test.rows());
  for (std::size_t i = 0; i < test.rows(); ++i) dist[i] = squared_distance(test.row(i), mean);
  std::vector<std::size_t> order(test.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
  order.resize(r);
  std::sort(order.begin(), order.end());
  return order;
}

TestSet TestSet::from_pairs(const EmbeddingMatrix& img, const EmbeddingMatrix& txt,
                            const PairTable& pairs) {
  auto rows = resolve_pairs(pairs, img, txt);
  TestSet set;
  set.images = l2_normalize(img);
  std::vector<std::size_t> caption_rows;
  std::vector<char> seen(txt.rows(), 0);
  for (const auto& r : rows) {
    if (seen[r.caption_row])
      throw Error(Errc::duplicate_id, "caption '" + txt.ids()[r.caption_row] + "' paired twice");
    seen[r.caption_row] = 1;
    caption_rows.push_back(r.caption_row);
    set.caption_image.push_back(r.image_row);
  }
  set.captions = l2_normalize(txt.gather(caption_rows));
  return set;
}

RetrievalReport evaluate_probe(const ProbeModel& model, const TestSet& test,
                               const EvalOptions& options) {
  if (test.captions.rows() != test.caption_image.size())
    throw Error(Errc::size_mismatch, "test captions and caption->image map disagree");
  EmbeddingMatrix images = project(model, test.images, Tower::image);
  EmbeddingMatrix captions = project(model, test.captions, Tower::text);

  std::vector<std::size_t> query_images;
  if (options.query_images) {
    query_images = *options.query_images;
  } else {
    query_images.resize(test.images.rows());
    std::iota(query_images.begin(), query_images.end(), 0);
  }
  std::vector<char> is_query(test.images.rows(), 0);
  for (std::size_t i : query_images) {
    if (i >= test.images.rows()) throw Error(Errc::invalid_argument, "query image out of range");
    is_query[i] = 1;
  }

  std::vector<std::vector<std::size_t>> captions_of(test.images.rows());
  for (std::size_t c = 0; c < test.caption_image.size(); ++c)
    captions_of[test.caption_image[c]].push_back(c);

  // Image -> text: every caption of the image counts as a hit.
  std::vector<std::size_t> tr_rows;
  std::vector<std::vector<std::size_t>> tr_truth;
  for (std::size_t i : query_images) {
    if (captions_of[i].empty()) continue;
    tr_rows.push_back(i);
    tr_truth.push_back(captions_of[i]);
  }
  // Text -> image: the single paired image.
  std::vector<std::size_t> ir_rows;
  std::vector<std::vector<std::size_t>> ir_truth;
  for (std::size_t c = 0; c < test.caption_image.size(); ++c) {
    if (!is_query[test.caption_image[c]]) continue;
    ir_rows.push_back(c);
    ir_truth.push_back({test.caption_image[c]});
  }
  if (tr_rows.empty() || ir_rows.empty()) throw Error(Errc::empty_input, "no evaluation queries");

  auto tr = recall_at_k(images.gather(tr_rows), captions, tr_truth, options.ks);
  auto ir = recall_at_k(captions.gather(ir_rows), images, ir_truth, options.ks);

  RetrievalReport report;
  report.method = options.method;
  report.subset = options.subset;
  report.ks = options.ks;
  report.ir_at = std::move(ir.at);
  report.tr_at = std::move(tr.at);
  report.n_ir_queries = ir.n_queries;
  report.n_tr_queries = tr.n_queries;
  return report;
}

RetrievalReport evaluate_distilled(const EmbeddingMatrix& train_img, const EmbeddingMatrix& train_txt,
                                   const TrainConfig& probe, const TestSet& test,
                                   const EvalOptions& options) {
  TrainResult trained = train_probe(l2_normalize(train_img), l2_normalize(train_txt), probe);
  RetrievalReport report = evaluate_probe(trained.model, test, options);
  report.train_pairs = train_img.rows();
  report.loss_trace = std::move(trained.loss_trace);
  return report;
}

nlohmann::ordered_json to_json(const RetrievalReport& report) {
  auto curve = [](const std::map<std::size_t, double>& at) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : at) j[std::to_string(k)] = v;
    return j;
  };
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["ir_at"] = curve(report.ir_at);
  j["tr_at"] = curve(report.tr_at);
  j["n_queries"] = {{"ir", report.n_ir_queries}, {"tr", report.n_tr_queries}};
  j["config"] = {{"ks", report.ks}, {"subset", report.subset}, {"train_pairs", report.train_pairs}};
  if (!report.loss_trace.empty()) j["final_loss"] = report.loss_trace.back();
  return j;
}

std::string csv_header(std::span<const std::size_t> ks) {
  std::ostringstream out;
  out << "method,subset,train_pairs";
  for (std::size_t k : ks) out << ",ir@" << k;
  for (std::size_t k : ks) out << ",tr@" << k;
  return out.str();
}

std::string csv_row(const RetrievalReport& report) {
  std::ostringstream out;
  out << report.method << ',' << report.subset << ',' << report.train_pairs;
  for (std::size_t k : report.ks) out << ',' << format_double(report.ir_at.at(k));
  for (std::size_t k : report.ks) out << ',' << format_double(report.tr_at.at(k));
  return out.str();
}

}  // namespace pds
