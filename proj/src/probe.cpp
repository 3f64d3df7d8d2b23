// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <json.hpp>

#include "pds/error.hpp"

namespace pds {

namespace {

// out (b x P) = x (b x D) * w (D x P)
DenseMatrix matmul(const DenseMatrix& x, const DenseMatrix& w) {
  DenseMatrix out(x.rows, w.cols);
  for (std::size_t r = 0; r < x.rows; ++r) {
    auto o = out.row(r);
    for (std::size_t k = 0; k < x.cols; ++k) {
      double a = x.at(r, k);
      if (a == 0.0) continue;
      auto wr = w.row(k);
      for (std::size_t c = 0; c < w.cols; ++c) o[c] += a * wr[c];
    }
  }
  return out;
}

// w -= lr * x^T g
void sgd_step(DenseMatrix& w, const DenseMatrix& x, const DenseMatrix& g, double lr) {
  for (std::size_t r = 0; r < x.rows; ++r) {
    auto gr = g.row(r);
    for (std::size_t k = 0; k < x.cols; ++k) {
      double a = lr * x.at(r, k);
      if (a == 0.0) continue;
      auto wr = w.row(k);
      for (std::size_t c = 0; c < w.cols; ++c) wr[c] -= a * gr[c];
    }
  }
}

std::vector<double> row_norms(const DenseMatrix& m) {
  std::vector<double> norms(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double s = 0.0;
    for (double v : m.row(r)) s += v * v;
    norms[r] = std::sqrt(s);
    if (norms[r] == 0.0) throw Error(Errc::zero_norm, "zero-norm projection row " + std::to_string(r));
  }
  return norms;
}

// Back-propagates through row normalization: g_x = (g - u (u.g)) / |x|.
DenseMatrix through_normalize(const DenseMatrix& unit, const DenseMatrix& grad_unit,
                              const std::vector<double>& norms) {
  DenseMatrix out(unit.rows, unit.cols);
  for (std::size_t r = 0; r < unit.rows; ++r) {
    double proj = 0.0;
    for (std::size_t c = 0; c < unit.cols; ++c) proj += unit.at(r, c) * grad_unit.at(r, c);
    for (std::size_t c = 0; c < unit.cols; ++c)
      out.at(r, c) = (grad_unit.at(r, c) - unit.at(r, c) * proj) / norms[r];
  }
  return out;
}

DenseMatrix gather_rows(const EmbeddingMatrix& m, std::span<const std::size_t> rows) {
  DenseMatrix out(rows.size(), m.dims());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

EmbeddingMatrix weights_to_emb(const DenseMatrix& w) {
  EmbeddingMatrix m(w.rows, w.cols);
  for (std::size_t i = 0; i < w.values.size(); ++i) m.data()[i] = static_cast<float>(w.values[i]);
  return m;
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from(const EmbeddingMatrix& m) {
  DenseMatrix out(m.rows(), m.dims());
  std::copy(m.data().begin(), m.data().end(), out.values.begin());
  return out;
}

void TrainConfig::validate() const {
  if (epochs == 0) throw Error(Errc::invalid_argument, "epochs must be >= 1");
  if (!(learning_rate >= 0.0)) throw Error(Errc::invalid_argument, "learning rate must be >= 0");
  if (!(temperature > 0.0)) throw Error(Errc::invalid_argument, "temperature must be > 0");
  if (projection_dims == 0) throw Error(Errc::invalid_argument, "projection dims must be >= 1");
}

InfoNceResult infonce_loss(const DenseMatrix& img_proj, const DenseMatrix& txt_proj,
                           double temperature) {
  const std::size_t n = img_proj.rows;
  if (n < 2) throw Error(Errc::precondition, "InfoNCE needs a batch of at least 2");
  if (txt_proj.rows != n || txt_proj.cols != img_proj.cols)
    throw Error(Errc::size_mismatch, "image and text projections differ in shape");
  if (!(temperature > 0.0)) throw Error(Errc::invalid_argument, "temperature must be > 0");
  const std::size_t p = img_proj.cols;

  auto img_norms = row_norms(img_proj);
  auto txt_norms = row_norms(txt_proj);
  DenseMatrix a(n, p), b(n, p);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      a.at(r, c) = img_proj.at(r, c) / img_norms[r];
      b.at(r, c) = txt_proj.at(r, c) / txt_norms[r];
    }

  DenseMatrix logits(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) s += a.at(i, c) * b.at(j, c);
      logits.at(i, j) = s / temperature;
    }

  // d loss / d logits = ((softmax_rows - I) + (softmax_cols - I)) / (2n)
  DenseMatrix g(n, n);
  double loss = 0.0;
  const double half_mean = 0.5 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = logits.at(i, 0);
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, logits.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(logits.at(i, j) - mx);
    loss += (mx + std::log(z) - logits.at(i, i)) * half_mean;
    for (std::size_t j = 0; j < n; ++j)
      g.at(i, j) += (std::exp(logits.at(i, j) - mx) / z - (i == j ? 1.0 : 0.0)) * half_mean;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double mx = logits.at(0, j);
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logits.at(i, j));
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp(logits.at(i, j) - mx);
    loss += (mx + std::log(z) - logits.at(j, j)) * half_mean;
    for (std::size_t i = 0; i < n; ++i)
      g.at(i, j) += (std::exp(logits.at(i, j) - mx) / z - (i == j ? 1.0 : 0.0)) * half_mean;
  }

  DenseMatrix ga(n, p), gb(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double w = g.at(i, j) / temperature;
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < p; ++c) {
        ga.at(i, c) += w * b.at(j, c);
        gb.at(j, c) += w * a.at(i, c);
      }
    }

  InfoNceResult result;
  result.loss = loss;
  result.grad_img = through_normalize(a, ga, img_norms);
  result.grad_txt = through_normalize(b, gb, txt_norms);
  return result;
}

ProbeModel init_probe(std::size_t input_dims, const TrainConfig& config) {
  config.validate();
  if (input_dims == 0) throw Error(Errc::invalid_argument, "input dims must be >= 1");
  ProbeModel model;
  model.temperature = config.temperature;
  model.w_img = DenseMatrix(input_dims, config.projection_dims);
  model.w_txt = DenseMatrix(input_dims, config.projection_dims);
  const double bound = 1.0 / std::sqrt(static_cast<double>(input_dims));
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> u(-bound, bound);
  for (double& v : model.w_img.values) v = u(rng);
  for (double& v : model.w_txt.values) v = u(rng);
  return model;
}

TrainResult train_probe(const EmbeddingMatrix& train_img, const EmbeddingMatrix& train_txt,
                        const TrainConfig& config) {
  return train_probe(train_img, train_txt, config, init_probe(train_img.dims(), config));
}

TrainResult train_probe(const EmbeddingMatrix& train_img, const EmbeddingMatrix& train_txt,
                        const TrainConfig& config, ProbeModel initial) {
  config.validate();
  const std::size_t n = train_img.rows();
  if (train_txt.rows() != n || train_txt.dims() != train_img.dims())
    throw Error(Errc::size_mismatch, "image and text training sets differ in shape");
  if (n < 2) throw Error(Errc::precondition, "probe training needs at least 2 pairs");
  if (initial.input_dims() != train_img.dims() || initial.w_txt.rows != train_img.dims() ||
      initial.w_txt.cols != initial.w_img.cols)
    throw Error(Errc::size_mismatch, "initial weights do not fit the embedding dims");

  TrainResult result;
  result.model = std::move(initial);
  result.model.temperature = config.temperature;
  ProbeModel& model = result.model;
  const std::size_t batch = std::min(n, config.batch_size == 0 ? std::size_t{64} : config.batch_size);
  if (batch < 2) throw Error(Errc::invalid_argument, "batch size must be >= 2");

  // Shuffling draws from a stream separate from the init stream.
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n;) {
      std::size_t end = std::min(n, start + batch);
      if (n - end == 1) end = n;  // a trailing singleton joins this batch
      std::span<const std::size_t> rows(order.data() + start, end - start);
      DenseMatrix x = gather_rows(train_img, rows);
      DenseMatrix y = gather_rows(train_txt, rows);
      auto step = infonce_loss(matmul(x, model.w_img), matmul(y, model.w_txt), config.temperature);
      if (config.learning_rate > 0.0) {
        sgd_step(model.w_img, x, step.grad_img, config.learning_rate);
        sgd_step(model.w_txt, y, step.grad_txt, config.learning_rate);
      }
      total += step.loss;
      ++batches;
      start = end;
    }
    result.loss_trace.push_back(total / static_cast<double>(batches));
  }
  return result;
}

EmbeddingMatrix project(const ProbeModel& model, const EmbeddingMatrix& emb, Tower tower) {
  const DenseMatrix& w = tower == Tower::image ? model.w_img : model.w_txt;
  if (emb.dims() != w.rows)
    throw Error(Errc::size_mismatch, "embedding dims " + std::to_string(emb.dims()) +
                                         " do not match projection input " + std::to_string(w.rows));
  DenseMatrix out = matmul(DenseMatrix::from(emb), w);
  auto norms = row_norms(out);
  std::vector<float> data(out.values.size());
  for (std::size_t r = 0; r < out.rows; ++r)
    for (std::size_t c = 0; c < out.cols; ++c)
      data[r * out.cols + c] = static_cast<float>(out.at(r, c) / norms[r]);
  return EmbeddingMatrix(out.rows, out.cols, std::move(data), emb.ids());
}

void write_probe_model(const ProbeModel& model, const std::filesystem::path& stem) {
  write_embeddings(weights_to_emb(model.w_img), std::filesystem::path(stem).concat(".img.emb"));
  write_embeddings(weights_to_emb(model.w_txt), std::filesystem::path(stem).concat(".txt.emb"));
  nlohmann::ordered_json side;
  side["temperature"] = model.temperature;
  side["input_dims"] = model.input_dims();
  side["projection_dims"] = model.projection_dims();
  write_file(std::filesystem::path(stem).concat(".json"), side.dump(2) + "\n");
}

ProbeModel read_probe_model(const std::filesystem::path& stem) {
  ProbeModel model;
  model.w_img = DenseMatrix::from(read_embeddings(std::filesystem::path(stem).concat(".img.emb")));
  model.w_txt = DenseMatrix::from(read_embeddings(std::filesystem::path(stem).concat(".txt.emb")));
  try {
    auto side = nlohmann::json::parse(read_file(std::filesystem::path(stem).concat(".json")));
    model.temperature = side.at("temperature").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_header, std::string("malformed probe sidecar: ") + e.what());
  }
  if (model.w_img.rows != model.w_txt.rows || model.w_img.cols != model.w_txt.cols)
    throw Error(Errc::shape_mismatch, "probe weight matrices differ in shape");
  return model;
}

}  // namespace pds
