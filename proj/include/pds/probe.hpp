// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

// Linear contrastive probe: one projection per tower trained with the
// symmetric InfoNCE loss on frozen embedding pairs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pds/tensor_io.hpp"

namespace pds {

/// Row-major double matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from(const EmbeddingMatrix& m);
};

enum class Tower { image, text };

struct ProbeModel {
  DenseMatrix w_img;  // D x P
  DenseMatrix w_txt;  // D x P
  double temperature = 0.07;

  std::size_t input_dims() const { return w_img.rows; }
  std::size_t projection_dims() const { return w_img.cols; }
};

struct TrainConfig {
  std::size_t epochs = 100;
  /// 0 selects min(64, N).
  std::size_t batch_size = 0;
  double learning_rate = 0.01;
  double temperature = 0.07;
  std::uint64_t seed = 0;
  std::size_t projection_dims = 64;

  void validate() const;
};

struct InfoNceResult {
  double loss = 0.0;
  DenseMatrix grad_img;  // d loss / d img_proj
  DenseMatrix grad_txt;  // d loss / d txt_proj
};

/// Symmetric InfoNCE over a batch of projected pairs. Rows are L2-normalized
/// internally; logits are cosine / temperature; the loss is the mean of the
/// image->text and text->image cross-entropies. Gradients are with respect
/// to the unnormalized inputs.
InfoNceResult infonce_loss(const DenseMatrix& img_proj, const DenseMatrix& txt_proj,
                           double temperature);

struct TrainResult {
  ProbeModel model;
  std::vector<double> loss_trace;  // mean batch loss per epoch
};

/// Seeded uniform init in [-1/sqrt(D), 1/sqrt(D)].
ProbeModel init_probe(std::size_t input_dims, const TrainConfig& config);

/// Mini-batch SGD over matched rows of train_img / train_txt.
TrainResult train_probe(const EmbeddingMatrix& train_img, const EmbeddingMatrix& train_txt,
                        const TrainConfig& config);
/// Same, starting from the given weights.
TrainResult train_probe(const EmbeddingMatrix& train_img, const EmbeddingMatrix& train_txt,
                        const TrainConfig& config, ProbeModel initial);

/// emb * W for the given tower, rows L2-normalized.
EmbeddingMatrix project(const ProbeModel& model, const EmbeddingMatrix& emb, Tower tower);

/// <stem>.img.emb, <stem>.txt.emb and <stem>.json (temperature, dims).
void write_probe_model(const ProbeModel& model, const std::filesystem::path& stem);
ProbeModel read_probe_model(const std::filesystem::path& stem);

}  // namespace pds
