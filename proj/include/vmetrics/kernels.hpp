// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vmetrics/types.hpp"

namespace vmetrics {

// Dense row-major matrix of doubles for the reference kernels.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    double &at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    bool finite() const;
};

Matrix matmul(const Matrix &a, const Matrix &b);
Matrix transpose(const Matrix &m);

// Numerically-stable row softmax (max subtraction per row).
Matrix row_softmax(const Matrix &logits);

// Body-token sampler attention: K = D W_K, V = D W_V,
// A = rowsoftmax(Q K^T / sqrt(f_em)), output = A V.
Matrix sampler_attention(const Matrix &tokens, const Matrix &w_key,
                         const Matrix &w_value, const Matrix &query);

// Facial cross-attention of one global query against local features:
// rowsoftmax(q K_local^T / sqrt(f_em)) V_local.
Matrix facial_attention(const Matrix &q_global, const Matrix &k_local,
                        const Matrix &v_local);

// Mask-weighted noise-prediction loss:
// mean(((eps-pred)*(1-m))^2) + lambda * mean(((eps-pred)*m)^2),
// both terms averaged over all elements.
double masked_loss(const std::vector<double> &eps,
                   const std::vector<double> &pred,
                   const std::vector<uint8_t> &mask, double lambda);

// Analytic dL/dpred = -(2/N)(eps-pred)*((1-m) + lambda*m).
std::vector<double> masked_loss_grad(const std::vector<double> &eps,
                                     const std::vector<double> &pred,
                                     const std::vector<uint8_t> &mask,
                                     double lambda);

enum class LayoutMode { strict, causal };

// Flattened sequence length of latent frames plus ID tokens:
// latent_frames * h * w + id_tokens, with latent_frames = L/k (strict)
// or 1 + (L-1)/k (causal).
long token_layout(int frames, int temporal_kernel, int latent_h, int latent_w,
                  int id_tokens, LayoutMode mode);

// Plain-text matrix format: "# rows cols" header, then rows of
// whitespace-separated values.
Matrix load_matrix_text(const std::string &text);
std::string save_matrix_text(const Matrix &m);

} // namespace vmetrics
