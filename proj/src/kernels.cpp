// SPDX-License-Identifier: Apache-2.0
#include "vmetrics/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace vmetrics {

bool Matrix::finite() const {
    return std::all_of(data.begin(), data.end(),
                       [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix &a, const Matrix &b) {
    if (a.cols != b.rows)
        throw ValidationError("matmul: inner dimension mismatch (" +
                              std::to_string(a.cols) + " vs " +
                              std::to_string(b.rows) + ")");
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            double aik = a.at(i, k);
            for (int j = 0; j < b.cols; ++j)
                out.at(i, j) += aik * b.at(k, j);
        }
    return out;
}

Matrix transpose(const Matrix &m) {
    Matrix out(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) out.at(j, i) = m.at(i, j);
    return out;
}

Matrix row_softmax(const Matrix &logits) {
    Matrix out(logits.rows, logits.cols);
    for (int i = 0; i < logits.rows; ++i) {
        double mx = logits.at(i, 0);
        for (int j = 1; j < logits.cols; ++j) mx = std::max(mx, logits.at(i, j));
        double sum = 0.0;
        for (int j = 0; j < logits.cols; ++j) {
            out.at(i, j) = std::exp(logits.at(i, j) - mx);
            sum += out.at(i, j);
        }
        for (int j = 0; j < logits.cols; ++j) out.at(i, j) /= sum;
    }
    return out;
}

namespace {

Matrix scaled_attention(const Matrix &query, const Matrix &key,
                        const Matrix &value) {
    if (key.rows != value.rows)
        throw ValidationError("attention: key/value row count mismatch");
    if (query.cols != key.cols || key.cols != value.cols)
        throw ValidationError("attention: feature dimension mismatch");
    Matrix logits = matmul(query, transpose(key));
    double scale = 1.0 / std::sqrt(static_cast<double>(query.cols));
    for (auto &v : logits.data) v *= scale;
    return matmul(row_softmax(logits), value);
}

} // namespace

Matrix sampler_attention(const Matrix &tokens, const Matrix &w_key,
                         const Matrix &w_value, const Matrix &query) {
    if (!tokens.finite() || !w_key.finite() || !w_value.finite() ||
        !query.finite())
        throw ValidationError("sampler_attention: non-finite input");
    if (query.rows < 1)
        throw ValidationError("sampler_attention: need at least one query token");
    Matrix key = matmul(tokens, w_key);
    Matrix value = matmul(tokens, w_value);
    return scaled_attention(query, key, value);
}

Matrix facial_attention(const Matrix &q_global, const Matrix &k_local,
                        const Matrix &v_local) {
    if (!q_global.finite() || !k_local.finite() || !v_local.finite())
        throw ValidationError("facial_attention: non-finite input");
    if (k_local.rows < 1)
        throw ValidationError("facial_attention: need at least one local token");
    return scaled_attention(q_global, k_local, v_local);
}

namespace {

void check_loss_inputs(const std::vector<double> &eps,
                       const std::vector<double> &pred,
                       const std::vector<uint8_t> &mask, double lambda) {
    if (eps.size() != pred.size() || eps.size() != mask.size())
        throw ValidationError("masked_loss: shape mismatch");
    if (eps.empty())
        throw ValidationError("masked_loss: empty tensors");
    if (lambda < 1.0)
        throw ValidationError("masked_loss: lambda must be >= 1");
    for (uint8_t m : mask)
        if (m != 0 && m != 1)
            throw ValidationError("masked_loss: mask must be binary");
}

} // namespace

double masked_loss(const std::vector<double> &eps,
                   const std::vector<double> &pred,
                   const std::vector<uint8_t> &mask, double lambda) {
    check_loss_inputs(eps, pred, mask, lambda);
    double bg = 0.0, fg = 0.0;
    for (size_t i = 0; i < eps.size(); ++i) {
        double d = eps[i] - pred[i];
        if (mask[i])
            fg += d * d;
        else
            bg += d * d;
    }
    double n = static_cast<double>(eps.size());
    return bg / n + lambda * fg / n;
}

std::vector<double> masked_loss_grad(const std::vector<double> &eps,
                                     const std::vector<double> &pred,
                                     const std::vector<uint8_t> &mask,
                                     double lambda) {
    check_loss_inputs(eps, pred, mask, lambda);
    double n = static_cast<double>(eps.size());
    std::vector<double> grad(eps.size());
    for (size_t i = 0; i < eps.size(); ++i) {
        double weight = mask[i] ? lambda : 1.0;
        grad[i] = -(2.0 / n) * (eps[i] - pred[i]) * weight;
    }
    return grad;
}

long token_layout(int frames, int temporal_kernel, int latent_h, int latent_w,
                  int id_tokens, LayoutMode mode) {
    if (frames < 1 || temporal_kernel < 1 || latent_h < 1 || latent_w < 1 ||
        id_tokens < 0)
        throw ValidationError("token_layout: invalid arguments");
    long latent_frames;
    if (mode == LayoutMode::strict) {
        if (frames % temporal_kernel != 0)
            throw ValidationError("token_layout: strict mode requires k | L");
        latent_frames = frames / temporal_kernel;
    } else {
        if ((frames - 1) % temporal_kernel != 0)
            throw ValidationError("token_layout: causal mode requires k | (L-1)");
        latent_frames = 1 + (frames - 1) / temporal_kernel;
    }
    return latent_frames * latent_h * latent_w + id_tokens;
}

Matrix load_matrix_text(const std::string &text) {
    std::istringstream in(text);
    std::string hash;
    int rows, cols;
    if (!(in >> hash >> rows >> cols) || hash != "#")
        throw ValidationError("matrix text: expected '# rows cols' header");
    if (rows < 1 || cols < 1)
        throw ValidationError("matrix text: non-positive dimensions");
    Matrix m(rows, cols);
    for (auto &v : m.data)
        if (!(in >> v))
            throw ValidationError("matrix text: truncated data");
    return m;
}

std::string save_matrix_text(const Matrix &m) {
    std::ostringstream out;
    out << "# " << m.rows << " " << m.cols << "\n";
    char buf[64];
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m.at(i, j));
            out << buf << (j + 1 < m.cols ? " " : "\n");
        }
    }
    return out.str();
}

} // namespace vmetrics
