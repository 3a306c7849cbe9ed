// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Layer primitives with explicit backward passes. Inputs are n x d matrices,
// one row per sequence position. Backward functions overwrite the input
// gradient and accumulate into parameter gradients.

#pragma once

#include <span>
#include <vector>

#include "ptr/mlm/matrix.hpp"

namespace ptr::mlm::layers {

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// y = x W^T + b, with W stored out x in.
void linear_forward(const Matrix& x, const Matrix& w, const Matrix& b, Matrix& y);
void linear_backward(const Matrix& x, const Matrix& w, const Matrix& dy, Matrix& dx, Matrix& dw,
                     Matrix& db);

struct LayerNormCache {
  Matrix xhat;
  std::vector<double> rstd;
};

void layer_norm_forward(const Matrix& x, const Matrix& gain, const Matrix& bias, double eps,
                        Matrix& y, LayerNormCache& cache);
void layer_norm_backward(const Matrix& dy, const Matrix& gain, const LayerNormCache& cache,
                         Matrix& dx, Matrix& dgain, Matrix& dbias);

/// tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
void gelu_forward(const Matrix& x, Matrix& y);
void gelu_backward(const Matrix& x, const Matrix& dy, Matrix& dx);

/// Scaled dot-product attention over all positions, heads split along columns.
/// probs holds one n x n matrix per head.
void attention_forward(const Matrix& q, const Matrix& k, const Matrix& v, int n_heads,
                       Matrix& context, std::vector<Matrix>& probs);
void attention_backward(const Matrix& q, const Matrix& k, const Matrix& v, int n_heads,
                        const std::vector<Matrix>& probs, const Matrix& dcontext, Matrix& dq,
                        Matrix& dk, Matrix& dv);

}  // namespace ptr::mlm::layers
