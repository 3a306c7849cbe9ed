// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "kernels_internal.hpp"

namespace ptr::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void affine_scalar(const double* w, const double* bias, const double* x, double* y,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double acc = dot_scalar(w + r * cols, x, cols);
    y[r] = bias ? bias[r] + acc : acc;
  }
}

}  // namespace

void adam_update_scalar(double* param, const double* grad, double* m, double* v, std::size_t n,
                        const AdamCoefficients& c) {
  const double decay = c.lr * c.weight_decay;
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    double p = param[i];
    p = p - decay * p;
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    param[i] = p - c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

const Table& scalar_table() {
  static const Table table{Backend::kScalar, "scalar", dot_scalar, axpy_scalar, affine_scalar,
                           adam_update_scalar};
  return table;
}

}  // namespace ptr::kernels
