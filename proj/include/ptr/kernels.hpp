// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Dense double-precision inner loops used by the tiny encoder and the
// optimizer. Every routine has a scalar reference implementation; AVX2 and
// NEON variants are picked at runtime when the CPU supports them.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ptr::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

struct AdamCoefficients {
  double lr = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  double bias_correction1 = 1.0;  // 1 - beta1^t
  double bias_correction2 = 1.0;  // 1 - beta2^t
};

struct Table {
  Backend backend;
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[r] = bias[r] + dot(w[r, :], x) for a row-major rows x cols matrix; bias may be null.
  void (*affine)(const double* w, const double* bias, const double* x, double* y,
                 std::size_t rows, std::size_t cols);
  // Decoupled weight decay followed by a bias-corrected Adam step, elementwise.
  // Implementations avoid fused multiply-add so every backend is bit-identical.
  void (*adam_update)(double* param, const double* grad, double* m, double* v, std::size_t n,
                      const AdamCoefficients& c);
};

const Table& scalar_table();
const Table* avx2_table();  // null when not compiled in
const Table* neon_table();  // null when not compiled in

bool available(Backend backend);

/// Backend chosen on first use: PTR_KERNELS=scalar|avx2|neon|auto, default auto.
const Table& active();
Backend active_backend();

/// Overrides the active backend; throws if it is unavailable. Test and CLI use only.
void select(Backend backend);
std::string_view backend_name(Backend backend);
Backend parse_backend(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace ptr::kernels
