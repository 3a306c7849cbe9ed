// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ptr/kernels.hpp"

namespace ptr::kernels {

// Shared by the SIMD variants for their scalar tails.
void adam_update_scalar(double* param, const double* grad, double* m, double* v, std::size_t n,
                        const AdamCoefficients& c);

}  // namespace ptr::kernels
