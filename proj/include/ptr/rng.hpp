// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace ptr {

/// Seeded generator whose streams are identical on every conforming platform.
///
/// std::mt19937_64 has a fully specified output sequence, but the standard
/// distributions do not, so bounded integers and normals are derived here by
/// documented algorithms:
///   uniform_index(n): draw x until x >= (2^64 - n) mod n, return x mod n.
///   uniform01():      (x >> 11) * 2^-53.
///   normal():         Box-Muller on two uniform01 draws, second value cached.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::size_t uniform_index(std::size_t n);
  double uniform01();
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 mix of a base seed with a stream id; used to give every
/// (experiment cell, purpose) its own independent stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace ptr
