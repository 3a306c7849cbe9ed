// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ptr {

/// Half-open token range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool overlaps(const Span& other) const { return begin < other.end && other.begin < end; }

  friend bool operator==(const Span&, const Span&) = default;
};

/// One labelled sentence with marked subject and object entities.
struct Instance {
  std::string id;
  std::vector<std::string> tokens;
  Span subj;
  Span obj;
  std::string label;

  friend bool operator==(const Instance&, const Instance&) = default;
};

}  // namespace ptr
