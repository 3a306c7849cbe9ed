// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "ptr/error.hpp"

namespace ptr::kernels {

#if !PTR_HAVE_AVX2
const Table* avx2_table() { return nullptr; }
#endif
#if !PTR_HAVE_NEON
const Table* neon_table() { return nullptr; }
#endif

namespace {

const Table* table_for(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return &scalar_table();
    case Backend::kAvx2:
#if PTR_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_table();
#endif
      return nullptr;
    case Backend::kNeon:
      return neon_table();
  }
  return nullptr;
}

const Table* pick_default() {
  const char* env = std::getenv("PTR_KERNELS");
  const std::string choice = env ? env : "auto";
  if (choice != "auto" && !choice.empty()) {
    const Table* t = table_for(parse_backend(choice));
    if (!t) throw UsageError("PTR_KERNELS=" + choice + " is not available on this CPU/build");
    return t;
  }
  if (const Table* t = table_for(Backend::kAvx2)) return t;
  if (const Table* t = table_for(Backend::kNeon)) return t;
  return &scalar_table();
}

std::atomic<const Table*> g_active{nullptr};

}  // namespace

bool available(Backend backend) { return table_for(backend) != nullptr; }

const Table& active() {
  const Table* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = pick_default();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

Backend active_backend() { return active().backend; }

void select(Backend backend) {
  const Table* t = table_for(backend);
  if (!t) throw UsageError("kernel backend '" + std::string(backend_name(backend)) + "' unavailable");
  g_active.store(t, std::memory_order_release);
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
    case Backend::kNeon: return "neon";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  if (name == "neon") return Backend::kNeon;
  throw UsageError("unknown kernel backend '" + std::string(name) + "'");
}

}  // namespace ptr::kernels
