/* Copyright 2026 The vmsolver Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef VMSOLVER_SUITABILITY_HPP_
#define VMSOLVER_SUITABILITY_HPP_

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "vmsolver/catalog.hpp"
#include "vmsolver/model.hpp"
#include "vmsolver/units.hpp"

namespace vmsolver {

enum class Verdict { kNoOffload, kPartialOffload, kUnsuitable };

enum class UnsuitableReason {
  kNone,
  kModelExceedsGpuMemory,    // gpu_memory < mem_model
  kKvLayerExceedsAvailable,  // mem_kvcache_per_layer > mem_avail
};

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kNoOffload:
      return "NoOffload";
    case Verdict::kPartialOffload:
      return "PartialOffload";
    case Verdict::kUnsuitable:
      return "Unsuitable";
  }
  return "Unknown";
}

inline std::string_view unsuitable_reason_text(UnsuitableReason r) {
  switch (r) {
    case UnsuitableReason::kNone:
      return "";
    case UnsuitableReason::kModelExceedsGpuMemory:
      return "model exceeds GPU memory";
    case UnsuitableReason::kKvLayerExceedsAvailable:
      return "per-layer KV cache exceeds available GPU memory";
  }
  return "";
}

struct Candidate {
  InstanceSpec instance;
  MemoryFootprint footprint;
  Bytes mem_avail = 0;
  // KV bytes held in host memory; c_off == offloaded_kv_bytes / mem_kvcache.
  Bytes offloaded_kv_bytes = 0;
  double c_off = 0.0;
  Verdict verdict = Verdict::kNoOffload;
  UnsuitableReason reason = UnsuitableReason::kNone;

  bool suitable() const { return verdict != Verdict::kUnsuitable; }
};

// Classifies one instance against a footprint. All comparisons are on exact
// byte counts: gpu_memory == mem_total is a fit, and
// mem_kvcache_per_layer == mem_avail still allows offloading.
inline Candidate evaluate_instance(const InstanceSpec& instance,
                                   const MemoryFootprint& footprint) {
  Candidate c;
  c.instance = instance;
  c.footprint = footprint;
  c.mem_avail = detail::narrow_or_throw(
      static_cast<__int128>(instance.gpu_memory) - footprint.mem_base,
      "mem_avail");

  if (instance.gpu_memory >= footprint.mem_total) {
    c.verdict = Verdict::kNoOffload;
    return c;
  }
  if (instance.gpu_memory < footprint.mem_model) {
    c.verdict = Verdict::kUnsuitable;
    c.reason = UnsuitableReason::kModelExceedsGpuMemory;
    return c;
  }
  if (footprint.mem_kvcache_per_layer > c.mem_avail) {
    c.verdict = Verdict::kUnsuitable;
    c.reason = UnsuitableReason::kKvLayerExceedsAvailable;
    return c;
  }
  // Here mem_kvcache_per_layer <= mem_avail < mem_kvcache.
  c.verdict = Verdict::kPartialOffload;
  c.offloaded_kv_bytes = footprint.mem_kvcache - c.mem_avail;
  c.c_off = static_cast<double>(c.offloaded_kv_bytes) /
            static_cast<double>(footprint.mem_kvcache);
  if (c.c_off >= 1.0) c.c_off = std::nextafter(1.0, 0.0);
  return c;
}

// Strict weak order used for every price-sorted list: price, then name.
inline bool price_order(const InstanceSpec& a, const InstanceSpec& b) {
  if (a.price_per_hour != b.price_per_hour) {
    return a.price_per_hour < b.price_per_hour;
  }
  return a.name < b.name;
}

// Affordable, suitable candidates sorted by ascending price.
inline std::vector<Candidate> build_candidates(const Catalog& catalog,
                                               const MemoryFootprint& footprint,
                                               double p_max) {
  std::vector<Candidate> out;
  const Catalog affordable = filter_by_price(catalog, p_max);
  for (const auto& inst : affordable.instances()) {
    Candidate c = evaluate_instance(inst, footprint);
    if (c.suitable()) out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return price_order(a.instance, b.instance);
                   });
  return out;
}

}  // namespace vmsolver

#endif  // VMSOLVER_SUITABILITY_HPP_
