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

#ifndef VMSOLVER_CATALOG_HPP_
#define VMSOLVER_CATALOG_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vmsolver/error.hpp"
#include "vmsolver/fixtures.hpp"
#include "vmsolver/units.hpp"

namespace vmsolver {

// One cloud GPU offering, in base SI units.
struct InstanceSpec {
  std::string name;
  std::string gpu_type;
  double price_per_hour = 0.0;  // USD/hour
  Bytes gpu_memory = 0;
  double flops = 0.0;          // FP16 theoretical, FLOP/s
  double bw_gpu_to_cpu = 0.0;  // bytes/s
  double bw_cpu_to_gpu = 0.0;  // bytes/s
  int gpu_count = 1;

  bool operator==(const InstanceSpec&) const = default;
};

// Immutable, validated, ordered set of instances. May be empty only as the
// result of filtering; load_catalog() never returns an empty one.
class Catalog {
 public:
  Catalog() = default;
  Catalog(std::vector<InstanceSpec> instances, std::string source)
      : instances_(std::move(instances)), source_(std::move(source)) {
    std::unordered_set<std::string> seen;
    for (const auto& inst : instances_) {
      validate(inst);
      if (!seen.insert(inst.name).second) {
        throw Error(ErrorCode::kDuplicateName,
                    "duplicate instance name '" + inst.name + "'", inst.name);
      }
    }
  }

  const std::vector<InstanceSpec>& instances() const { return instances_; }
  const std::string& source() const { return source_; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }

  const InstanceSpec* find(std::string_view name) const {
    auto it = std::find_if(instances_.begin(), instances_.end(),
                           [&](const InstanceSpec& i) { return i.name == name; });
    return it == instances_.end() ? nullptr : &*it;
  }

  const InstanceSpec& at(std::string_view name) const {
    if (const auto* inst = find(name)) return *inst;
    throw Error(ErrorCode::kUnknownInstance,
                "unknown instance '" + std::string(name) + "'",
                std::string(name));
  }

  static void validate(const InstanceSpec& inst) {
    auto require_positive = [&](double v, const char* field) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::kNonPositiveValue,
                    "instance '" + inst.name + "': " + field +
                        " must be positive",
                    field);
      }
    };
    if (inst.name.empty()) {
      throw Error(ErrorCode::kMissingField, "instance name is empty", "name");
    }
    require_positive(inst.price_per_hour, "price_per_hour_usd");
    require_positive(static_cast<double>(inst.gpu_memory), "gpu_memory_gb");
    require_positive(inst.flops, "fp16_tflops");
    require_positive(inst.bw_gpu_to_cpu, "bw_gpu_to_cpu_gbps");
    require_positive(inst.bw_cpu_to_gpu, "bw_cpu_to_gpu_gbps");
    require_positive(inst.gpu_count, "gpu_count");
  }

 private:
  std::vector<InstanceSpec> instances_;
  std::string source_;
};

namespace detail {

inline double require_number(const nlohmann::json& entry, const char* key,
                             const std::string& context) {
  auto it = entry.find(key);
  if (it == entry.end() || it->is_null()) {
    throw Error(ErrorCode::kMissingField,
                context + ": missing field '" + key + "'", key);
  }
  if (!it->is_number()) {
    throw Error(ErrorCode::kMissingField,
                context + ": field '" + key + "' must be a number", key);
  }
  return it->get<double>();
}

inline std::string require_string(const nlohmann::json& entry, const char* key,
                                  const std::string& context) {
  auto it = entry.find(key);
  if (it == entry.end() || !it->is_string() ||
      it->get_ref<const std::string&>().empty()) {
    throw Error(ErrorCode::kMissingField,
                context + ": missing field '" + key + "'", key);
  }
  return it->get<std::string>();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kUnreadableSource, "cannot open '" + path + "'",
                path);
  }
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline nlohmann::json parse_json_document(std::string_view text,
                                          const std::string& source) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kUnreadableSource,
                "'" + source + "' is not valid JSON: " + e.what(), source);
  }
}

}  // namespace detail

inline InstanceSpec instance_from_json(const nlohmann::json& entry,
                                       std::size_t index = 0) {
  std::string context = "instance #" + std::to_string(index);
  if (!entry.is_object()) {
    throw Error(ErrorCode::kMissingField, context + " is not an object",
                "instances");
  }
  InstanceSpec inst;
  inst.name = detail::require_string(entry, "name", context);
  context = "instance '" + inst.name + "'";
  inst.gpu_type = detail::require_string(entry, "gpu_type", context);
  inst.price_per_hour =
      detail::require_number(entry, "price_per_hour_usd", context);
  double gpu_memory_gb = detail::require_number(entry, "gpu_memory_gb", context);
  if (!(gpu_memory_gb > 0.0) || gpu_memory_gb * kBytesPerGB > 9e18) {
    throw Error(ErrorCode::kNonPositiveValue,
                context + ": gpu_memory_gb must be positive", "gpu_memory_gb");
  }
  inst.gpu_memory = gb_to_bytes(gpu_memory_gb);
  inst.flops =
      detail::require_number(entry, "fp16_tflops", context) * kFlopsPerTFlops;
  inst.bw_gpu_to_cpu =
      detail::require_number(entry, "bw_gpu_to_cpu_gbps", context) *
      kBytesPerGB;
  inst.bw_cpu_to_gpu =
      detail::require_number(entry, "bw_cpu_to_gpu_gbps", context) *
      kBytesPerGB;
  if (auto it = entry.find("gpu_count"); it != entry.end()) {
    if (!it->is_number_integer()) {
      throw Error(ErrorCode::kNonPositiveValue,
                  context + ": gpu_count must be a positive integer",
                  "gpu_count");
    }
    auto count = it->get<std::int64_t>();
    if (count <= 0 || count > std::numeric_limits<int>::max()) {
      throw Error(ErrorCode::kNonPositiveValue,
                  context + ": gpu_count must be a positive integer",
                  "gpu_count");
    }
    inst.gpu_count = static_cast<int>(count);
  }
  Catalog::validate(inst);
  return inst;
}

inline nlohmann::json instance_to_json(const InstanceSpec& inst) {
  return nlohmann::json{
      {"name", inst.name},
      {"gpu_type", inst.gpu_type},
      {"price_per_hour_usd", inst.price_per_hour},
      {"gpu_memory_gb", bytes_to_gb(inst.gpu_memory)},
      {"fp16_tflops", inst.flops / kFlopsPerTFlops},
      {"bw_gpu_to_cpu_gbps", inst.bw_gpu_to_cpu / kBytesPerGB},
      {"bw_cpu_to_gpu_gbps", inst.bw_cpu_to_gpu / kBytesPerGB},
      {"gpu_count", inst.gpu_count},
  };
}

inline Catalog catalog_from_json(const nlohmann::json& doc,
                                 std::string source) {
  if (!doc.is_object() || !doc.contains("instances")) {
    throw Error(ErrorCode::kMissingField,
                "'" + source + "': missing top-level 'instances'", "instances");
  }
  const auto& list = doc.at("instances");
  if (!list.is_array() || list.empty()) {
    throw Error(ErrorCode::kMissingField,
                "'" + source + "': 'instances' must be a non-empty array",
                "instances");
  }
  std::vector<InstanceSpec> instances;
  instances.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    instances.push_back(instance_from_json(list[i], i));
  }
  return Catalog(std::move(instances), std::move(source));
}

inline Catalog parse_catalog(std::string_view text, std::string source) {
  return catalog_from_json(detail::parse_json_document(text, source),
                           std::move(source));
}

// `source` is either a bundled fixture id ("aws-table3", "aws-table1") or a
// path to a catalog JSON file.
inline Catalog load_catalog(std::string_view source) {
  if (auto fixture = fixtures::catalog_fixture(source)) {
    return parse_catalog(*fixture, std::string(source));
  }
  std::string path(source);
  return parse_catalog(detail::read_file(path), path);
}

inline nlohmann::json catalog_to_json(const Catalog& catalog) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& inst : catalog.instances()) {
    list.push_back(instance_to_json(inst));
  }
  return nlohmann::json{{"instances", std::move(list)}};
}

inline std::string serialize_catalog(const Catalog& catalog) {
  return catalog_to_json(catalog).dump(2);
}

// Keeps instances with price_per_hour <= p_max, in catalog order.
inline Catalog filter_by_price(const Catalog& catalog, double p_max) {
  std::vector<InstanceSpec> kept;
  std::copy_if(catalog.instances().begin(), catalog.instances().end(),
               std::back_inserter(kept), [p_max](const InstanceSpec& inst) {
                 return inst.price_per_hour <= p_max;
               });
  return Catalog(std::move(kept), catalog.source());
}

}  // namespace vmsolver

#endif  // VMSOLVER_CATALOG_HPP_
