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

#ifndef VMSOLVER_MODEL_HPP_
#define VMSOLVER_MODEL_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vmsolver/catalog.hpp"
#include "vmsolver/error.hpp"
#include "vmsolver/units.hpp"

namespace vmsolver {

// Transformer architecture. Dimensions are per layer.
struct ModelSpec {
  std::string name;
  std::int64_t param_count = 0;
  std::int64_t hidden_size = 0;        // h1
  std::int64_t intermediate_size = 0;  // h2
  std::int64_t num_heads = 0;
  std::int64_t head_dim = 0;
  std::int64_t num_layers = 0;
  std::int64_t precision_bytes = 2;

  bool operator==(const ModelSpec&) const = default;
};

struct WorkloadSpec {
  std::int64_t batch_size = 1;
  std::int64_t input_tokens = 1;
  std::int64_t output_tokens = 1;
  std::int64_t total_requests = 1;
  double slo_tps = 1.0;    // tokens/s
  double max_price = 1.0;  // USD/hour

  std::int64_t tokens_per_request() const {
    return input_tokens + output_tokens;
  }

  bool operator==(const WorkloadSpec&) const = default;
};

struct MemoryFootprint {
  Bytes mem_model = 0;
  Bytes mem_activation = 0;
  Bytes mem_kvcache = 0;
  Bytes mem_kvcache_per_layer = 0;
  Bytes mem_total = 0;
  Bytes mem_base = 0;

  bool operator==(const MemoryFootprint&) const = default;
};

struct FieldError {
  std::string field;
  std::string message;
};

inline std::vector<FieldError> validate_model(const ModelSpec& m) {
  std::vector<FieldError> errors;
  auto positive = [&](std::int64_t v, const char* field) {
    if (v <= 0) errors.push_back({field, "must be positive"});
  };
  if (m.name.empty()) errors.push_back({"name", "must not be empty"});
  positive(m.param_count, "param_count");
  positive(m.hidden_size, "hidden_size");
  positive(m.intermediate_size, "intermediate_size");
  positive(m.num_heads, "num_heads");
  positive(m.head_dim, "head_dim");
  positive(m.num_layers, "num_layers");
  if (m.precision_bytes != 1 && m.precision_bytes != 2 &&
      m.precision_bytes != 4) {
    errors.push_back({"precision_bytes", "must be 1, 2 or 4"});
  }
  if (m.num_heads > 0 && m.head_dim > 0 &&
      m.hidden_size != m.num_heads * m.head_dim) {
    errors.push_back({"hidden_size", "must equal num_heads * head_dim"});
  }
  return errors;
}

inline std::vector<FieldError> validate_workload(const WorkloadSpec& w) {
  std::vector<FieldError> errors;
  if (w.batch_size < 1) errors.push_back({"batch_size", "must be >= 1"});
  if (w.input_tokens < 1) errors.push_back({"input_tokens", "must be >= 1"});
  if (w.output_tokens < 1) errors.push_back({"output_tokens", "must be >= 1"});
  if (w.total_requests < w.batch_size || w.total_requests < 1) {
    errors.push_back({"total_requests", "must be >= batch_size"});
  }
  if (!(w.slo_tps > 0.0) || !std::isfinite(w.slo_tps)) {
    errors.push_back({"slo_tps", "must be positive"});
  }
  if (!(w.max_price > 0.0) || std::isnan(w.max_price)) {
    errors.push_back({"max_price", "must be positive"});
  }
  return errors;
}

namespace detail {

inline void throw_if_invalid(const std::vector<FieldError>& errors,
                             ErrorCode code, const char* what) {
  if (errors.empty()) return;
  std::string msg = std::string(what) + ": ";
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i) msg += "; ";
    msg += errors[i].field + " " + errors[i].message;
  }
  throw Error(code, msg, errors.front().field);
}

}  // namespace detail

inline void require_valid(const ModelSpec& m) {
  detail::throw_if_invalid(validate_model(m), ErrorCode::kInvalidModel,
                           "invalid model");
}

inline void require_valid(const WorkloadSpec& w) {
  detail::throw_if_invalid(validate_workload(w), ErrorCode::kInvalidWorkload,
                           "invalid workload");
}

// KV cache is sized over the full sequence (input + output), i.e. the end of
// decode. The activation term uses precision_bytes as its byte width.
inline MemoryFootprint memory_footprint(const ModelSpec& model,
                                        const WorkloadSpec& workload) {
  require_valid(model);
  require_valid(workload);
  const std::int64_t seq = workload.tokens_per_request();
  MemoryFootprint fp;
  fp.mem_model =
      checked_product("mem_model", model.param_count, model.precision_bytes);
  fp.mem_kvcache_per_layer = checked_product(
      "mem_kvcache_per_layer", 2, workload.batch_size, seq,
      model.num_heads * model.head_dim, model.precision_bytes);
  fp.mem_kvcache =
      checked_product("mem_kvcache", fp.mem_kvcache_per_layer, model.num_layers);
  fp.mem_activation =
      checked_product("mem_activation", model.precision_bytes, seq,
                      workload.batch_size, model.hidden_size);
  fp.mem_base = checked_add("mem_base", fp.mem_model, fp.mem_activation);
  fp.mem_total = checked_add("mem_total", fp.mem_base, fp.mem_kvcache);
  return fp;
}

namespace detail {

inline ModelSpec make_model(std::string name, std::int64_t params,
                            std::int64_t hidden, std::int64_t intermediate,
                            std::int64_t heads, std::int64_t layers) {
  return ModelSpec{std::move(name), params, hidden,  intermediate,
                   heads,           hidden / heads,  layers, 2};
}

}  // namespace detail

// Bundled OPT models, FP16.
inline const std::vector<ModelSpec>& model_registry() {
  static const std::vector<ModelSpec> models = {
      detail::make_model("opt-1.3b", 1'300'000'000, 2048, 8192, 32, 24),
      detail::make_model("opt-2.7b", 2'700'000'000, 2560, 10240, 32, 32),
      detail::make_model("opt-6.7b", 6'700'000'000, 4096, 16384, 32, 32),
  };
  return models;
}

inline ModelSpec lookup_model(std::string_view name) {
  for (const auto& m : model_registry()) {
    if (m.name == name) return m;
  }
  throw Error(ErrorCode::kUnknownModel,
              "unknown model '" + std::string(name) + "'", std::string(name));
}

inline nlohmann::json model_to_json(const ModelSpec& m) {
  return nlohmann::json{{"name", m.name},
                        {"param_count", m.param_count},
                        {"hidden_size", m.hidden_size},
                        {"intermediate_size", m.intermediate_size},
                        {"num_heads", m.num_heads},
                        {"head_dim", m.head_dim},
                        {"num_layers", m.num_layers},
                        {"precision_bytes", m.precision_bytes}};
}

inline ModelSpec model_from_json(const nlohmann::json& doc,
                                 const std::string& source) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kUnreadableSource,
                "'" + source + "': model file must be a JSON object", source);
  }
  auto integer = [&](const char* key) -> std::int64_t {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_number()) {
      throw Error(ErrorCode::kMissingField,
                  "'" + source + "': missing field '" + key + "'", key);
    }
    double v = it->get<double>();
    if (v != std::floor(v) || std::abs(v) > 9e18) {
      throw Error(ErrorCode::kInvalidModel,
                  "'" + source + "': field '" + key + "' must be an integer",
                  key);
    }
    return static_cast<std::int64_t>(v);
  };
  ModelSpec m;
  m.name = detail::require_string(doc, "name", "'" + source + "'");
  m.param_count = integer("param_count");
  m.hidden_size = integer("hidden_size");
  m.intermediate_size = integer("intermediate_size");
  m.num_heads = integer("num_heads");
  m.num_layers = integer("num_layers");
  m.precision_bytes = integer("precision_bytes");
  if (m.num_heads <= 0 || m.hidden_size % m.num_heads != 0) {
    throw Error(ErrorCode::kInvalidModel,
                "'" + source + "': hidden_size must divide evenly by num_heads",
                "num_heads");
  }
  m.head_dim = m.hidden_size / m.num_heads;
  require_valid(m);
  return m;
}

inline ModelSpec load_model_file(const std::string& path) {
  return model_from_json(
      detail::parse_json_document(detail::read_file(path), path), path);
}

// Registry name first; anything ending in ".json" is read as a model file.
inline ModelSpec resolve_model(std::string_view name_or_path) {
  for (const auto& m : model_registry()) {
    if (m.name == name_or_path) return m;
  }
  if (name_or_path.ends_with(".json")) {
    return load_model_file(std::string(name_or_path));
  }
  return lookup_model(name_or_path);
}

}  // namespace vmsolver

#endif  // VMSOLVER_MODEL_HPP_
