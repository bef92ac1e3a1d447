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

#ifndef VMSOLVER_SERVICE_HPP_
#define VMSOLVER_SERVICE_HPP_

#include <algorithm>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "vmsolver/calibration.hpp"
#include "vmsolver/catalog.hpp"
#include "vmsolver/fixtures.hpp"
#include "vmsolver/model.hpp"
#include "vmsolver/planner.hpp"
#include "vmsolver/report.hpp"

// Stateless HTTP facade over the planner. Catalog and calibration are loaded
// once into an immutable snapshot; POST /api/v1/reload swaps in a new one.
namespace vmsolver {

struct ServiceConfig {
  std::string catalog_source = std::string(fixtures::kDefaultCatalog);
  std::string calibration_source = std::string(fixtures::kDefaultCalibration);
  std::string cors_origin = "*";
};

struct ServiceSnapshot {
  std::optional<Catalog> catalog;
  std::string catalog_error;
  std::optional<CalibrationStore> calibration;
  std::string calibration_error;

  bool ready() const { return catalog && calibration; }
};

struct HttpResult {
  int status = 200;
  nlohmann::json body;
};

namespace detail {

class FieldErrors {
 public:
  void add(std::string field, std::string message) {
    errors_.push_back({std::move(field), std::move(message)});
  }
  void add_all(const std::vector<FieldError>& errs) {
    errors_.insert(errors_.end(), errs.begin(), errs.end());
  }
  bool empty() const { return errors_.empty(); }
  HttpResult to_result(int status = 422) const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : errors_) {
      list.push_back({{"field", e.field}, {"message", e.message}});
    }
    return {status, {{"errors", std::move(list)}}};
  }

 private:
  std::vector<FieldError> errors_;
};

inline std::optional<std::int64_t> json_integer(const nlohmann::json& body,
                                                const char* key,
                                                FieldErrors& errors,
                                                bool required = true) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) errors.add(key, "is required");
    return std::nullopt;
  }
  if (!it->is_number_integer()) {
    errors.add(key, "must be an integer");
    return std::nullopt;
  }
  return it->get<std::int64_t>();
}

inline std::optional<double> json_double(const nlohmann::json& body,
                                         const char* key, FieldErrors& errors,
                                         bool required = true) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) errors.add(key, "is required");
    return std::nullopt;
  }
  if (!it->is_number()) {
    errors.add(key, "must be a number");
    return std::nullopt;
  }
  return it->get<double>();
}

inline HttpResult error_result(int status, const Error& e) {
  return {status,
          {{"error", error_code_name(e.code())},
           {"message", e.what()},
           {"subject", e.subject()}}};
}

inline HttpResult unavailable(const ServiceSnapshot& snap) {
  std::string msg = !snap.catalog ? "catalog unavailable: " + snap.catalog_error
                                  : "calibration unavailable: " +
                                        snap.calibration_error;
  return {503, {{"error", "Unavailable"}, {"message", msg}}};
}

// Shared by /recommend and /predict: model name, batch shape.
struct ParsedShape {
  std::optional<ModelSpec> model;
  WorkloadSpec workload;
};

inline ParsedShape parse_shape(const nlohmann::json& body,
                               FieldErrors& errors) {
  ParsedShape out;
  auto model_it = body.find("model");
  if (model_it == body.end() || !model_it->is_string()) {
    errors.add("model", "is required");
  } else {
    try {
      out.model = lookup_model(model_it->get<std::string>());
    } catch (const Error& e) {
      errors.add("model", e.what());
    }
  }
  auto bs = json_integer(body, "batch_size", errors);
  auto in = json_integer(body, "input_tokens", errors);
  auto outp = json_integer(body, "output_tokens", errors);
  if (bs) out.workload.batch_size = *bs;
  if (in) out.workload.input_tokens = *in;
  if (outp) out.workload.output_tokens = *outp;
  // Defaults to one batch; an invalid batch size is reported on its own.
  out.workload.total_requests = std::max<std::int64_t>(1, out.workload.batch_size);
  return out;
}

}  // namespace detail

class Service {
 public:
  explicit Service(ServiceConfig config) : config_(std::move(config)) {
    snapshot_ = std::make_shared<const ServiceSnapshot>(load());
  }

  const ServiceConfig& config() const { return config_; }

  std::shared_ptr<const ServiceSnapshot> snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return snapshot_;
  }

  // Reloads from the configured sources. On failure the previous snapshot
  // stays in place.
  HttpResult reload() {
    auto fresh = std::make_shared<const ServiceSnapshot>(load());
    if (!fresh->ready()) return detail::unavailable(*fresh);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      snapshot_ = fresh;
    }
    return {200,
            {{"catalog", fresh->catalog->source()},
             {"calibration", fresh->calibration->source()}}};
  }

  HttpResult get_catalog() const {
    auto snap = snapshot();
    if (!snap->catalog) return detail::unavailable(*snap);
    return {200, catalog_listing_to_json(*snap->catalog)};
  }

  HttpResult get_models() const { return {200, models_to_json()}; }

  HttpResult post_recommend(const nlohmann::json& body) const {
    auto snap = snapshot();
    if (!snap->ready()) return detail::unavailable(*snap);
    if (!body.is_object()) {
      detail::FieldErrors e;
      e.add("body", "must be a JSON object");
      return e.to_result();
    }
    detail::FieldErrors errors;
    auto shape = detail::parse_shape(body, errors);
    WorkloadSpec w = shape.workload;
    if (auto r = detail::json_integer(body, "total_requests", errors, false)) {
      w.total_requests = *r;
    }
    if (auto v = detail::json_double(body, "slo_tps", errors)) w.slo_tps = *v;
    if (auto v = detail::json_double(body, "max_price", errors)) {
      w.max_price = *v;
    }
    PlannerOptions options;
    if (auto it = body.find("policy"); it != body.end() && !it->is_null()) {
      auto p = it->is_string() ? parse_policy(it->get<std::string>())
                               : std::nullopt;
      if (!p) {
        errors.add("policy", "must be 'infersave' or 'max-perf'");
      } else {
        options.policy = *p;
      }
    }
    if (auto it = body.find("no_offload"); it != body.end() && !it->is_null()) {
      if (!it->is_boolean()) {
        errors.add("no_offload", "must be a boolean");
      } else {
        options.disable_offloading = it->get<bool>();
      }
    }
    if (errors.empty()) errors.add_all(validate_workload(w));

    std::optional<Catalog> catalog_override;
    std::optional<CalibrationStore> calibration_override;
    try {
      if (auto it = body.find("catalog"); it != body.end() && !it->is_null()) {
        catalog_override = resolve_catalog_override(*it);
      }
    } catch (const Error& e) {
      errors.add("catalog", e.what());
    }
    try {
      if (auto it = body.find("calibration");
          it != body.end() && !it->is_null()) {
        calibration_override = resolve_calibration_override(*it);
      }
    } catch (const Error& e) {
      errors.add("calibration", e.what());
    }
    if (!errors.empty()) return errors.to_result();

    try {
      auto rec = recommend(
          *shape.model, w, catalog_override ? *catalog_override : *snap->catalog,
          calibration_override ? *calibration_override : *snap->calibration,
          options);
      return {200, recommendation_to_json(rec)};
    } catch (const Error& e) {
      return detail::error_result(
          e.code() == ErrorCode::kOverflow ? 422 : 500, e);
    }
  }

  HttpResult post_predict(const nlohmann::json& body) const {
    auto snap = snapshot();
    if (!snap->ready()) return detail::unavailable(*snap);
    if (!body.is_object()) {
      detail::FieldErrors e;
      e.add("body", "must be a JSON object");
      return e.to_result();
    }
    detail::FieldErrors errors;
    auto model_it = body.find("model");
    if (model_it != body.end() && model_it->is_string()) {
      try {
        lookup_model(model_it->get<std::string>());
      } catch (const Error& e) {
        return detail::error_result(404, e);
      }
    }
    auto shape = detail::parse_shape(body, errors);
    std::string instance;
    if (auto it = body.find("instance"); it != body.end() && it->is_string()) {
      instance = it->get<std::string>();
    } else {
      errors.add("instance", "is required");
    }
    auto c_off = detail::json_double(body, "c_off", errors, false);
    if (errors.empty()) errors.add_all(validate_workload(shape.workload));
    if (!errors.empty()) return errors.to_result();

    try {
      auto report = predict_instance(*shape.model, shape.workload,
                                     *snap->catalog, instance, c_off,
                                     *snap->calibration);
      return {200, predict_report_to_json(report)};
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::kUnknownInstance:
        case ErrorCode::kUnknownModel:
          return detail::error_result(404, e);
        case ErrorCode::kInvalidCoefficient:
        case ErrorCode::kUnsuitableInstance:
        case ErrorCode::kOverflow: {
          detail::FieldErrors fe;
          fe.add(e.code() == ErrorCode::kInvalidCoefficient ? "c_off"
                                                             : "instance",
                 e.what());
          return fe.to_result();
        }
        default:
          return detail::error_result(500, e);
      }
    }
  }

  // Registers all /api/v1 routes on `server`.
  void mount(httplib::Server& server) {
    auto reply = [this](httplib::Response& res, const HttpResult& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    auto with_body = [reply](httplib::Response& res, const std::string& text,
                             auto&& handler) {
      nlohmann::json body;
      try {
        body = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        detail::FieldErrors errors;
        errors.add("body", std::string("invalid JSON: ") + e.what());
        reply(res, errors.to_result());
        return;
      }
      reply(res, handler(body));
    };

    server.Get("/api/v1/catalog",
               [this, reply](const httplib::Request&, httplib::Response& res) {
                 reply(res, get_catalog());
               });
    server.Get("/api/v1/models",
               [this, reply](const httplib::Request&, httplib::Response& res) {
                 reply(res, get_models());
               });
    server.Post("/api/v1/recommend", [this, with_body](const httplib::Request& req,
                                                       httplib::Response& res) {
      with_body(res, req.body,
                [this](const nlohmann::json& b) { return post_recommend(b); });
    });
    server.Post("/api/v1/predict", [this, with_body](const httplib::Request& req,
                                                     httplib::Response& res) {
      with_body(res, req.body,
                [this](const nlohmann::json& b) { return post_predict(b); });
    });
    server.Post("/api/v1/reload",
                [this, reply](const httplib::Request&, httplib::Response& res) {
                  reply(res, reload());
                });
    server.Options(R"(/api/v1/.*)",
                   [](const httplib::Request&, httplib::Response& res) {
                     res.status = 204;
                   });
    const std::string origin = config_.cors_origin;
    server.set_post_routing_handler(
        [origin](const httplib::Request&, httplib::Response& res) {
          if (origin.empty()) return;
          res.set_header("Access-Control-Allow-Origin", origin);
          res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
          res.set_header("Access-Control-Allow-Headers", "Content-Type");
        });
  }

 private:
  ServiceSnapshot load() const {
    ServiceSnapshot snap;
    try {
      snap.catalog = load_catalog(config_.catalog_source);
    } catch (const Error& e) {
      snap.catalog_error = e.what();
    }
    try {
      snap.calibration = load_calibration(config_.calibration_source);
    } catch (const Error& e) {
      snap.calibration_error = e.what();
    }
    return snap;
  }

  // Overrides are fixture ids or inline documents; the service never reads
  // client-supplied file paths.
  static Catalog resolve_catalog_override(const nlohmann::json& v) {
    if (v.is_string()) {
      auto id = v.get<std::string>();
      if (!fixtures::catalog_fixture(id)) {
        throw Error(ErrorCode::kUnreadableSource,
                    "unknown catalog fixture '" + id + "'", id);
      }
      return load_catalog(id);
    }
    return catalog_from_json(v, "inline");
  }

  static CalibrationStore resolve_calibration_override(const nlohmann::json& v) {
    if (v.is_string()) {
      auto id = v.get<std::string>();
      if (!fixtures::calibration_fixture(id)) {
        throw Error(ErrorCode::kUnreadableSource,
                    "unknown calibration fixture '" + id + "'", id);
      }
      return load_calibration(id);
    }
    return calibration_from_json(v, "inline");
  }

  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::shared_ptr<const ServiceSnapshot> snapshot_;
};

}  // namespace vmsolver

#endif  // VMSOLVER_SERVICE_HPP_
