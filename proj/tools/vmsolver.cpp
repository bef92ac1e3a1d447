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

// vmsolver: command-line front end and HTTP server for the instance planner.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "vmsolver/service.hpp"
#include "vmsolver/vmsolver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNoFeasible = 2;

const CLI::Validator kPositive(
    [](std::string& in) -> std::string {
      try {
        if (std::stod(in) > 0) return {};
      } catch (const std::exception&) {
      }
      return "must be > 0, got " + in;
    },
    "POSITIVE");

std::string env_or(const char* name, std::string_view fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::string(fallback);
}

struct ShapeFlags {
  std::string model;
  std::int64_t batch = 0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::string catalog;
  std::string calibration;
  std::string format = "table";
};

void add_shape_flags(CLI::App* cmd, ShapeFlags& f) {
  cmd->add_option("--model", f.model,
                  "Registry model name or path to a model .json file")
      ->required();
  cmd->add_option("--batch", f.batch, "Batch size")
      ->required()
      ->check(kPositive);
  cmd->add_option("--input-tokens", f.input_tokens, "Input tokens per request")
      ->required()
      ->check(kPositive);
  cmd->add_option("--output-tokens", f.output_tokens,
                  "Output tokens per request")
      ->required()
      ->check(kPositive);
  f.catalog = env_or("VMSOLVER_CATALOG", vmsolver::fixtures::kDefaultCatalog);
  f.calibration =
      env_or("VMSOLVER_CALIBRATION", vmsolver::fixtures::kDefaultCalibration);
  cmd->add_option("--catalog", f.catalog,
                  "Catalog fixture id or JSON path (env VMSOLVER_CATALOG)")
      ->capture_default_str();
  cmd->add_option("--calibration", f.calibration,
                  "Calibration fixture id or JSON path (env "
                  "VMSOLVER_CALIBRATION)")
      ->capture_default_str();
  cmd->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
}

struct RecommendFlags {
  ShapeFlags shape;
  std::optional<std::int64_t> requests;
  double slo_tps = 0.0;
  double max_price = 0.0;
  bool no_offload = false;
  std::string policy = "infersave";
  std::string instance;  // explain only
};

void add_recommend_flags(CLI::App* cmd, RecommendFlags& f) {
  add_shape_flags(cmd, f.shape);
  cmd->add_option("--requests", f.requests,
                  "Total requests in the job (default: batch size)")
      ->check(kPositive);
  cmd->add_option("--slo-tps", f.slo_tps, "Minimum throughput, tokens/s")
      ->required()
      ->check(kPositive);
  cmd->add_option("--max-price", f.max_price, "Price cap, USD/hour")
      ->required()
      ->check(kPositive);
  cmd->add_flag("--no-offload", f.no_offload,
                "Drop candidates that need KV cache offloading");
  cmd->add_option("--policy", f.policy, "Selection policy")
      ->check(CLI::IsMember({"infersave", "max-perf"}))
      ->capture_default_str();
}

vmsolver::WorkloadSpec workload_from(const ShapeFlags& s,
                                     std::optional<std::int64_t> requests,
                                     double slo_tps, double max_price) {
  vmsolver::WorkloadSpec w;
  w.batch_size = s.batch;
  w.input_tokens = s.input_tokens;
  w.output_tokens = s.output_tokens;
  w.total_requests = requests.value_or(s.batch);
  w.slo_tps = slo_tps;
  w.max_price = max_price;
  if (w.total_requests < w.batch_size) {
    throw CLI::ValidationError("--requests", "must be >= --batch");
  }
  return w;
}

vmsolver::Recommendation run_recommend(const RecommendFlags& f) {
  auto model = vmsolver::resolve_model(f.shape.model);
  auto workload =
      workload_from(f.shape, f.requests, f.slo_tps, f.max_price);
  auto catalog = vmsolver::load_catalog(f.shape.catalog);
  auto calibration = vmsolver::load_calibration(f.shape.calibration);
  vmsolver::PlannerOptions options;
  options.policy = *vmsolver::parse_policy(f.policy);
  options.disable_offloading = f.no_offload;
  return vmsolver::recommend(model, workload, catalog, calibration, options);
}

int cmd_recommend(const RecommendFlags& f) {
  auto rec = run_recommend(f);
  if (f.shape.format == "json") {
    std::cout << vmsolver::recommendation_to_json(rec).dump(2) << "\n";
  } else {
    vmsolver::print_recommendation_table(std::cout, rec);
  }
  if (!rec.winner()) {
    if (f.shape.format == "table") return kExitNoFeasible;
    std::cerr << "no feasible instance: "
              << vmsolver::infeasible_cause_text(*rec.infeasible_cause) << "\n";
    return kExitNoFeasible;
  }
  return kExitOk;
}

int cmd_explain(const RecommendFlags& f) {
  auto rec = run_recommend(f);
  auto ex = vmsolver::explain(rec, f.instance);
  std::cout << vmsolver::explanation_to_json(ex).dump(2) << "\n";
  return kExitOk;
}

struct PredictFlags {
  ShapeFlags shape;
  std::string instance;
  std::optional<double> c_off;
};

int cmd_predict(const PredictFlags& f) {
  auto model = vmsolver::resolve_model(f.shape.model);
  auto workload = workload_from(f.shape, std::nullopt, 1.0, 1.0);
  auto catalog = vmsolver::load_catalog(f.shape.catalog);
  auto calibration = vmsolver::load_calibration(f.shape.calibration);
  auto report = vmsolver::predict_instance(model, workload, catalog,
                                           f.instance, f.c_off, calibration);
  if (f.shape.format == "json") {
    std::cout << vmsolver::predict_report_to_json(report).dump(2) << "\n";
  } else {
    vmsolver::print_predict_table(std::cout, report);
  }
  return kExitOk;
}

struct CalibrateFlags {
  std::string profile;
  std::string store;
  std::string catalog;
};

int cmd_calibrate(const CalibrateFlags& f) {
  auto store = vmsolver::load_calibration(f.store, /*allow_missing=*/true);
  std::optional<vmsolver::Catalog> catalog;
  if (!f.catalog.empty()) catalog = vmsolver::load_catalog(f.catalog);
  auto report = vmsolver::ingest_profile(f.profile, store,
                                         catalog ? &*catalog : nullptr);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (!report.groups.empty()) vmsolver::save_calibration(store, f.store);
  vmsolver::print_ingest_table(std::cout, report);
  return kExitOk;
}

struct ServeFlags {
  std::string addr;
  vmsolver::ServiceConfig config;
};

int cmd_serve(const ServeFlags& f) {
  auto colon = f.addr.rfind(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("--addr", "expected host:port");
  }
  std::string host = f.addr.substr(0, colon);
  int port = std::stoi(f.addr.substr(colon + 1));

  vmsolver::Service service(f.config);
  auto snap = service.snapshot();
  if (!snap->catalog) std::cerr << "warning: " << snap->catalog_error << "\n";
  if (!snap->calibration) {
    std::cerr << "warning: " << snap->calibration_error << "\n";
  }
  httplib::Server server;
  service.mount(server);
  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot bind " << f.addr << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-efficient GPU instance planner for LLM inference"};
  app.require_subcommand(1);

  RecommendFlags rec_flags;
  auto* rec_cmd = app.add_subcommand(
      "recommend", "Recommend the most cost-efficient instance under an SLO");
  add_recommend_flags(rec_cmd, rec_flags);

  RecommendFlags explain_flags;
  auto* explain_cmd = app.add_subcommand(
      "explain", "Explain how one instance fared in a recommendation");
  add_recommend_flags(explain_cmd, explain_flags);
  explain_cmd->add_option("--instance", explain_flags.instance)->required();

  PredictFlags predict_flags;
  auto* predict_cmd = app.add_subcommand(
      "predict", "Predict per-phase latency and throughput on one instance");
  add_shape_flags(predict_cmd, predict_flags.shape);
  predict_cmd->add_option("--instance", predict_flags.instance)->required();
  predict_cmd->add_option("--c-off", predict_flags.c_off,
                          "KV offloading coefficient in [0, 1) (default: "
                          "from the memory check)");

  CalibrateFlags cal_flags;
  auto* cal_cmd = app.add_subcommand(
      "calibrate", "Fit CTCF coefficients from a profiling CSV");
  cal_cmd->add_option("--profile", cal_flags.profile, "Profiling CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cal_cmd->add_option("--store", cal_flags.store,
                      "Calibration store JSON (created if missing)")
      ->required();
  cal_cmd->add_option("--catalog", cal_flags.catalog,
                      "Catalog used to warn about unknown instances");

  ServeFlags serve_flags;
  serve_flags.addr = env_or("VMSOLVER_ADDR", "127.0.0.1:8080");
  serve_flags.config.catalog_source =
      env_or("VMSOLVER_CATALOG", vmsolver::fixtures::kDefaultCatalog);
  serve_flags.config.calibration_source =
      env_or("VMSOLVER_CALIBRATION", vmsolver::fixtures::kDefaultCalibration);
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--addr", serve_flags.addr, "host:port (env VMSOLVER_ADDR)")
      ->capture_default_str();
  serve_cmd->add_option("--catalog", serve_flags.config.catalog_source)
      ->capture_default_str();
  serve_cmd->add_option("--calibration", serve_flags.config.calibration_source)
      ->capture_default_str();
  serve_cmd->add_option("--cors-origin", serve_flags.config.cors_origin)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*rec_cmd) return cmd_recommend(rec_flags);
    if (*explain_cmd) return cmd_explain(explain_flags);
    if (*predict_cmd) return cmd_predict(predict_flags);
    if (*cal_cmd) return cmd_calibrate(cal_flags);
    if (*serve_cmd) return cmd_serve(serve_flags);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const vmsolver::Error& e) {
    std::cerr << "error: " << vmsolver::error_code_name(e.code()) << ": "
              << e.what() << "\n";
    return e.code() == vmsolver::ErrorCode::kUnsuitableInstance
               ? kExitNoFeasible
               : kExitInputError;
  }
  return kExitInputError;
}
