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

#ifndef VMSOLVER_REPORT_HPP_
#define VMSOLVER_REPORT_HPP_

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "vmsolver/calibration.hpp"
#include "vmsolver/catalog.hpp"
#include "vmsolver/model.hpp"
#include "vmsolver/perf_model.hpp"
#include "vmsolver/planner.hpp"

// JSON documents shared by the CLI (--format json) and the HTTP service, plus
// the human-readable tables. The JSON schema is documented in
// docs/report-schema.md; bump kReportSchemaVersion on incompatible changes.
namespace vmsolver {

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json workload_to_json(const WorkloadSpec& w) {
  return {{"batch_size", w.batch_size},
          {"input_tokens", w.input_tokens},
          {"output_tokens", w.output_tokens},
          {"total_requests", w.total_requests},
          {"slo_tps", w.slo_tps},
          {"max_price", w.max_price}};
}

inline nlohmann::json footprint_to_json(const MemoryFootprint& fp) {
  return {{"mem_model_bytes", fp.mem_model},
          {"mem_activation_bytes", fp.mem_activation},
          {"mem_kvcache_bytes", fp.mem_kvcache},
          {"mem_kvcache_per_layer_bytes", fp.mem_kvcache_per_layer},
          {"mem_base_bytes", fp.mem_base},
          {"mem_total_bytes", fp.mem_total}};
}

inline nlohmann::json phase_timing_to_json(const PhaseTiming& t) {
  return {{"compute_s", t.compute_s},
          {"compute_calibrated_s", t.compute_calibrated_s},
          {"transfer_s", t.transfer_s},
          {"layer_time_s", t.layer_time_s}};
}

inline nlohmann::json prediction_to_json(const PerfPrediction& p) {
  return {{"prefill", phase_timing_to_json(p.prefill)},
          {"decode", phase_timing_to_json(p.decode)},
          {"t_task_s", p.t_task_s},
          {"tps", p.tps},
          {"uncalibrated", p.uncalibrated}};
}

inline nlohmann::json cost_to_json(const CostReport& c) {
  return {{"tps_actual", c.tps_actual},
          {"tps_effective", c.tps_effective},
          {"job_tokens", c.job_tokens},
          {"job_duration_s", c.job_duration_s},
          {"billed_hours", c.billed_hours},
          {"billed_cost_usd", c.billed_cost},
          {"ce_hours", c.ce_hours},
          {"cost_efficiency_tokens_per_usd", c.cost_efficiency}};
}

inline nlohmann::json candidate_to_json(const Candidate& c) {
  nlohmann::json j = {{"verdict", verdict_name(c.verdict)},
                      {"c_off", c.c_off},
                      {"mem_avail_bytes", c.mem_avail},
                      {"offloaded_kv_bytes", c.offloaded_kv_bytes}};
  if (c.verdict == Verdict::kUnsuitable) {
    j["unsuitable_reason"] = unsuitable_reason_text(c.reason);
  }
  return j;
}

inline nlohmann::json ranked_to_json(const RankedCandidate& rc,
                                     std::size_t rank) {
  return {{"rank", rank + 1},
          {"instance", instance_to_json(rc.candidate.instance)},
          {"suitability", candidate_to_json(rc.candidate)},
          {"prediction", prediction_to_json(rc.prediction)},
          {"tps", rc.tps},
          {"tps_source", tps_source_name(rc.tps_source)},
          {"uncalibrated", rc.uncalibrated},
          {"cost", cost_to_json(rc.cost)}};
}

inline nlohmann::json rejection_to_json(const Rejection& r) {
  return {{"instance", r.instance},
          {"stage", rejection_stage_name(r.stage)},
          {"reason", r.reason}};
}

inline nlohmann::json recommendation_to_json(const Recommendation& rec) {
  nlohmann::json ranking = nlohmann::json::array();
  for (std::size_t i = 0; i < rec.ranking.size(); ++i) {
    ranking.push_back(ranked_to_json(rec.ranking[i], i));
  }
  nlohmann::json rejected = nlohmann::json::array();
  for (const auto& r : rec.rejected) rejected.push_back(rejection_to_json(r));
  const auto* winner = rec.winner();
  return {
      {"schema_version", kReportSchemaVersion},
      {"policy", policy_name(rec.options.policy)},
      {"offloading", !rec.options.disable_offloading},
      {"inputs",
       {{"model", model_to_json(rec.inputs.model)},
        {"workload", workload_to_json(rec.inputs.workload)},
        {"catalog", rec.inputs.catalog_source},
        {"calibration", rec.inputs.calibration_source}}},
      {"memory", footprint_to_json(rec.footprint)},
      {"winner", winner ? nlohmann::json(winner->name()) : nlohmann::json()},
      {"infeasible_cause",
       rec.infeasible_cause
           ? nlohmann::json(infeasible_cause_text(*rec.infeasible_cause))
           : nlohmann::json()},
      {"ranking", std::move(ranking)},
      {"rejected", std::move(rejected)},
  };
}

inline nlohmann::json explanation_to_json(const Explanation& ex) {
  nlohmann::json j = {{"instance", ex.instance},
                      {"memory", footprint_to_json(ex.footprint)},
                      {"c_off", ex.c_off}};
  j["rank"] = ex.rank ? nlohmann::json(*ex.rank + 1) : nlohmann::json();
  j["verdict"] = ex.verdict ? nlohmann::json(verdict_name(*ex.verdict))
                            : nlohmann::json();
  j["mem_avail_bytes"] =
      ex.mem_avail ? nlohmann::json(*ex.mem_avail) : nlohmann::json();
  j["prediction"] =
      ex.prediction ? prediction_to_json(*ex.prediction) : nlohmann::json();
  j["tps"] = ex.tps ? nlohmann::json(*ex.tps) : nlohmann::json();
  j["cost"] = ex.cost ? cost_to_json(*ex.cost) : nlohmann::json();
  j["rejection"] =
      ex.rejection ? rejection_to_json(*ex.rejection) : nlohmann::json();
  return j;
}

inline nlohmann::json predict_report_to_json(const PredictReport& r) {
  return {{"schema_version", kReportSchemaVersion},
          {"model", r.model.name},
          {"instance", r.instance.name},
          {"workload",
           {{"batch_size", r.workload.batch_size},
            {"input_tokens", r.workload.input_tokens},
            {"output_tokens", r.workload.output_tokens}}},
          {"c_off", r.c_off},
          {"prediction", prediction_to_json(r.prediction)},
          {"measured_tps",
           r.measured_tps ? nlohmann::json(*r.measured_tps) : nlohmann::json()}};
}

inline nlohmann::json catalog_listing_to_json(const Catalog& catalog) {
  nlohmann::json j = catalog_to_json(catalog);
  j["source"] = catalog.source();
  return j;
}

inline nlohmann::json models_to_json() {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& m : model_registry()) list.push_back(model_to_json(m));
  return {{"models", std::move(list)}};
}

namespace detail {

inline std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

}  // namespace detail

inline void print_recommendation_table(std::ostream& os,
                                       const Recommendation& rec) {
  const auto& w = rec.inputs.workload;
  os << "model " << rec.inputs.model.name << ", batch " << w.batch_size
     << ", tokens " << w.input_tokens << "/" << w.output_tokens << ", "
     << w.total_requests << " requests, SLO " << detail::fixed2(w.slo_tps)
     << " TPS, cap " << detail::fixed2(w.max_price) << " USD/h, policy "
     << policy_name(rec.options.policy)
     << (rec.options.disable_offloading ? " (no offloading)" : "") << "\n\n";

  os << std::left << std::setw(5) << "rank" << std::setw(16) << "instance"
     << std::right << std::setw(10) << "USD/h" << std::setw(10) << "C_off(%)"
     << std::setw(12) << "TPS" << std::setw(10) << "source" << std::setw(16)
     << "tokens/USD" << std::setw(8) << "hours" << std::setw(10) << "cost"
     << "\n";
  for (std::size_t i = 0; i < rec.ranking.size(); ++i) {
    const auto& rc = rec.ranking[i];
    os << std::left << std::setw(5) << (i + 1) << std::setw(16) << rc.name()
       << std::right << std::setw(10)
       << detail::fixed2(rc.candidate.instance.price_per_hour) << std::setw(10)
       << detail::fixed2(rc.candidate.c_off * 100.0) << std::setw(12)
       << detail::fixed2(rc.tps) << std::setw(10) << tps_source_name(rc.tps_source)
       << std::setw(16) << detail::fixed2(rc.cost.cost_efficiency)
       << std::setw(8) << rc.cost.billed_hours << std::setw(10)
       << detail::fixed2(rc.cost.billed_cost) << "\n";
  }
  if (!rec.rejected.empty()) {
    os << "\nrejected:\n";
    for (const auto& r : rec.rejected) {
      os << "  " << std::left << std::setw(16) << r.instance << std::setw(20)
         << rejection_stage_name(r.stage) << r.reason << "\n";
    }
  }
  os << "\n";
  if (const auto* win = rec.winner()) {
    os << "winner: " << win->name() << "\n";
  } else {
    os << "no feasible instance: "
       << infeasible_cause_text(*rec.infeasible_cause) << "\n";
  }
}

inline void print_predict_table(std::ostream& os, const PredictReport& r) {
  auto ms = [](double s) { return detail::fixed2(s * 1e3); };
  os << "model " << r.model.name << " on " << r.instance.name << ", batch "
     << r.workload.batch_size << ", tokens " << r.workload.input_tokens << "/"
     << r.workload.output_tokens << ", c_off " << detail::fixed2(r.c_off * 100.0)
     << "%\n\n";
  os << std::left << std::setw(10) << "phase" << std::right << std::setw(14)
     << "compute(ms)" << std::setw(16) << "calibrated(ms)" << std::setw(14)
     << "transfer(ms)" << std::setw(12) << "layer(ms)" << "\n";
  auto row = [&](const char* name, const PhaseTiming& t) {
    os << std::left << std::setw(10) << name << std::right << std::setw(14)
       << ms(t.compute_s) << std::setw(16) << ms(t.compute_calibrated_s)
       << std::setw(14) << ms(t.transfer_s) << std::setw(12)
       << ms(t.layer_time_s) << "\n";
  };
  row("prefill", r.prediction.prefill);
  row("decode", r.prediction.decode);
  os << "\nt_task: " << detail::fixed2(r.prediction.t_task_s) << " s\n"
     << "tps: " << detail::fixed2(r.prediction.tps) << "\n"
     << "calibration: "
     << (r.prediction.uncalibrated ? "uncalibrated" : "calibrated") << "\n";
  if (r.measured_tps) {
    os << "measured tps: " << detail::fixed2(*r.measured_tps) << "\n";
  }
}

inline void print_ingest_table(std::ostream& os, const IngestReport& report) {
  os << report.groups.size() << " groups fitted\n";
  if (report.groups.empty()) return;
  os << std::left << std::setw(18) << "instance" << std::setw(9) << "phase"
     << std::right << std::setw(16) << "alpha" << std::setw(16) << "beta(ms)"
     << std::setw(20) << "avg. error rate(%)" << std::setw(9) << "samples"
     << "\n";
  for (const auto& g : report.groups) {
    char alpha[32], beta[32];
    std::snprintf(alpha, sizeof alpha, "%.10g", g.fit.coeffs.alpha);
    std::snprintf(beta, sizeof beta, "%.10g", g.fit.coeffs.beta * 1e3);
    os << std::left << std::setw(18) << g.instance_name << std::setw(9)
       << phase_name(g.phase) << std::right << std::setw(16) << alpha
       << std::setw(16) << beta << std::setw(20)
       << detail::fixed2(g.fit.avg_error_rate * 100.0) << std::setw(9)
       << g.fit.sample_count << "\n";
  }
}

}  // namespace vmsolver

#endif  // VMSOLVER_REPORT_HPP_
