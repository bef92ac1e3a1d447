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

#ifndef VMSOLVER_PLANNER_HPP_
#define VMSOLVER_PLANNER_HPP_

#include <algorithm>
#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vmsolver/calibration.hpp"
#include "vmsolver/catalog.hpp"
#include "vmsolver/economics.hpp"
#include "vmsolver/model.hpp"
#include "vmsolver/perf_model.hpp"
#include "vmsolver/suitability.hpp"

namespace vmsolver {

enum class Policy {
  kInferSave,       // highest cost efficiency that meets the SLO
  kMaxPerformance,  // highest throughput under the price cap
};

inline std::string_view policy_name(Policy p) {
  return p == Policy::kInferSave ? "infersave" : "max-perf";
}

inline std::optional<Policy> parse_policy(std::string_view s) {
  if (s == "infersave") return Policy::kInferSave;
  if (s == "max-perf") return Policy::kMaxPerformance;
  return std::nullopt;
}

struct PlannerOptions {
  Policy policy = Policy::kInferSave;
  bool disable_offloading = false;
};

enum class RejectionStage { kPriceCap, kMemory, kOffloadingDisabled, kSlo };

inline std::string_view rejection_stage_name(RejectionStage s) {
  switch (s) {
    case RejectionStage::kPriceCap:
      return "price_cap";
    case RejectionStage::kMemory:
      return "memory";
    case RejectionStage::kOffloadingDisabled:
      return "offloading_disabled";
    case RejectionStage::kSlo:
      return "slo";
  }
  return "unknown";
}

enum class InfeasibleCause { kAllOverBudget, kAllMemoryUnsuitable, kAllBelowSlo };

inline std::string_view infeasible_cause_text(InfeasibleCause c) {
  switch (c) {
    case InfeasibleCause::kAllOverBudget:
      return "all over budget";
    case InfeasibleCause::kAllMemoryUnsuitable:
      return "all memory-unsuitable";
    case InfeasibleCause::kAllBelowSlo:
      return "all below SLO";
  }
  return "unknown";
}

enum class TpsSource { kAnalytic, kMeasured };

inline std::string_view tps_source_name(TpsSource s) {
  return s == TpsSource::kAnalytic ? "analytic" : "measured";
}

// A suitable candidate with its predicted performance and cost. `tps` is the
// throughput used for SLO checks, billing and ranking: a measured value from
// the calibration store when one matches, otherwise prediction.tps.
struct RankedCandidate {
  Candidate candidate;
  PerfPrediction prediction;
  double tps = 0.0;
  TpsSource tps_source = TpsSource::kAnalytic;
  CostReport cost;
  bool uncalibrated = true;

  const std::string& name() const { return candidate.instance.name; }
};

struct Rejection {
  std::string instance;
  RejectionStage stage = RejectionStage::kPriceCap;
  std::string reason;
};

// Everything the planner learned about one catalog instance.
struct Evaluation {
  InstanceSpec instance;
  std::optional<Candidate> candidate;     // absent when over budget
  std::optional<RankedCandidate> scored;  // absent when never predicted
  std::optional<Rejection> rejection;
  std::optional<std::size_t> rank;        // 0-based position in the ranking
};

struct InputsEcho {
  ModelSpec model;
  WorkloadSpec workload;
  std::string catalog_source;
  std::string calibration_source;
};

struct Recommendation {
  PlannerOptions options;
  InputsEcho inputs;
  MemoryFootprint footprint;
  std::vector<RankedCandidate> ranking;
  std::vector<Rejection> rejected;
  std::vector<Evaluation> evaluations;
  std::optional<InfeasibleCause> infeasible_cause;

  const RankedCandidate* winner() const {
    return ranking.empty() ? nullptr : &ranking.front();
  }
};

namespace detail {

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Total order for the ranking. InferSave: cost efficiency, then throughput,
// then price, then name. Max-performance skips the first key.
inline bool rank_before(const RankedCandidate& a, const RankedCandidate& b,
                        Policy policy) {
  if (policy == Policy::kInferSave &&
      a.cost.cost_efficiency != b.cost.cost_efficiency) {
    return a.cost.cost_efficiency > b.cost.cost_efficiency;
  }
  if (a.tps != b.tps) return a.tps > b.tps;
  return price_order(a.candidate.instance, b.candidate.instance);
}

inline InfeasibleCause dominant_cause(const std::vector<Rejection>& rejected) {
  std::array<std::size_t, 3> votes{};  // budget, memory, slo
  for (const auto& r : rejected) {
    switch (r.stage) {
      case RejectionStage::kPriceCap:
        ++votes[0];
        break;
      case RejectionStage::kMemory:
      case RejectionStage::kOffloadingDisabled:
        ++votes[1];
        break;
      case RejectionStage::kSlo:
        ++votes[2];
        break;
    }
  }
  // max_element returns the first maximum: ties go to the earlier stage.
  auto idx = std::max_element(votes.begin(), votes.end()) - votes.begin();
  return static_cast<InfeasibleCause>(idx);
}

}  // namespace detail

// Price filter -> suitability -> per-candidate prediction and cost -> SLO
// filter -> ranking. Deterministic and independent of catalog order.
inline Recommendation recommend(const ModelSpec& model,
                                const WorkloadSpec& workload,
                                const Catalog& catalog,
                                const CalibrationStore& calibration,
                                const PlannerOptions& options = {}) {
  require_valid(model);
  require_valid(workload);

  Recommendation rec;
  rec.options = options;
  rec.inputs = {model, workload, catalog.source(), calibration.source()};
  rec.footprint = memory_footprint(model, workload);

  std::vector<InstanceSpec> ordered = catalog.instances();
  std::sort(ordered.begin(), ordered.end(), price_order);

  for (const auto& inst : ordered) {
    Evaluation ev;
    ev.instance = inst;
    auto reject = [&](RejectionStage stage, std::string reason) {
      ev.rejection = Rejection{inst.name, stage, std::move(reason)};
      rec.rejected.push_back(*ev.rejection);
    };

    if (inst.price_per_hour > workload.max_price) {
      reject(RejectionStage::kPriceCap,
             "price " + detail::format_number(inst.price_per_hour) +
                 " USD/h exceeds cap " +
                 detail::format_number(workload.max_price) + " USD/h");
      rec.evaluations.push_back(std::move(ev));
      continue;
    }

    ev.candidate = evaluate_instance(inst, rec.footprint);
    const Candidate& cand = *ev.candidate;
    if (!cand.suitable()) {
      reject(RejectionStage::kMemory,
             std::string(unsuitable_reason_text(cand.reason)));
      rec.evaluations.push_back(std::move(ev));
      continue;
    }
    if (options.disable_offloading && cand.c_off > 0.0) {
      reject(RejectionStage::kOffloadingDisabled,
             "requires KV cache offloading (c_off " +
                 detail::format_number(cand.c_off) + ")");
      rec.evaluations.push_back(std::move(ev));
      continue;
    }

    RankedCandidate rc;
    rc.candidate = cand;
    const CtcfParams ctcf = calibration.params_for(inst.name);
    rc.prediction = predict(model, workload, inst, cand.c_off, ctcf);
    rc.uncalibrated = rc.prediction.uncalibrated;
    if (auto measured = calibration.measured_tps(inst.name, model.name, workload)) {
      rc.tps = *measured;
      rc.tps_source = TpsSource::kMeasured;
    } else {
      rc.tps = rc.prediction.tps;
      rc.tps_source = TpsSource::kAnalytic;
    }
    rc.cost = billed_cost(rc.tps, workload, inst.price_per_hour);
    ev.scored = rc;

    if (rc.tps < workload.slo_tps) {
      reject(RejectionStage::kSlo,
             "throughput " + detail::format_number(rc.tps) +
                 " TPS below SLO " + detail::format_number(workload.slo_tps) +
                 " TPS");
    } else {
      rec.ranking.push_back(std::move(rc));
    }
    rec.evaluations.push_back(std::move(ev));
  }

  std::sort(rec.ranking.begin(), rec.ranking.end(),
            [&](const RankedCandidate& a, const RankedCandidate& b) {
              return detail::rank_before(a, b, options.policy);
            });
  for (std::size_t i = 0; i < rec.ranking.size(); ++i) {
    for (auto& ev : rec.evaluations) {
      if (ev.instance.name == rec.ranking[i].name()) ev.rank = i;
    }
  }
  if (rec.ranking.empty()) {
    rec.infeasible_cause = detail::dominant_cause(rec.rejected);
  }
  return rec;
}

// Per-instance view of a recommendation: why it ranked where it did, or the
// exact predicate that rejected it.
struct Explanation {
  std::string instance;
  std::optional<std::size_t> rank;
  std::optional<Verdict> verdict;
  double c_off = 0.0;
  MemoryFootprint footprint;
  std::optional<Bytes> mem_avail;
  std::optional<PerfPrediction> prediction;
  std::optional<double> tps;
  std::optional<TpsSource> tps_source;
  std::optional<CostReport> cost;
  std::optional<Rejection> rejection;
};

inline Explanation explain(const Recommendation& rec,
                           std::string_view instance_name) {
  for (const auto& ev : rec.evaluations) {
    if (ev.instance.name != instance_name) continue;
    Explanation ex;
    ex.instance = ev.instance.name;
    ex.rank = ev.rank;
    ex.footprint = rec.footprint;
    if (ev.candidate) {
      ex.verdict = ev.candidate->verdict;
      ex.c_off = ev.candidate->c_off;
      ex.mem_avail = ev.candidate->mem_avail;
    }
    if (ev.scored) {
      ex.prediction = ev.scored->prediction;
      ex.tps = ev.scored->tps;
      ex.tps_source = ev.scored->tps_source;
      ex.cost = ev.scored->cost;
    }
    ex.rejection = ev.rejection;
    return ex;
  }
  throw Error(ErrorCode::kUnknownInstance,
              "instance '" + std::string(instance_name) +
                  "' was not part of this evaluation",
              std::string(instance_name));
}

struct PredictReport {
  ModelSpec model;
  WorkloadSpec workload;
  InstanceSpec instance;
  double c_off = 0.0;
  PerfPrediction prediction;
  std::optional<double> measured_tps;
};

// Single-instance prediction. Without an explicit c_off the coefficient comes
// from the suitability check, which must not reject the instance.
inline PredictReport predict_instance(const ModelSpec& model,
                                      const WorkloadSpec& workload,
                                      const Catalog& catalog,
                                      std::string_view instance_name,
                                      std::optional<double> c_off,
                                      const CalibrationStore& calibration) {
  PredictReport r;
  r.model = model;
  r.workload = workload;
  r.instance = catalog.at(instance_name);
  if (c_off) {
    detail::require_offload_coefficient(*c_off);
    r.c_off = *c_off;
  } else {
    Candidate cand =
        evaluate_instance(r.instance, memory_footprint(model, workload));
    if (!cand.suitable()) {
      throw Error(ErrorCode::kUnsuitableInstance,
                  "instance '" + r.instance.name + "' is unsuitable: " +
                      std::string(unsuitable_reason_text(cand.reason)),
                  r.instance.name);
    }
    r.c_off = cand.c_off;
  }
  r.prediction = predict(model, workload, r.instance, r.c_off,
                         calibration.params_for(r.instance.name));
  r.measured_tps = calibration.measured_tps(r.instance.name, model.name, workload);
  return r;
}

}  // namespace vmsolver

#endif  // VMSOLVER_PLANNER_HPP_
