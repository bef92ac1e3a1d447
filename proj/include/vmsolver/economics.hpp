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

#ifndef VMSOLVER_ECONOMICS_HPP_
#define VMSOLVER_ECONOMICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "vmsolver/error.hpp"
#include "vmsolver/model.hpp"
#include "vmsolver/units.hpp"

namespace vmsolver {

// Two different "task times" live here: ce_hours is the job length at the
// SLO-capped rate (drives cost efficiency), job_duration_s is the job length
// at the actual rate (drives the bill).
struct CostReport {
  double tps_actual = 0.0;
  double tps_effective = 0.0;
  std::int64_t job_tokens = 0;
  double job_duration_s = 0.0;
  std::int64_t billed_hours = 0;
  double billed_cost = 0.0;  // USD
  double ce_hours = 0.0;
  double cost_efficiency = 0.0;  // tokens per USD
};

struct CostEfficiency {
  double ce_hours = 0.0;
  double cost_efficiency = 0.0;
};

inline double effective_tps(double tps_actual, double slo_tps) {
  return std::min(tps_actual, slo_tps);
}

inline std::int64_t job_tokens(const WorkloadSpec& job) {
  return checked_product("job_tokens", job.total_requests,
                         job.tokens_per_request());
}

namespace detail {

inline std::int64_t require_job_tokens(const WorkloadSpec& job) {
  if (job.total_requests <= 0 || job.tokens_per_request() <= 0) {
    throw Error(ErrorCode::kDegenerateJob, "job contains no tokens",
                "total_requests");
  }
  return job_tokens(job);
}

inline void require_positive_rate(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kNonPositiveValue,
                std::string(what) + " must be positive and finite", what);
  }
}

}  // namespace detail

// Tokens per dollar when the whole job is billed in whole hours at the
// SLO-capped rate.
inline CostEfficiency cost_efficiency(double tps_effective,
                                      const WorkloadSpec& job, double price) {
  detail::require_positive_rate(tps_effective, "tps_effective");
  detail::require_positive_rate(price, "price");
  const auto tokens = static_cast<double>(detail::require_job_tokens(job));
  const double tokens_per_hour = tps_effective * kSecondsPerHour;
  CostEfficiency ce;
  ce.ce_hours = tokens / tokens_per_hour;
  ce.cost_efficiency = tokens_per_hour / (std::ceil(ce.ce_hours) * price);
  return ce;
}

// Hourly bill for running the job at tps_actual. A trailing partial batch is
// billed as a full batch.
inline CostReport billed_cost(double tps_actual, const WorkloadSpec& job,
                              double price) {
  detail::require_positive_rate(tps_actual, "tps_actual");
  detail::require_positive_rate(price, "price");
  CostReport r;
  r.tps_actual = tps_actual;
  r.tps_effective = effective_tps(tps_actual, job.slo_tps);
  r.job_tokens = detail::require_job_tokens(job);

  const std::int64_t batches =
      (job.total_requests + job.batch_size - 1) / job.batch_size;
  const double padded_tokens =
      static_cast<double>(batches) * static_cast<double>(job.batch_size) *
      static_cast<double>(job.tokens_per_request());
  r.job_duration_s = padded_tokens / tps_actual;
  r.billed_hours = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(r.job_duration_s / kSecondsPerHour)));
  r.billed_cost = static_cast<double>(r.billed_hours) * price;

  const CostEfficiency ce = cost_efficiency(r.tps_effective, job, price);
  r.ce_hours = ce.ce_hours;
  r.cost_efficiency = ce.cost_efficiency;
  return r;
}

}  // namespace vmsolver

#endif  // VMSOLVER_ECONOMICS_HPP_
