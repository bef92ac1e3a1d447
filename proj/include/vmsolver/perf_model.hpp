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

#ifndef VMSOLVER_PERF_MODEL_HPP_
#define VMSOLVER_PERF_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <string>

#include "vmsolver/calibration.hpp"
#include "vmsolver/catalog.hpp"
#include "vmsolver/error.hpp"
#include "vmsolver/model.hpp"

namespace vmsolver {

// Per-layer timing of one phase, in seconds.
struct PhaseTiming {
  double compute_s = 0.0;             // theoretical, from peak FLOPS
  double compute_calibrated_s = 0.0;  // after CTCF
  double transfer_s = 0.0;            // KV cache CPU<->GPU traffic
  double layer_time_s = 0.0;
};

struct PerfPrediction {
  PhaseTiming prefill;
  PhaseTiming decode;
  double t_task_s = 0.0;  // one batch, end to end
  double tps = 0.0;
  bool uncalibrated = true;
};

namespace detail {

inline void require_offload_coefficient(double c_off) {
  if (!(c_off >= 0.0 && c_off < 1.0)) {
    throw Error(ErrorCode::kInvalidCoefficient,
                "offloading coefficient must be in [0, 1), got " +
                    std::to_string(c_off),
                "c_off");
  }
}

inline void require_inputs(const ModelSpec& model, const WorkloadSpec& workload,
                           const InstanceSpec& instance, double c_off) {
  require_valid(model);
  require_valid(workload);
  Catalog::validate(instance);
  require_offload_coefficient(c_off);
}

}  // namespace detail

// Prefill of one layer: linear layers plus self-attention over the prompt.
// Offloading the freshly produced KV overlaps with compute, hence max().
inline PhaseTiming prefill_layer_time(const ModelSpec& model,
                                      const WorkloadSpec& workload,
                                      const InstanceSpec& instance,
                                      double c_off, const CtcfParams& ctcf) {
  detail::require_inputs(model, workload, instance, c_off);
  const double bs = static_cast<double>(workload.batch_size);
  const double l_in = static_cast<double>(workload.input_tokens);
  const double h1 = static_cast<double>(model.hidden_size);
  const double h2 = static_cast<double>(model.intermediate_size);
  const double precision = static_cast<double>(model.precision_bytes);

  const double linear_flop = bs * (8.0 * l_in * h1 * h1 + 4.0 * l_in * h1 * h2);
  const double attention_flop = 4.0 * bs * l_in * l_in * h1;

  PhaseTiming t;
  t.compute_s = (linear_flop + attention_flop) / instance.flops;
  t.compute_calibrated_s = apply_ctcf(ctcf.prefill, t.compute_s);
  t.transfer_s = c_off * (2.0 * (l_in + 1.0) * h1 * precision) * bs /
                 instance.bw_gpu_to_cpu;
  t.layer_time_s = std::max(t.compute_calibrated_s, t.transfer_s);
  return t;
}

// One decode step of one layer. Fetching offloaded KV does not overlap with
// compute, so the two terms add. The l_out term is charged even at c_off = 0.
inline PhaseTiming decode_layer_time(const ModelSpec& model,
                                     const WorkloadSpec& workload,
                                     const InstanceSpec& instance, double c_off,
                                     const CtcfParams& ctcf) {
  detail::require_inputs(model, workload, instance, c_off);
  const double bs = static_cast<double>(workload.batch_size);
  const double l_in = static_cast<double>(workload.input_tokens);
  const double l_out = static_cast<double>(workload.output_tokens);
  const double h1 = static_cast<double>(model.hidden_size);
  const double h2 = static_cast<double>(model.intermediate_size);
  const double precision = static_cast<double>(model.precision_bytes);

  const double linear_flop = bs * (8.0 * h1 * h1 + 4.0 * h1 * h2);
  // Mean context length over the generation.
  const double attention_flop = 4.0 * bs * (l_in + l_out / 2.0) * h1;

  PhaseTiming t;
  t.compute_s = (linear_flop + attention_flop) / instance.flops;
  t.compute_calibrated_s = apply_ctcf(ctcf.decode, t.compute_s);
  t.transfer_s = (c_off * 2.0 * (l_in + 1.0) + l_out) * h1 * precision * bs /
                 instance.bw_cpu_to_gpu;
  t.layer_time_s = t.compute_calibrated_s + t.transfer_s;
  return t;
}

// Whole-batch latency: prefill once per layer, then (l_out - 1) decode steps
// per layer, the first output token coming out of prefill.
inline PerfPrediction predict(const ModelSpec& model,
                              const WorkloadSpec& workload,
                              const InstanceSpec& instance, double c_off,
                              const CtcfParams& ctcf) {
  PerfPrediction p;
  p.prefill = prefill_layer_time(model, workload, instance, c_off, ctcf);
  p.decode = decode_layer_time(model, workload, instance, c_off, ctcf);
  const double n = static_cast<double>(model.num_layers);
  const double steps = static_cast<double>(workload.output_tokens - 1);
  p.t_task_s = p.prefill.layer_time_s * n + p.decode.layer_time_s * n * steps;
  if (!(p.t_task_s > 0.0)) {
    throw Error(ErrorCode::kDegenerateTask,
                "predicted task time is zero for instance '" + instance.name +
                    "'",
                instance.name);
  }
  p.tps = static_cast<double>(workload.batch_size) *
          static_cast<double>(workload.tokens_per_request()) / p.t_task_s;
  p.uncalibrated = ctcf.uncalibrated();
  return p;
}

}  // namespace vmsolver

#endif  // VMSOLVER_PERF_MODEL_HPP_
