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

#ifndef VMSOLVER_FIXTURES_HPP_
#define VMSOLVER_FIXTURES_HPP_

#include <optional>
#include <string_view>

// Bundled data sets, addressable by id wherever a catalog or calibration
// source is accepted.
namespace vmsolver::fixtures {

// AWS single-GPU VM table used for the evaluation workloads (us-east-1).
inline constexpr std::string_view kAwsEvalCatalog = R"json({
  "instances": [
    {"name": "g6e.xlarge", "gpu_type": "L40s", "price_per_hour_usd": 2.699,
     "gpu_memory_gb": 48, "fp16_tflops": 91.61,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g6.xlarge", "gpu_type": "L4", "price_per_hour_usd": 1.167,
     "gpu_memory_gb": 24, "fp16_tflops": 30.29,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g5.xlarge", "gpu_type": "A10G", "price_per_hour_usd": 1.466,
     "gpu_memory_gb": 24, "fp16_tflops": 31.52,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g4dn.xlarge", "gpu_type": "T4", "price_per_hour_usd": 0.71,
     "gpu_memory_gb": 16, "fp16_tflops": 8.24,
     "bw_gpu_to_cpu_gbps": 6, "bw_cpu_to_gpu_gbps": 6}
  ]
})json";

// AWS GPU offerings as listed on 2025-02-04 (N. Virginia). This table carries
// no PCIe figure; T4-class rows use 6 GB/s and the rest 12 GB/s.
// network_gbps is informational and ignored by the loader.
inline constexpr std::string_view kAwsFullCatalog = R"json({
  "instances": [
    {"name": "g4dn.xlarge", "gpu_type": "T4", "price_per_hour_usd": 0.526, "gpu_count": 1,
     "fp16_tflops": 8.141, "gpu_memory_gb": 16, "network_gbps": 25,
     "bw_gpu_to_cpu_gbps": 6, "bw_cpu_to_gpu_gbps": 6},
    {"name": "g4ad.xlarge", "gpu_type": "V520 Pro", "price_per_hour_usd": 0.379, "gpu_count": 1,
     "fp16_tflops": 7.373, "gpu_memory_gb": 8, "network_gbps": 10,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g5.xlarge", "gpu_type": "A10G", "price_per_hour_usd": 1.006, "gpu_count": 1,
     "fp16_tflops": 31.52, "gpu_memory_gb": 24, "network_gbps": 10,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g5g.xlarge", "gpu_type": "T4G", "price_per_hour_usd": 0.42, "gpu_count": 1,
     "fp16_tflops": 8.141, "gpu_memory_gb": 16, "network_gbps": 10,
     "bw_gpu_to_cpu_gbps": 6, "bw_cpu_to_gpu_gbps": 6},
    {"name": "g6.xlarge", "gpu_type": "L4", "price_per_hour_usd": 0.805, "gpu_count": 1,
     "fp16_tflops": 30.29, "gpu_memory_gb": 24, "network_gbps": 10,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g6.4xlarge", "gpu_type": "L4", "price_per_hour_usd": 1.323, "gpu_count": 1,
     "fp16_tflops": 30.29, "gpu_memory_gb": 24, "network_gbps": 25,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g4dn.12xlarge", "gpu_type": "T4", "price_per_hour_usd": 3.912, "gpu_count": 4,
     "fp16_tflops": 8.141, "gpu_memory_gb": 64, "network_gbps": 50,
     "bw_gpu_to_cpu_gbps": 6, "bw_cpu_to_gpu_gbps": 6},
    {"name": "g4dn.metal", "gpu_type": "T4", "price_per_hour_usd": 7.824, "gpu_count": 8,
     "fp16_tflops": 8.141, "gpu_memory_gb": 128, "network_gbps": 100,
     "bw_gpu_to_cpu_gbps": 6, "bw_cpu_to_gpu_gbps": 6},
    {"name": "g4ad.16xlarge", "gpu_type": "V520 Pro", "price_per_hour_usd": 3.468, "gpu_count": 4,
     "fp16_tflops": 7.373, "gpu_memory_gb": 32, "network_gbps": 25,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g5.12xlarge", "gpu_type": "A10G", "price_per_hour_usd": 5.672, "gpu_count": 4,
     "fp16_tflops": 31.52, "gpu_memory_gb": 96, "network_gbps": 40,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g5g.16xlarge", "gpu_type": "T4G", "price_per_hour_usd": 2.744, "gpu_count": 2,
     "fp16_tflops": 8.141, "gpu_memory_gb": 32, "network_gbps": 25,
     "bw_gpu_to_cpu_gbps": 6, "bw_cpu_to_gpu_gbps": 6},
    {"name": "g6.12xlarge", "gpu_type": "L4", "price_per_hour_usd": 4.602, "gpu_count": 4,
     "fp16_tflops": 30.29, "gpu_memory_gb": 96, "network_gbps": 40,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "g6.48xlarge", "gpu_type": "L4", "price_per_hour_usd": 13.35, "gpu_count": 8,
     "fp16_tflops": 30.29, "gpu_memory_gb": 196, "network_gbps": 100,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12},
    {"name": "p4de.24xlarge", "gpu_type": "A100", "price_per_hour_usd": 40.96, "gpu_count": 96,
     "fp16_tflops": 19.49, "gpu_memory_gb": 7680, "network_gbps": 400,
     "bw_gpu_to_cpu_gbps": 12, "bw_cpu_to_gpu_gbps": 12}
  ]
})json";

// No CTCF entries and no measurements: every prediction is uncalibrated.
inline constexpr std::string_view kCalibrationIdentity = R"json({})json";

// Prefill CTCF coefficients profiled for OPT-2.7B. beta is in seconds
// (profiled as 24.35 / 46.97 / 42.52 ms).
inline constexpr std::string_view kCalibrationReferenceCtcf = R"json({
  "g4dn.xlarge": {"prefill": {"alpha": -0.185, "beta": 0.02435,
                              "avg_error_rate": 0.0447, "sample_count": 0}},
  "g5.2xlarge": {"prefill": {"alpha": -0.074, "beta": 0.04697,
                             "avg_error_rate": 0.0260, "sample_count": 0}},
  "g6.xlarge": {"prefill": {"alpha": -0.1238, "beta": 0.04252,
                            "avg_error_rate": 0.0223, "sample_count": 0}}
})json";

// Measured end-to-end throughput of OPT-2.7B at batch 32 for the online
// (128 in / 512 out) and offline (1024 in / 128 out) workloads.
inline constexpr std::string_view kCalibrationMeasuredTps = R"json({
  "g4dn.xlarge": {"measured": [
    {"model": "opt-2.7b", "batch_size": 32, "input_tokens": 128, "output_tokens": 512, "tps": 620.17},
    {"model": "opt-2.7b", "batch_size": 32, "input_tokens": 1024, "output_tokens": 128, "tps": 169.17}]},
  "g6.xlarge": {"measured": [
    {"model": "opt-2.7b", "batch_size": 32, "input_tokens": 128, "output_tokens": 512, "tps": 802.19},
    {"model": "opt-2.7b", "batch_size": 32, "input_tokens": 1024, "output_tokens": 128, "tps": 415.04}]},
  "g5.xlarge": {"measured": [
    {"model": "opt-2.7b", "batch_size": 32, "input_tokens": 128, "output_tokens": 512, "tps": 1206.12},
    {"model": "opt-2.7b", "batch_size": 32, "input_tokens": 1024, "output_tokens": 128, "tps": 414.01}]},
  "g6e.xlarge": {"measured": [
    {"model": "opt-2.7b", "batch_size": 32, "input_tokens": 128, "output_tokens": 512, "tps": 1506.54},
    {"model": "opt-2.7b", "batch_size": 32, "input_tokens": 1024, "output_tokens": 128, "tps": 1506.54}]}
})json";

inline constexpr std::string_view kDefaultCatalog = "aws-table3";
inline constexpr std::string_view kDefaultCalibration = "measured-tps";

inline std::optional<std::string_view> catalog_fixture(std::string_view id) {
  if (id == "aws-table3") return kAwsEvalCatalog;
  if (id == "aws-table1") return kAwsFullCatalog;
  return std::nullopt;
}

inline std::optional<std::string_view> calibration_fixture(
    std::string_view id) {
  if (id == "identity") return kCalibrationIdentity;
  if (id == "reference-ctcf") return kCalibrationReferenceCtcf;
  if (id == "measured-tps") return kCalibrationMeasuredTps;
  return std::nullopt;
}

}  // namespace vmsolver::fixtures

#endif  // VMSOLVER_FIXTURES_HPP_
