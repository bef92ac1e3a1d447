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

#ifndef VMSOLVER_TESTS_SUPPORT_HPP_
#define VMSOLVER_TESTS_SUPPORT_HPP_

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "oracle.hpp"
#include "vmsolver/vmsolver.hpp"

namespace testing_support {

namespace fs = std::filesystem;

// A scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("vmsolver-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

 private:
  fs::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline oracle::Model to_oracle(const vmsolver::ModelSpec& m) {
  return {m.param_count, m.hidden_size, m.intermediate_size, m.num_heads,
          m.head_dim,    m.num_layers,  m.precision_bytes};
}

inline oracle::Shape to_oracle(const vmsolver::WorkloadSpec& w) {
  return {w.batch_size, w.input_tokens, w.output_tokens};
}

inline vmsolver::WorkloadSpec workload(std::int64_t bs, std::int64_t lin,
                                       std::int64_t lout,
                                       std::int64_t requests = 0,
                                       double slo = 1.0, double cap = 100.0) {
  vmsolver::WorkloadSpec w;
  w.batch_size = bs;
  w.input_tokens = lin;
  w.output_tokens = lout;
  w.total_requests = requests > 0 ? requests : bs;
  w.slo_tps = slo;
  w.max_price = cap;
  return w;
}

inline vmsolver::InstanceSpec instance(std::string name, double price,
                                       double gpu_gb, double tflops,
                                       double bw_gbps = 12.0) {
  vmsolver::InstanceSpec s;
  s.name = std::move(name);
  s.gpu_type = "test";
  s.price_per_hour = price;
  s.gpu_memory = vmsolver::gb_to_bytes(gpu_gb);
  s.flops = tflops * vmsolver::kFlopsPerTFlops;
  s.bw_gpu_to_cpu = bw_gbps * vmsolver::kBytesPerGB;
  s.bw_cpu_to_gpu = bw_gbps * vmsolver::kBytesPerGB;
  s.gpu_count = 1;
  return s;
}

inline const vmsolver::ModelSpec& opt27() {
  static const auto m = vmsolver::lookup_model("opt-2.7b");
  return m;
}

// A random but valid transformer small enough to keep products in range.
inline vmsolver::ModelSpec random_model(std::mt19937_64& rng) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  vmsolver::ModelSpec m;
  m.name = "rand";
  m.num_heads = pick(1, 64);
  m.head_dim = pick(1, 256);
  m.hidden_size = m.num_heads * m.head_dim;
  m.intermediate_size = m.hidden_size * pick(1, 8);
  m.num_layers = pick(1, 96);
  m.param_count = pick(1'000'000, 80'000'000'000);
  m.precision_bytes = std::array<std::int64_t, 3>{1, 2, 4}[pick(0, 2)];
  return m;
}

inline vmsolver::WorkloadSpec random_workload(std::mt19937_64& rng) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  return workload(pick(1, 256), pick(1, 4096), pick(1, 4096));
}

}  // namespace testing_support

#endif  // VMSOLVER_TESTS_SUPPORT_HPP_
