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

// Acceptance checks. Prints one PASS/FAIL line per criterion; failing
// sub-checks are listed on the same line. Exit status is nonzero if any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <thread>

#include "support.hpp"
#include "httplib.h"
#include "vmsolver/service.hpp"
#include "vmsolver/vmsolver.hpp"

namespace {

using namespace vmsolver;  // NOLINT
using testing_support::opt27;
using testing_support::to_oracle;
using testing_support::workload;

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void check(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
  }

  bool report() const {
    std::cout << (failed_.empty() ? "PASS" : "FAIL") << " " << id_ << " "
              << title_;
    if (!failed_.empty()) {
      std::cout << " [failed:";
      for (std::size_t i = 0; i < failed_.size(); ++i) {
        std::cout << (i ? "; " : " ") << failed_[i];
      }
      std::cout << "]";
    }
    std::cout << std::endl;
    return failed_.empty();
  }

 private:
  int id_;
  std::string title_;
  std::vector<std::string> failed_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string name_at(const Recommendation& r, std::size_t i) {
  return i < r.ranking.size() ? r.ranking[i].name() : "<none>";
}

// 1. Online workload selection with measured throughput.
bool online_selection() {
  Criterion c(1, "online workload selection (SLO 400/600, both policies)");
  const auto start = std::chrono::steady_clock::now();
  const Catalog catalog = load_catalog("aws-table3");
  const CalibrationStore store = load_calibration("measured-tps");
  const std::vector<std::pair<std::string, double>> published = {
      {"g4dn.xlarge", 620.17}, {"g6.xlarge", 802.19},
      {"g5.xlarge", 1206.12},  {"g6e.xlarge", 1506.54}};
  auto online = [](double slo) {
    return workload(32, 128, 512, 3000, slo, 3.0);
  };
  for (const auto& [name, tps] : published) {
    auto got = store.measured_tps(name, "opt-2.7b", online(1));
    c.check(got && std::abs(*got - tps) <= 0.01 * tps,
            name + " fixture TPS within 1%");
  }
  const std::vector<std::pair<double, std::string>> expect = {
      {400, "g4dn.xlarge"}, {600, "g6.xlarge"}};
  for (const auto& [slo, winner] : expect) {
    auto rec = recommend(opt27(), online(slo), catalog, store);
    c.check(name_at(rec, 0) == winner, "SLO " + fmt(slo) + " winner " +
                                           winner + " (got " +
                                           name_at(rec, 0) + ")");
    PlannerOptions max_perf;
    max_perf.policy = Policy::kMaxPerformance;
    auto fast = recommend(opt27(), online(slo), catalog, store, max_perf);
    c.check(name_at(fast, 0) == "g6e.xlarge",
            "max-perf SLO " + fmt(slo) + " winner g6e.xlarge (got " +
                name_at(fast, 0) + ")");
  }
  auto rec = recommend(opt27(), online(400), catalog, store);
  c.check(name_at(rec, 1) == "g6.xlarge", "SLO 400 second g6.xlarge");
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  c.check(secs < 1.0, "runtime < 1 s (took " + fmt(secs) + " s)");
  return c.report();
}

// 2. Offline workload ordering and offloading coefficients.
bool offline_selection() {
  Criterion c(2, "offline workload ordering and C_off");
  const Catalog catalog = load_catalog("aws-table3");
  const CalibrationStore store = load_calibration("measured-tps");
  auto offline = [](double slo) {
    return workload(32, 1024, 128, 1000, slo, 3.0);
  };
  auto r100 = recommend(opt27(), offline(100), catalog, store);
  c.check(name_at(r100, 0) == "g4dn.xlarge",
          "SLO 100 winner g4dn.xlarge (got " + name_at(r100, 0) + ")");
  c.check(name_at(r100, 1) == "g6.xlarge",
          "SLO 100 second g6.xlarge (got " + name_at(r100, 1) + ")");
  auto r200 = recommend(opt27(), offline(200), catalog, store);
  c.check(name_at(r200, 0) == "g6.xlarge",
          "SLO 200 winner g6.xlarge (got " + name_at(r200, 0) + ")");

  // C_off as reported in the recommendation document.
  auto doc = recommendation_to_json(r100);
  std::optional<double> g6, g6e;
  for (const auto& e : doc["ranking"]) {
    const auto name = e["instance"]["name"].get<std::string>();
    const double pct = e["suitability"]["c_off"].get<double>() * 100.0;
    if (name == "g6.xlarge") g6 = pct;
    if (name == "g6e.xlarge") g6e = pct;
  }
  c.check(g6 && std::abs(*g6 - 60.0) <= 5.0,
          "g6.xlarge C_off 60% +/- 5pp (got " + (g6 ? fmt(*g6) : "n/a") +
              "%)");
  c.check(g6e && *g6e == 0.0,
          "g6e.xlarge C_off exactly 0 (got " + (g6e ? fmt(*g6e) : "n/a") +
              "%)");
  return c.report();
}

// 3. Price ratio of the cheapest and most expensive instance.
bool savings_headline() {
  Criterion c(3, "savings headline 73.7% +/- 0.1pp");
  const Catalog catalog = load_catalog("aws-table3");
  const double saving = 1.0 - catalog.at("g4dn.xlarge").price_per_hour /
                                  catalog.at("g6e.xlarge").price_per_hour;
  c.check(std::abs(saving * 100.0 - 73.7) <= 0.1,
          "saving " + fmt(saving * 100.0) + "%");
  return c.report();
}

// 4. CTCF fitting.
bool ctcf_round_trip() {
  Criterion c(4, "CTCF fit round-trip");
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> x_dist(1e-3, 0.4);
  std::uniform_real_distribution<double> a_dist(-0.5, 2.0);
  std::uniform_real_distribution<double> b_dist(0.001, 0.05);
  std::normal_distribution<double> noise(0.0, 0.05);
  double worst_exact = 0, worst_sse = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double a = a_dist(rng), b = b_dist(rng);
    std::vector<ProfilingSample> exact, noisy;
    std::vector<double> xs, ys;
    for (int i = 0; i < 10; ++i) {
      const double x = x_dist(rng);
      exact.push_back({"i", Phase::kPrefill, 1, x, std::max(1e-9, a * x + b)});
      if (exact.back().measured_s != a * x + b) exact.pop_back();
      const double y = (a * x + b) * (1.0 + noise(rng));
      if (y > 0) {
        noisy.push_back({"i", Phase::kPrefill, 1, x, y});
        xs.push_back(x);
        ys.push_back(y);
      }
    }
    if (exact.size() >= 2) {
      auto fit = fit_ctcf(exact);
      worst_exact = std::max({worst_exact, std::abs(fit.coeffs.alpha - a) /
                                               std::abs(a),
                              std::abs(fit.coeffs.beta - b) / std::abs(b)});
    }
    if (noisy.size() >= 2) {
      auto fit = fit_ctcf(noisy);
      auto o = oracle::ols(xs, ys);
      worst_sse = std::max(
          worst_sse,
          std::abs(oracle::sse(fit.coeffs.alpha, fit.coeffs.beta, xs, ys) -
                   o.sse));
    }
  }
  c.check(worst_exact <= 1e-9,
          "noiseless relative error " + fmt(worst_exact) + " <= 1e-9");
  c.check(worst_sse <= 1e-12, "noisy SSE gap " + fmt(worst_sse) + " <= 1e-12");
  std::vector<ProfilingSample> three = {{"i", Phase::kPrefill, 1, 1, 1.2},
                                        {"i", Phase::kPrefill, 1, 2, 1.8},
                                        {"i", Phase::kPrefill, 1, 3, 3.0}};
  const double hand = (0.2 / 1.2 + 0.2 / 1.8 + 0.0) / 3.0;
  c.check(std::abs(ctcf_avg_error_rate({1, 0}, three) - hand) <= 1e-15,
          "three-sample error rate");
  return c.report();
}

// 5. Memory model.
bool memory_properties() {
  Criterion c(5, "memory model properties");
  const auto small = memory_footprint(opt27(), workload(2, 1024, 128));
  const auto big = memory_footprint(opt27(), workload(32, 1024, 128));
  c.check(big.mem_kvcache == 16 * small.mem_kvcache, "KV x16 from BS 2 to 32");

  std::mt19937_64 rng(5);
  bool ok = true;
  for (int i = 0; i < 1000 && ok; ++i) {
    auto m = testing_support::random_model(rng);
    auto w = testing_support::random_workload(rng);
    auto fp = memory_footprint(m, w);
    auto o = oracle::memory(to_oracle(m), to_oracle(w));
    ok = fp.mem_total == fp.mem_base + fp.mem_kvcache &&
         fp.mem_base == fp.mem_model + fp.mem_activation &&
         fp.mem_kvcache == fp.mem_kvcache_per_layer * m.num_layers &&
         static_cast<oracle::u128>(fp.mem_total) == o.total &&
         static_cast<oracle::u128>(fp.mem_kvcache) == o.kv;
  }
  c.check(ok, "identities on 1000 random pairs");
  const auto ex = memory_footprint(opt27(), workload(64, 1024, 128));
  const auto ox = oracle::memory(to_oracle(opt27()), {64, 1024, 128});
  c.check(ex.mem_kvcache == 24'159'191'040 &&
              static_cast<oracle::u128>(ex.mem_kvcache) == ox.kv,
          "BS 64 example KV bytes");
  return c.report();
}

// 6. Suitability against the brute-force classifier.
bool suitability_oracle() {
  Criterion c(6, "suitability check matches brute force");
  std::mt19937_64 rng(6);
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  const double prices[] = {0.5, 0.71, 1.0, 1.167, 1.466, 2.699};
  int mismatches = 0, out_of_range = 0, over_avail = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    ModelSpec m = testing_support::random_model(rng);
    m.param_count = pick(1'000, 5'000'000);
    auto fp = memory_footprint(m, workload(pick(1, 16), pick(1, 64),
                                           pick(1, 64)));
    std::vector<InstanceSpec> specs;
    std::vector<oracle::Classified> brute;
    std::vector<double> price_list;
    for (int i = 0, n = static_cast<int>(pick(1, 8)); i < n; ++i) {
      auto s = testing_support::instance("vm" + std::to_string(pick(0, 99)) +
                                             "_" + std::to_string(i),
                                         prices[pick(0, 5)], 1, 1);
      s.gpu_memory = std::max<std::int64_t>(
          1, pick(fp.mem_model / 2, fp.mem_total + 1000));
      specs.push_back(s);
      price_list.push_back(s.price_per_hour);
      brute.push_back(oracle::classify(s.name, s.price_per_hour, s.gpu_memory,
                                       fp.mem_model, fp.mem_base,
                                       fp.mem_kvcache,
                                       fp.mem_kvcache_per_layer));
    }
    const double p_max = std::uniform_real_distribution<double>(0.4, 3)(rng);
    auto got = build_candidates(Catalog(specs, "rand"), fp, p_max);
    auto want = oracle::candidates(brute, price_list, p_max);
    if (got.size() != want.size()) {
      ++mismatches;
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i].instance.name != want[i].name ||
          got[i].offloaded_kv_bytes != want[i].offloaded ||
          got[i].c_off != want[i].c_off ||
          (got[i].verdict == Verdict::kPartialOffload) !=
              (want[i].verdict == oracle::Verdict::kPartial)) {
        ++mismatches;
      }
      if (!(got[i].c_off >= 0.0 && got[i].c_off < 1.0)) ++out_of_range;
      if (got[i].verdict == Verdict::kPartialOffload &&
          fp.mem_kvcache - got[i].offloaded_kv_bytes > got[i].mem_avail) {
        ++over_avail;
      }
    }
  }
  c.check(mismatches == 0, std::to_string(mismatches) + " mismatches");
  c.check(out_of_range == 0, "C_off in [0,1)");
  c.check(over_avail == 0, "on-GPU KV within mem_avail");
  return c.report();
}

// 7. Performance model.
bool perf_properties() {
  Criterion c(7, "performance model properties");
  std::mt19937_64 rng(7);
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  auto real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  bool composition = true, monotone = true, homogeneous = true, single = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const ModelSpec& m = model_registry()[static_cast<std::size_t>(pick(0, 2))];
    auto w = workload(pick(1, 64), pick(1, 2048), pick(1, 512));
    auto inst = testing_support::instance("x", 1, 24, real(4, 120), real(2, 32));
    CtcfParams ctcf;
    ctcf.prefill = {real(0.2, 2), real(-1e-3, 1e-3)};
    ctcf.decode = {real(0.2, 2), real(-1e-5, 1e-5)};
    auto p = predict(m, w, inst, real(0, 0.99), ctcf);
    composition &= p.prefill.layer_time_s ==
                       std::max(p.prefill.compute_calibrated_s,
                                p.prefill.transfer_s) &&
                   p.decode.layer_time_s ==
                       p.decode.compute_calibrated_s + p.decode.transfer_s;

    double prev = INFINITY;
    for (int s = 0; s < 20; ++s) {
      double tps = predict(m, w, inst, s / 20.0, CtcfParams::identity()).tps;
      monotone &= tps <= prev;
      prev = tps;
    }

    const double k = real(1, 16);
    auto scaled = inst;
    scaled.flops *= k;
    auto a = predict(m, w, inst, 0, CtcfParams::identity());
    auto b = predict(m, w, scaled, 0, CtcfParams::identity());
    const double eps = 4 * std::numeric_limits<double>::epsilon();
    homogeneous &=
        std::abs(b.prefill.compute_s - a.prefill.compute_s / k) <=
            eps * a.prefill.compute_s / k &&
        std::abs(b.decode.compute_s - a.decode.compute_s / k) <=
            eps * a.decode.compute_s / k;

    auto w1 = w;
    w1.output_tokens = 1;
    auto p1 = predict(m, w1, inst, real(0, 0.99), CtcfParams::identity());
    single &= p1.t_task_s ==
              p1.prefill.layer_time_s * static_cast<double>(m.num_layers);
  }
  c.check(composition, "max/additive composition");
  c.check(monotone, "TPS non-increasing in C_off");
  c.check(homogeneous, "FLOPS homogeneity");
  c.check(single, "l_out = 1 removes decode");
  return c.report();
}

// 8. Planner.
bool planner_properties() {
  Criterion c(8, "planner determinism and SLO soundness");
  std::mt19937_64 rng(8);
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  auto real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  bool permutation = true, sound = true, shrinking = true;
  for (int trial = 0; trial < 300; ++trial) {
    const ModelSpec& m = model_registry()[static_cast<std::size_t>(pick(0, 2))];
    auto w = workload(pick(1, 64), pick(16, 1024), pick(16, 512));
    w.total_requests = w.batch_size * pick(1, 100);
    w.max_price = real(0.5, 4);
    std::vector<InstanceSpec> specs;
    CalibrationStore store("rand");
    for (int i = 0, n = static_cast<int>(pick(2, 8)); i < n; ++i) {
      auto s = testing_support::instance("vm" + std::to_string(i),
                                         real(0.3, 4), real(8, 96),
                                         real(4, 120), real(2, 32));
      if (pick(0, 2) == 0) {
        store.add_measured(s.name, {m.name, w.batch_size, w.input_tokens,
                                    w.output_tokens, real(50, 2000)});
      }
      specs.push_back(s);
    }
    std::set<std::string> prev;
    bool first = true;
    for (double slo : {10.0, 50.0, 100.0, 200.0, 400.0, 800.0, 1600.0}) {
      w.slo_tps = slo;
      auto base = recommend(m, w, Catalog(specs, "a"), store);
      auto order = specs;
      std::shuffle(order.begin(), order.end(), rng);
      auto shuffled = recommend(m, w, Catalog(order, "a"), store);
      permutation &= name_at(base, 0) == name_at(shuffled, 0);
      std::set<std::string> now;
      for (const auto& rc : base.ranking) {
        sound &= rc.tps >= slo;
        now.insert(rc.name());
      }
      if (!first) {
        shrinking &= std::includes(prev.begin(), prev.end(), now.begin(),
                                   now.end());
      }
      prev = now;
      first = false;
    }
  }
  c.check(permutation, "catalog order never changes the winner");
  c.check(sound, "no ranked candidate below SLO");
  c.check(shrinking, "raising SLO only shrinks the ranking");
  return c.report();
}

// 9. CLI and HTTP produce the same document.
std::string cli_json(const std::string& args) {
  std::string cmd =
      std::string(VMSOLVER_CLI_PATH) + " " + args + " --format json 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  pclose(pipe);
  return out;
}

bool cross_interface() {
  Criterion c(9, "CLI and HTTP recommendation documents identical");
  Service service(ServiceConfig{"aws-table3", "measured-tps", ""});
  httplib::Server server;
  service.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  struct Case {
    std::string name, args;
    nlohmann::json body;
  };
  const std::vector<Case> cases = {
      {"online SLO 400",
       "--model opt-2.7b --batch 32 --input-tokens 128 --output-tokens 512 "
       "--requests 3000 --slo-tps 400 --max-price 3",
       {{"model", "opt-2.7b"}, {"batch_size", 32}, {"input_tokens", 128},
        {"output_tokens", 512}, {"total_requests", 3000}, {"slo_tps", 400},
        {"max_price", 3}}},
      {"offline no-offload",
       "--model opt-2.7b --batch 32 --input-tokens 1024 --output-tokens 128 "
       "--requests 1000 --slo-tps 100 --max-price 3 --no-offload",
       {{"model", "opt-2.7b"}, {"batch_size", 32}, {"input_tokens", 1024},
        {"output_tokens", 128}, {"total_requests", 1000}, {"slo_tps", 100},
        {"max_price", 3}, {"no_offload", true}}},
      {"max-perf",
       "--model opt-6.7b --batch 8 --input-tokens 256 --output-tokens 64 "
       "--slo-tps 50 --max-price 3 --policy max-perf",
       {{"model", "opt-6.7b"}, {"batch_size", 8}, {"input_tokens", 256},
        {"output_tokens", 64}, {"slo_tps", 50}, {"max_price", 3},
        {"policy", "max-perf"}}},
      {"infeasible",
       "--model opt-1.3b --batch 4 --input-tokens 64 --output-tokens 64 "
       "--slo-tps 1e9 --max-price 3",
       {{"model", "opt-1.3b"}, {"batch_size", 4}, {"input_tokens", 64},
        {"output_tokens", 64}, {"slo_tps", 1e9}, {"max_price", 3}}},
  };
  for (const auto& k : cases) {
    std::string cli_doc, http_doc;
    try {
      cli_doc = nlohmann::json::parse(cli_json("recommend " + k.args)).dump();
    } catch (const std::exception&) {
      cli_doc = "<unparseable>";
    }
    auto res = client.Post("/api/v1/recommend", k.body.dump(),
                           "application/json");
    if (res && res->status == 200) {
      http_doc = nlohmann::json::parse(res->body).dump();
    }
    c.check(!cli_doc.empty() && cli_doc == http_doc, k.name);
  }
  server.stop();
  thread.join();
  return c.report();
}

}  // namespace

int main() {
  bool ok = true;
  ok &= online_selection();
  ok &= offline_selection();
  ok &= savings_headline();
  ok &= ctcf_round_trip();
  ok &= memory_properties();
  ok &= suitability_oracle();
  ok &= perf_properties();
  ok &= planner_properties();
  ok &= cross_interface();
  return ok ? 0 : 1;
}
