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

#ifndef VMSOLVER_CALIBRATION_HPP_
#define VMSOLVER_CALIBRATION_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vmsolver/catalog.hpp"
#include "vmsolver/error.hpp"
#include "vmsolver/fixtures.hpp"
#include "vmsolver/model.hpp"
#include "vmsolver/units.hpp"

namespace vmsolver {

enum class Phase { kPrefill, kDecode };

inline std::string_view phase_name(Phase p) {
  return p == Phase::kPrefill ? "prefill" : "decode";
}

inline std::optional<Phase> parse_phase(std::string_view s) {
  if (s == "prefill") return Phase::kPrefill;
  if (s == "decode") return Phase::kDecode;
  return std::nullopt;
}

// CTCF(t) = alpha * t + beta, beta in seconds. Identity is (1, 0).
struct LinearCorrection {
  double alpha = 1.0;
  double beta = 0.0;

  bool operator==(const LinearCorrection&) const = default;
};

inline constexpr LinearCorrection kIdentityCorrection{};

// Calibrated compute time; never negative.
inline double apply_ctcf(const LinearCorrection& c, double t_compute) {
  return std::max(0.0, c.alpha * t_compute + c.beta);
}

struct PhaseCalibration {
  LinearCorrection coeffs;
  double avg_error_rate = 0.0;  // fraction, not percent
  std::int64_t sample_count = 0;

  bool operator==(const PhaseCalibration&) const = default;
};

// Per-instance coefficients handed to the performance model. Phases without
// stored data fall back to identity and are flagged.
struct CtcfParams {
  std::string instance_name;
  LinearCorrection prefill;
  LinearCorrection decode;
  std::int64_t prefill_samples = 0;
  std::int64_t decode_samples = 0;
  bool prefill_calibrated = false;
  bool decode_calibrated = false;

  bool uncalibrated() const { return !prefill_calibrated || !decode_calibrated; }

  static CtcfParams identity(std::string instance = {}) {
    CtcfParams p;
    p.instance_name = std::move(instance);
    return p;
  }
};

struct ProfilingSample {
  std::string instance_name;
  Phase phase = Phase::kPrefill;
  std::int64_t batch_size = 0;
  double theoretical_s = 0.0;
  double measured_s = 0.0;
};

struct FitResult {
  LinearCorrection coeffs;
  double avg_error_rate = 0.0;
  std::size_t sample_count = 0;
};

inline double ctcf_avg_error_rate(const LinearCorrection& c,
                                  std::span<const ProfilingSample> samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) {
    sum += std::abs(apply_ctcf(c, s.theoretical_s) - s.measured_s) /
           s.measured_s;
  }
  return sum / static_cast<double>(samples.size());
}

// Ordinary least squares of measured_s on theoretical_s.
inline FitResult fit_ctcf(std::span<const ProfilingSample> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "CTCF fit needs at least 2 samples, got " +
                    std::to_string(samples.size()));
  }
  for (const auto& s : samples) {
    if (!(s.theoretical_s > 0.0) || !(s.measured_s > 0.0) ||
        !std::isfinite(s.theoretical_s) || !std::isfinite(s.measured_s)) {
      throw Error(ErrorCode::kSchemaError,
                  "profiling samples must have positive finite times");
    }
  }
  const auto n = static_cast<long double>(samples.size());
  long double mean_x = 0, mean_y = 0;
  for (const auto& s : samples) {
    mean_x += s.theoretical_s;
    mean_y += s.measured_s;
  }
  mean_x /= n;
  mean_y /= n;
  long double sxx = 0, sxy = 0;
  for (const auto& s : samples) {
    long double dx = s.theoretical_s - mean_x;
    sxx += dx * dx;
    sxy += dx * (s.measured_s - mean_y);
  }
  bool distinct = std::any_of(
      samples.begin(), samples.end(), [&](const ProfilingSample& s) {
        return s.theoretical_s != samples.front().theoretical_s;
      });
  if (!distinct || sxx == 0) {
    throw Error(ErrorCode::kDegenerateDesign,
                "CTCF fit needs at least two distinct theoretical times");
  }
  FitResult r;
  long double alpha = sxy / sxx;
  r.coeffs.alpha = static_cast<double>(alpha);
  r.coeffs.beta = static_cast<double>(mean_y - alpha * mean_x);
  r.sample_count = samples.size();
  r.avg_error_rate = ctcf_avg_error_rate(r.coeffs, samples);
  return r;
}

// A measured end-to-end throughput for one (model, batch shape) on one
// instance. When present it replaces the analytic throughput in ranking.
struct MeasuredThroughput {
  std::string model;
  std::int64_t batch_size = 0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  double tps = 0.0;

  bool matches(std::string_view model_name, const WorkloadSpec& w) const {
    return model == model_name && batch_size == w.batch_size &&
           input_tokens == w.input_tokens && output_tokens == w.output_tokens;
  }
  bool operator==(const MeasuredThroughput&) const = default;
};

struct InstanceCalibration {
  std::optional<PhaseCalibration> prefill;
  std::optional<PhaseCalibration> decode;
  std::vector<MeasuredThroughput> measured;

  bool operator==(const InstanceCalibration&) const = default;
};

// Calibration data keyed by instance name. Value type; copies are cheap
// enough for the sizes involved and callers share it immutably.
class CalibrationStore {
 public:
  CalibrationStore() = default;
  explicit CalibrationStore(std::string source) : source_(std::move(source)) {}

  const std::string& source() const { return source_; }
  void set_source(std::string source) { source_ = std::move(source); }
  const std::map<std::string, InstanceCalibration>& entries() const {
    return entries_;
  }
  bool empty() const { return entries_.empty(); }

  void set(const std::string& instance, Phase phase, PhaseCalibration cal) {
    auto& entry = entries_[instance];
    (phase == Phase::kPrefill ? entry.prefill : entry.decode) = cal;
  }

  std::optional<PhaseCalibration> get(std::string_view instance,
                                      Phase phase) const {
    auto it = entries_.find(std::string(instance));
    if (it == entries_.end()) return std::nullopt;
    return phase == Phase::kPrefill ? it->second.prefill : it->second.decode;
  }

  void add_measured(const std::string& instance, MeasuredThroughput m) {
    auto& list = entries_[instance].measured;
    auto it = std::find_if(list.begin(), list.end(), [&](const auto& e) {
      return e.model == m.model && e.batch_size == m.batch_size &&
             e.input_tokens == m.input_tokens &&
             e.output_tokens == m.output_tokens;
    });
    if (it != list.end()) {
      *it = std::move(m);
    } else {
      list.push_back(std::move(m));
    }
  }

  std::optional<double> measured_tps(std::string_view instance,
                                     std::string_view model,
                                     const WorkloadSpec& w) const {
    auto it = entries_.find(std::string(instance));
    if (it == entries_.end()) return std::nullopt;
    for (const auto& m : it->second.measured) {
      if (m.matches(model, w)) return m.tps;
    }
    return std::nullopt;
  }

  CtcfParams params_for(std::string_view instance) const {
    CtcfParams p = CtcfParams::identity(std::string(instance));
    if (auto pre = get(instance, Phase::kPrefill)) {
      p.prefill = pre->coeffs;
      p.prefill_samples = pre->sample_count;
      p.prefill_calibrated = true;
    }
    if (auto dec = get(instance, Phase::kDecode)) {
      p.decode = dec->coeffs;
      p.decode_samples = dec->sample_count;
      p.decode_calibrated = true;
    }
    return p;
  }

  bool operator==(const CalibrationStore& o) const {
    return entries_ == o.entries_;
  }

 private:
  std::map<std::string, InstanceCalibration> entries_;
  std::string source_;
};

namespace detail {

inline nlohmann::json phase_calibration_to_json(const PhaseCalibration& c) {
  return {{"alpha", c.coeffs.alpha},
          {"beta", c.coeffs.beta},
          {"avg_error_rate", c.avg_error_rate},
          {"sample_count", c.sample_count}};
}

inline PhaseCalibration phase_calibration_from_json(const nlohmann::json& j,
                                                    const std::string& where) {
  PhaseCalibration c;
  c.coeffs.alpha = require_number(j, "alpha", where);
  c.coeffs.beta = require_number(j, "beta", where);
  if (!std::isfinite(c.coeffs.alpha) || !std::isfinite(c.coeffs.beta)) {
    throw Error(ErrorCode::kSchemaError, where + ": alpha/beta must be finite",
                where);
  }
  c.avg_error_rate = j.value("avg_error_rate", 0.0);
  c.sample_count = j.value("sample_count", std::int64_t{0});
  return c;
}

}  // namespace detail

// {"<instance>": {"prefill": {...}, "decode": {...}, "measured": [...]}}
inline nlohmann::json calibration_to_json(const CalibrationStore& store) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [name, entry] : store.entries()) {
    nlohmann::json e = nlohmann::json::object();
    if (entry.prefill) {
      e["prefill"] = detail::phase_calibration_to_json(*entry.prefill);
    }
    if (entry.decode) {
      e["decode"] = detail::phase_calibration_to_json(*entry.decode);
    }
    if (!entry.measured.empty()) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& m : entry.measured) {
        list.push_back({{"model", m.model},
                        {"batch_size", m.batch_size},
                        {"input_tokens", m.input_tokens},
                        {"output_tokens", m.output_tokens},
                        {"tps", m.tps}});
      }
      e["measured"] = std::move(list);
    }
    doc[name] = std::move(e);
  }
  return doc;
}

inline CalibrationStore calibration_from_json(const nlohmann::json& doc,
                                              std::string source) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kSchemaError,
                "'" + source + "': calibration store must be a JSON object",
                source);
  }
  CalibrationStore store(source);
  for (const auto& [name, entry] : doc.items()) {
    if (!entry.is_object()) {
      throw Error(ErrorCode::kSchemaError,
                  "'" + source + "': entry '" + name + "' must be an object",
                  name);
    }
    for (Phase phase : {Phase::kPrefill, Phase::kDecode}) {
      auto key = std::string(phase_name(phase));
      if (entry.contains(key)) {
        store.set(name, phase,
                  detail::phase_calibration_from_json(entry.at(key),
                                                      name + "." + key));
      }
    }
    if (entry.contains("measured")) {
      for (const auto& m : entry.at("measured")) {
        MeasuredThroughput mt;
        std::string where = name + ".measured";
        mt.model = detail::require_string(m, "model", where);
        mt.batch_size =
            static_cast<std::int64_t>(detail::require_number(m, "batch_size", where));
        mt.input_tokens = static_cast<std::int64_t>(
            detail::require_number(m, "input_tokens", where));
        mt.output_tokens = static_cast<std::int64_t>(
            detail::require_number(m, "output_tokens", where));
        mt.tps = detail::require_number(m, "tps", where);
        if (!(mt.tps > 0.0)) {
          throw Error(ErrorCode::kNonPositiveValue,
                      where + ": tps must be positive", "tps");
        }
        store.add_measured(name, std::move(mt));
      }
    }
  }
  return store;
}

// Fixture id ("identity", "reference-ctcf", "measured-tps") or a file path. A
// path that does not exist yet yields an empty store, so `calibrate` can
// create new stores.
inline CalibrationStore load_calibration(std::string_view source,
                                         bool allow_missing = false) {
  if (auto fixture = fixtures::calibration_fixture(source)) {
    return calibration_from_json(
        detail::parse_json_document(*fixture, std::string(source)),
        std::string(source));
  }
  std::string path(source);
  if (allow_missing && !std::ifstream(path)) {
    return CalibrationStore(path);
  }
  return calibration_from_json(
      detail::parse_json_document(detail::read_file(path), path), path);
}

inline void save_calibration(const CalibrationStore& store,
                             const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kUnreadableSource, "cannot write '" + path + "'",
                path);
  }
  out << calibration_to_json(store).dump(2) << '\n';
}

struct FittedGroup {
  std::string instance_name;
  Phase phase = Phase::kPrefill;
  FitResult fit;
};

struct IngestReport {
  std::vector<FittedGroup> groups;
  std::vector<std::string> warnings;
};

inline constexpr std::string_view kProfileHeader =
    "instance,phase,batch_size,theoretical_ms,measured_ms";

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace detail

// Parses a profiling CSV. Errors name the 1-based line number.
inline std::vector<ProfilingSample> parse_profile_csv(std::string_view text) {
  std::vector<ProfilingSample> samples;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::kSchemaError,
                  "line " + std::to_string(line_no) + ": " + why,
                  "line " + std::to_string(line_no));
    };
    if (!header_seen) {
      auto cols = detail::split_csv(line);
      std::string joined;
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) joined += ',';
        joined += cols[i];
      }
      if (joined != kProfileHeader) {
        fail("expected header '" + std::string(kProfileHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    auto cols = detail::split_csv(line);
    if (cols.size() != 5) {
      fail("expected 5 columns, got " + std::to_string(cols.size()));
    }
    ProfilingSample s;
    s.instance_name = std::string(cols[0]);
    if (s.instance_name.empty()) fail("empty instance name");
    auto phase = parse_phase(cols[1]);
    if (!phase) fail("phase must be 'prefill' or 'decode'");
    s.phase = *phase;
    auto bs = detail::parse_number<std::int64_t>(cols[2]);
    if (!bs || *bs < 1) fail("batch_size must be a positive integer");
    s.batch_size = *bs;
    auto theo = detail::parse_number<double>(cols[3]);
    auto meas = detail::parse_number<double>(cols[4]);
    if (!theo || !(*theo > 0.0) || !std::isfinite(*theo)) {
      fail("theoretical_ms must be a positive number");
    }
    if (!meas || !(*meas > 0.0) || !std::isfinite(*meas)) {
      fail("measured_ms must be a positive number");
    }
    s.theoretical_s = *theo * kSecondsPerMs;
    s.measured_s = *meas * kSecondsPerMs;
    samples.push_back(std::move(s));
  }
  return samples;
}

// Groups samples by (instance, phase), fits each group and writes the
// results into `store`. The store is only modified if every group fits.
// Instances unknown to `known` (when given) produce a warning but are kept.
inline IngestReport ingest_samples(std::span<const ProfilingSample> samples,
                                   CalibrationStore& store,
                                   const Catalog* known = nullptr) {
  std::map<std::pair<std::string, Phase>, std::vector<ProfilingSample>> groups;
  for (const auto& s : samples) {
    groups[{s.instance_name, s.phase}].push_back(s);
  }
  IngestReport report;
  for (const auto& [key, group] : groups) {
    FitResult fit;
    try {
      fit = fit_ctcf(group);
    } catch (const Error& e) {
      throw Error(e.code(),
                  key.first + "/" + std::string(phase_name(key.second)) +
                      ": " + e.what(),
                  key.first);
    }
    report.groups.push_back({key.first, key.second, fit});
    if (known && !known->find(key.first)) {
      report.warnings.push_back("instance '" + key.first +
                                "' is not in catalog '" + known->source() +
                                "'; stored anyway");
    }
  }
  for (const auto& g : report.groups) {
    store.set(g.instance_name, g.phase,
              PhaseCalibration{g.fit.coeffs, g.fit.avg_error_rate,
                               static_cast<std::int64_t>(g.fit.sample_count)});
  }
  return report;
}

inline IngestReport ingest_profile(const std::string& path,
                                   CalibrationStore& store,
                                   const Catalog* known = nullptr) {
  auto samples = parse_profile_csv(detail::read_file(path));
  return ingest_samples(samples, store, known);
}

}  // namespace vmsolver

#endif  // VMSOLVER_CALIBRATION_HPP_
