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

#ifndef VMSOLVER_UNITS_HPP_
#define VMSOLVER_UNITS_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "vmsolver/error.hpp"

namespace vmsolver {

// Memory quantities are exact byte counts. Signed so that available memory
// can go negative for instances that cannot even hold the base footprint.
using Bytes = std::int64_t;

inline constexpr double kBytesPerGB = 1e9;
inline constexpr double kFlopsPerTFlops = 1e12;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerMs = 1e-3;

// GB means 10^9 bytes throughout (catalog files included).
inline Bytes gb_to_bytes(double gb) {
  return static_cast<Bytes>(std::llround(gb * kBytesPerGB));
}
inline double bytes_to_gb(Bytes bytes) {
  return static_cast<double>(bytes) / kBytesPerGB;
}

namespace detail {

inline Bytes narrow_or_throw(__int128 value, const char* what) {
  if (value > std::numeric_limits<Bytes>::max() ||
      value < std::numeric_limits<Bytes>::min()) {
    throw Error(ErrorCode::kOverflow,
                std::string(what) + " exceeds the representable byte range",
                what);
  }
  return static_cast<Bytes>(value);
}

}  // namespace detail

// Product of non-negative integer factors, checked against int64 overflow.
template <typename... Ts>
Bytes checked_product(const char* what, Ts... factors) {
  __int128 acc = 1;
  bool overflow = false;
  auto step = [&](__int128 f) {
    acc *= f;
    // 2^100 is far above int64 and far below int128, so one check per
    // factor keeps the accumulator from wrapping.
    if (acc > (static_cast<__int128>(1) << 100) ||
        acc < -(static_cast<__int128>(1) << 100)) {
      overflow = true;
      acc = 0;
    }
  };
  (step(static_cast<__int128>(factors)), ...);
  if (overflow) {
    throw Error(ErrorCode::kOverflow,
                std::string(what) + " exceeds the representable byte range",
                what);
  }
  return detail::narrow_or_throw(acc, what);
}

inline Bytes checked_add(const char* what, Bytes a, Bytes b) {
  return detail::narrow_or_throw(static_cast<__int128>(a) + b, what);
}

}  // namespace vmsolver

#endif  // VMSOLVER_UNITS_HPP_
