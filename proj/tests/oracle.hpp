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

// Independent reference implementations used by the tests. Written from the
// formulas, not from the library, and in a different arithmetic style
// (unsigned 128-bit, long double, Eigen QR) so shared mistakes are unlikely.

#ifndef VMSOLVER_TESTS_ORACLE_HPP_
#define VMSOLVER_TESTS_ORACLE_HPP_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using u128 = unsigned __int128;

struct Model {
  std::int64_t params, h1, h2, heads, head_dim, layers, prec;
};

struct Shape {
  std::int64_t bs, lin, lout;
};

struct Memory {
  u128 model, kv_layer, kv, act, base, total;
};

inline Memory memory(const Model& m, const Shape& s) {
  Memory r{};
  const u128 seq = static_cast<u128>(s.lin) + static_cast<u128>(s.lout);
  r.model = static_cast<u128>(m.prec) * static_cast<u128>(m.params);
  // K and V, each heads*head_dim wide, for every token of every sequence.
  r.kv_layer = u128{2} * static_cast<u128>(m.prec) *
               static_cast<u128>(m.heads) * static_cast<u128>(m.head_dim) *
               seq * static_cast<u128>(s.bs);
  r.kv = r.kv_layer * static_cast<u128>(m.layers);
  r.act = static_cast<u128>(s.bs) * seq * static_cast<u128>(m.h1) *
          static_cast<u128>(m.prec);
  r.base = r.model + r.act;
  r.total = r.base + r.kv;
  return r;
}

enum class Verdict { kFits, kPartial, kUnsuitable };

struct Classified {
  std::string name;
  double price;
  Verdict verdict;
  long long offloaded;  // bytes of KV off the GPU
  double c_off;
};

// Straight transcription of the memory check on one instance.
inline Classified classify(const std::string& name, double price,
                           long long gpu, long long model, long long base,
                           long long kv, long long kv_layer) {
  Classified c{name, price, Verdict::kUnsuitable, 0, 0.0};
  const long long total = base + kv;
  if (gpu >= total) {
    c.verdict = Verdict::kFits;
    return c;
  }
  if (gpu < model) return c;
  const long long avail = gpu - base;
  if (avail < kv_layer) return c;
  c.verdict = Verdict::kPartial;
  c.offloaded = kv - avail;
  c.c_off = static_cast<double>(c.offloaded) / static_cast<double>(kv);
  return c;
}

// Brute force: classify everything under the cap, keep the suitable ones and
// order them by selection sort on (price, name).
inline std::vector<Classified> candidates(std::vector<Classified> all,
                                          const std::vector<double>& prices,
                                          double p_max) {
  std::vector<Classified> kept;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (prices[i] <= p_max && all[i].verdict != Verdict::kUnsuitable) {
      kept.push_back(all[i]);
    }
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      const auto& a = kept[j];
      const auto& b = kept[best];
      if (a.price < b.price || (a.price == b.price && a.name < b.name)) {
        best = j;
      }
    }
    std::swap(kept[i], kept[best]);
  }
  return kept;
}

struct Perf {
  long double pre_compute, pre_transfer, pre_layer;
  long double dec_compute, dec_transfer, dec_layer;
  long double t_task, tps;
};

// Per-layer FLOP counts expanded term by term, identity correction.
inline Perf perf(const Model& m, const Shape& s, long double flops,
                 long double bw_g2c, long double bw_c2g, long double c_off) {
  const long double bs = s.bs, lin = s.lin, lout = s.lout;
  const long double h1 = m.h1, h2 = m.h2, prec = m.prec;
  Perf p{};
  const long double qkvo = 4 * 2 * lin * h1 * h1;  // four h1 x h1 projections
  const long double mlp = 2 * 2 * lin * h1 * h2;   // up and down
  const long double attn = 2 * 2 * lin * lin * h1;  // scores and weighted sum
  p.pre_compute = bs * (qkvo + mlp + attn) / flops;
  p.pre_transfer = c_off * bs * 2 * (lin + 1) * h1 * prec / bw_g2c;
  p.pre_layer = std::max(p.pre_compute, p.pre_transfer);

  const long double ctx = lin + lout / 2;
  p.dec_compute = bs * (8 * h1 * h1 + 4 * h1 * h2 + 4 * ctx * h1) / flops;
  p.dec_transfer = bs * h1 * prec * (2 * c_off * (lin + 1) + lout) / bw_c2g;
  p.dec_layer = p.dec_compute + p.dec_transfer;

  p.t_task = m.layers * (p.pre_layer + (lout - 1) * p.dec_layer);
  p.tps = bs * (lin + lout) / p.t_task;
  return p;
}

struct Line {
  double alpha, beta, sse;
};

// Least squares via column-pivoting QR on the [x 1] design matrix.
inline Line ols(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = x[static_cast<std::size_t>(i)];
    a(i, 1) = 1.0;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  Line l{coef(0), coef(1), (a * coef - b).squaredNorm()};
  return l;
}

inline double sse(double alpha, double beta, const std::vector<double>& x,
                  const std::vector<double>& y) {
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double r = static_cast<long double>(alpha) * x[i] + beta - y[i];
    s += r * r;
  }
  return static_cast<double>(s);
}

}  // namespace oracle

#endif  // VMSOLVER_TESTS_ORACLE_HPP_
