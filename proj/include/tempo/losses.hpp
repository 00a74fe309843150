// Copyright 2026 The Tempo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Multi-label losses over [N,C] logits/scores with 0/1 targets. Every loss
// returns its value together with the gradient w.r.t. its input.

#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "tempo/tensor.hpp"

namespace tempo {

enum class LossKind { bce, lsep, warp };
enum class WeightRule { none, ratio, sqrt_ratio, inv_ratio, inv_sqrt_ratio };

inline LossKind parse_loss_kind(std::string_view s) {
  if (s == "bce") return LossKind::bce;
  if (s == "lsep") return LossKind::lsep;
  if (s == "warp") return LossKind::warp;
  fail("unknown loss kind '", s, "' (expected bce, lsep or warp)");
}

inline std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::bce: return "bce";
    case LossKind::lsep: return "lsep";
    case LossKind::warp: return "warp";
  }
  return "?";
}

inline WeightRule parse_weight_rule(std::string_view s) {
  if (s == "none") return WeightRule::none;
  if (s == "ratio") return WeightRule::ratio;
  if (s == "sqrt_ratio") return WeightRule::sqrt_ratio;
  if (s == "inv_ratio") return WeightRule::inv_ratio;
  if (s == "inv_sqrt_ratio") return WeightRule::inv_sqrt_ratio;
  fail("unknown weight_rule '", s, "'");
}

inline std::string_view to_string(WeightRule r) {
  switch (r) {
    case WeightRule::none: return "none";
    case WeightRule::ratio: return "ratio";
    case WeightRule::sqrt_ratio: return "sqrt_ratio";
    case WeightRule::inv_ratio: return "inv_ratio";
    case WeightRule::inv_sqrt_ratio: return "inv_sqrt_ratio";
  }
  return "?";
}

struct LossConfig {
  LossKind kind = LossKind::bce;
  double scale = 160.0;
  std::vector<double> class_weights;  ///< empty means all ones (bce only)
  WeightRule weight_rule = WeightRule::none;
  double margin = 1.0;  ///< warp only

  void validate() const {
    require(scale > 0.0, "loss: scale must be positive, got ", scale);
    for (double w : class_weights) require(w > 0.0, "loss: class weights must be positive");
  }
};

struct LossResult {
  double value = 0.0;
  Tensor grad;
};

/// Per-class sample counts.
struct ClassStats {
  std::vector<double> counts;

  double mean() const {
    require(!counts.empty(), "ClassStats: no classes");
    double s = 0.0;
    for (double c : counts) s += c;
    return s / static_cast<double>(counts.size());
  }
};

inline std::vector<double> class_weights(const ClassStats& stats, WeightRule rule) {
  std::vector<double> w(stats.counts.size(), 1.0);
  if (rule == WeightRule::none) return w;
  const double mean = stats.mean();
  require(mean > 0.0, "class_weights: mean class count must be positive");
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double n = stats.counts[i];
    require(n > 0.0, "class_weights: class ", i, " has zero samples");
    switch (rule) {
      case WeightRule::ratio: w[i] = n / mean; break;
      case WeightRule::sqrt_ratio: w[i] = std::sqrt(n / mean); break;
      case WeightRule::inv_ratio: w[i] = mean / n; break;
      case WeightRule::inv_sqrt_ratio: w[i] = std::sqrt(mean / n); break;
      case WeightRule::none: break;
    }
  }
  return w;
}

namespace detail {

inline void check_targets(const Tensor& scores, const Tensor& targets, const char* who) {
  require(scores.rank() == 2, who, ": scores must be [N,C], got ", shape_str(scores.dims()));
  require(targets.dims() == scores.dims(), who, ": targets shape ",
          shape_str(targets.dims()), " does not match ", shape_str(scores.dims()));
  for (std::size_t i = 0; i < targets.size(); ++i)
    require(targets[i] == 0.0 || targets[i] == 1.0, who, ": target ", targets[i],
            " at flat index ", i, " is not binary");
}

}  // namespace detail

/// scale * mean_{n,c} w_c * BCE(sigmoid(z), y), via the softplus form.
inline LossResult bce_scaled(const Tensor& logits, const Tensor& targets,
                             const LossConfig& cfg) {
  detail::check_targets(logits, targets, "bce");
  cfg.validate();
  const std::size_t N = logits.dim(0), C = logits.dim(1);
  require(cfg.class_weights.empty() || cfg.class_weights.size() == C, "bce: ",
          cfg.class_weights.size(), " class weights for ", C, " classes");
  const double denom = static_cast<double>(N * C);
  LossResult r{0.0, Tensor(logits.dims())};
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t i = n * C + c;
      const double z = logits[i], y = targets[i];
      const double w = cfg.class_weights.empty() ? 1.0 : cfg.class_weights[c];
      const double term = std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
      total += w * term;
      const double p = 1.0 / (1.0 + std::exp(-z));
      r.grad[i] = cfg.scale * w * (p - y) / denom;
    }
  }
  r.value = cfg.scale * (total / denom);
  return r;
}

/// Mean over samples of log(1 + sum_{p in pos, n in neg} exp(s_n - s_p)).
/// Samples without both a positive and a negative contribute zero.
inline LossResult lsep(const Tensor& scores, const Tensor& targets) {
  detail::check_targets(scores, targets, "lsep");
  const std::size_t N = scores.dim(0), C = scores.dim(1);
  LossResult r{0.0, Tensor(scores.dims())};
  std::vector<std::size_t> pos, neg;
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double* s = scores.data() + n * C;
    const double* y = targets.data() + n * C;
    pos.clear();
    neg.clear();
    for (std::size_t c = 0; c < C; ++c) (y[c] == 1.0 ? pos : neg).push_back(c);
    if (pos.empty() || neg.empty()) continue;
    double m = 0.0;
    for (auto p : pos)
      for (auto q : neg) m = std::max(m, s[q] - s[p]);
    double acc = 0.0;
    for (auto p : pos)
      for (auto q : neg) acc += std::exp(s[q] - s[p] - m);
    // m == 0: log1p keeps precision when every pair is well separated
    const double loss = m == 0.0 ? std::log1p(acc) : m + std::log(std::exp(-m) + acc);
    const double denom = std::exp(-m) + acc;
    total += loss;
    double* g = r.grad.data() + n * C;
    for (auto p : pos) {
      for (auto q : neg) {
        const double e = std::exp(s[q] - s[p] - m) / denom / static_cast<double>(N);
        g[q] += e;
        g[p] -= e;
      }
    }
  }
  r.value = total / static_cast<double>(N);
  return r;
}

/// Exact-rank WARP: for each positive p with r violating negatives
/// (s_n + margin > s_p), adds H(r)/r * sum of hinge violations where
/// H(r) = 1 + 1/2 + ... + 1/r. Mean over samples.
inline LossResult warp(const Tensor& scores, const Tensor& targets, double margin = 1.0) {
  detail::check_targets(scores, targets, "warp");
  const std::size_t N = scores.dim(0), C = scores.dim(1);
  LossResult r{0.0, Tensor(scores.dims())};
  const double invn = 1.0 / static_cast<double>(N);
  std::vector<std::size_t> neg, viol;
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double* s = scores.data() + n * C;
    const double* y = targets.data() + n * C;
    double* g = r.grad.data() + n * C;
    neg.clear();
    for (std::size_t c = 0; c < C; ++c)
      if (y[c] == 0.0) neg.push_back(c);
    for (std::size_t p = 0; p < C; ++p) {
      if (y[p] != 1.0) continue;
      viol.clear();
      for (auto q : neg)
        if (s[q] + margin > s[p]) viol.push_back(q);
      if (viol.empty()) continue;
      const std::size_t rank = viol.size();
      double harmonic = 0.0;
      for (std::size_t j = 1; j <= rank; ++j) harmonic += 1.0 / static_cast<double>(j);
      const double coef = harmonic / static_cast<double>(rank);
      double hinge = 0.0;
      for (auto q : viol) {
        hinge += margin - s[p] + s[q];
        g[q] += coef * invn;
      }
      g[p] -= coef * static_cast<double>(rank) * invn;
      total += coef * hinge;
    }
  }
  r.value = total * invn;
  return r;
}

/// Dispatch on cfg.kind. The scale factor multiplies every kind; class
/// weights apply to bce only.
inline LossResult compute_loss(const Tensor& logits, const Tensor& targets,
                               const LossConfig& cfg) {
  cfg.validate();
  LossResult r;
  switch (cfg.kind) {
    case LossKind::bce: return bce_scaled(logits, targets, cfg);
    case LossKind::lsep: r = lsep(logits, targets); break;
    case LossKind::warp: r = warp(logits, targets, cfg.margin); break;
  }
  r.value *= cfg.scale;
  r.grad *= cfg.scale;
  return r;
}

}  // namespace tempo
