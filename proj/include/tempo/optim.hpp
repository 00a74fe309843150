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

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "tempo/model.hpp"
#include "tempo/tensor.hpp"

namespace tempo {

struct SgdConfig {
  double base_lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 5e-4;

  void validate() const {
    require(base_lr > 0.0, "sgd: base_lr must be positive");
    require(momentum >= 0.0 && momentum < 1.0, "sgd: momentum must be in [0,1)");
    require(weight_decay >= 0.0, "sgd: weight_decay must be nonnegative");
  }
};

enum class ScheduleKind { constant, cosine, step };

inline ScheduleKind parse_schedule_kind(std::string_view s) {
  if (s == "constant") return ScheduleKind::constant;
  if (s == "cosine") return ScheduleKind::cosine;
  if (s == "step") return ScheduleKind::step;
  fail("unknown schedule '", s, "' (expected constant, cosine or step)");
}

inline std::string_view to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::cosine: return "cosine";
    case ScheduleKind::step: return "step";
  }
  return "?";
}

struct Schedule {
  ScheduleKind kind = ScheduleKind::cosine;
  long max_iter = 1;                ///< cosine horizon
  std::vector<long> milestones;     ///< step boundaries, strictly increasing
  double factor = 0.1;              ///< step multiplier
  long warmup_iters = 0;
  double warmup_start_factor = 0.1;

  void validate() const {
    if (kind == ScheduleKind::cosine) require(max_iter >= 1, "schedule: max_iter must be >= 1");
    if (kind == ScheduleKind::step) {
      require(factor > 0.0 && factor < 1.0, "schedule: step factor must be in (0,1)");
      for (std::size_t i = 1; i < milestones.size(); ++i)
        require(milestones[i] > milestones[i - 1], "schedule: milestones must be increasing");
    }
    require(warmup_iters >= 0, "schedule: warmup_iters must be nonnegative");
  }
};

namespace detail {

inline double scheduled_lr(const Schedule& s, double eta, long k) {
  switch (s.kind) {
    case ScheduleKind::constant: return eta;
    case ScheduleKind::cosine: {
      if (k >= s.max_iter) return 0.0;
      const double frac = static_cast<double>(k) / static_cast<double>(s.max_iter);
      return eta * 0.5 * (std::cos(frac * std::numbers::pi) + 1.0);
    }
    case ScheduleKind::step: {
      double lr = eta;
      for (long m : s.milestones)
        if (k >= m) lr *= s.factor;
      return lr;
    }
  }
  return eta;
}

}  // namespace detail

/// Learning rate at iteration (or epoch) k. During warmup the rate ramps
/// linearly from start_factor * eta to the schedule's own value at the end
/// of warmup, so there is no jump at the boundary.
inline double lr_at(const Schedule& s, const SgdConfig& cfg, long k) {
  require(k >= 0, "lr_at: iteration must be nonnegative");
  if (s.warmup_iters > 0 && k < s.warmup_iters) {
    const double start = s.warmup_start_factor * cfg.base_lr;
    const double end = detail::scheduled_lr(s, cfg.base_lr, s.warmup_iters);
    return start + (end - start) * static_cast<double>(k) / static_cast<double>(s.warmup_iters);
  }
  return detail::scheduled_lr(s, cfg.base_lr, k);
}

/// Per-parameter velocity buffers, aligned with a ParamStore by name.
struct SgdState {
  ParamStore velocity;

  static SgdState zeros_like(const ParamStore& params) {
    SgdState s;
    for (const auto& [name, gp] : params.entries()) s.velocity.add(name, Tensor(gp.value.dims()));
    return s;
  }
};

/// g' = g + wd * w;  v = m * v + g';  w -= lr * v
inline void sgd_step(ParamStore& params, const SgdConfig& cfg, double lr, SgdState& state) {
  if (state.velocity.size() == 0) state = SgdState::zeros_like(params);
  require(state.velocity.size() == params.size(), "sgd: state does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& [name, gp] = params.entries()[i];
    auto& [vname, vp] = state.velocity.entries()[i];
    require(name == vname && vp.value.dims() == gp.value.dims(),
            "sgd: velocity slot mismatch at '", name, "'");
    Tensor& w = gp.value;
    const Tensor& g = gp.grad;
    Tensor& v = vp.value;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gd = g[j] + cfg.weight_decay * w[j];
      v[j] = cfg.momentum * v[j] + gd;
      w[j] -= lr * v[j];
    }
  }
}

}  // namespace tempo
