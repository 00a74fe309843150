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

// Central finite-difference checks for every backward pass.
//
// Each case builds random inputs, reduces the op output to a scalar through
// a fixed random projection, and compares the analytic gradient of every
// input coordinate against (f(x+h) - f(x-h)) / 2h. Ops with kinks (relu,
// interlace offsets at integers, WARP violation sets) report a signature;
// a case whose perturbations change the signature is redrawn.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tempo/losses.hpp"
#include "tempo/model.hpp"
#include "tempo/ops.hpp"
#include "tempo/temporal.hpp"

namespace tempo {

enum class GradScope { ops, model, all };

inline GradScope parse_grad_scope(std::string_view s) {
  if (s == "ops") return GradScope::ops;
  if (s == "model") return GradScope::model;
  if (s == "all") return GradScope::all;
  fail("unknown gradcheck scope '", s, "' (expected ops, model or all)");
}

struct GradcheckOptions {
  std::size_t cases = 100;
  double step = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
  std::string inject_fault;  ///< name of a check whose analytic gradient is sign-flipped
};

struct GradcheckResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t coordinates = 0;
  std::size_t redraws = 0;
  double max_rel_error = 0.0;
  double seconds = 0.0;
  bool passed = false;
};

/// One seeded case: tensors to perturb, their analytic gradients, and the
/// scalar objective evaluated at the current tensor values.
using Sig = std::vector<std::int64_t>;

struct FdCase {
  std::vector<Tensor*> inputs;
  std::vector<Tensor> analytic;
  /// Objective at the current values; fills the kink signature when asked.
  std::function<double(Sig*)> objective;
  /// Signature at the current values, for ops with kinks.
  std::function<void(Sig&)> signature_of;
  std::vector<std::unique_ptr<Tensor>> storage;

  /// Attaches a signature computed by a separate pass.
  void add_signature(std::function<Sig()> sig) {
    signature_of = [sig](Sig& out) { out = sig(); };
    objective = [obj = objective, sig](Sig* out) {
      const double v = obj(nullptr);
      if (out) *out = sig();
      return v;
    };
  }

  Tensor* own(Tensor t) {
    storage.push_back(std::make_unique<Tensor>(std::move(t)));
    return storage.back().get();
  }
};

namespace detail {

inline Tensor random_tensor(Shape dims, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(dims));
  for (auto& v : t.span()) v = lo + (hi - lo) * uniform01(rng);
  return t;
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hi - lo + 1)),
                       hi - lo);
}

inline double project(const Tensor& y, const Tensor& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
  return s;
}

// |a - n| / max(|a|, |n|, floor); the floor keeps vanishing gradients from
// turning rounding noise into large relative errors.
inline double rel_error(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-3});
}

// Max relative error over all coordinates, or -1 if a perturbation crossed
// a kink.
inline double run_case(FdCase& c, double h, bool flip, std::size_t& coords) {
  Sig base, probe;
  Sig* want = c.signature_of ? &probe : nullptr;
  if (c.signature_of) c.signature_of(base);
  double worst = 0.0;
  for (std::size_t k = 0; k < c.inputs.size(); ++k) {
    Tensor& x = *c.inputs[k];
    const Tensor& g = c.analytic[k];
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double orig = x[i];
      x[i] = orig + h;
      const double fp = c.objective(want);
      const bool kp = want && probe != base;
      x[i] = orig - h;
      const double fm = c.objective(want);
      const bool km = want && probe != base;
      x[i] = orig;
      if (kp || km) return -1.0;
      const double numeric = (fp - fm) / (2.0 * h);
      const double analytic = flip ? -g[i] : g[i];
      worst = std::max(worst, rel_error(analytic, numeric));
      ++coords;
    }
  }
  return worst;
}

// ----- case builders --------------------------------------------------------

inline FdCase conv2d_case(std::mt19937_64& rng) {
  FdCase c;
  const std::size_t N = pick(rng, 1, 2), Ci = pick(rng, 1, 3), Co = pick(rng, 1, 3);
  const std::size_t K = pick(rng, 1, 3), H = pick(rng, K, 5), W = pick(rng, K, 5);
  const Conv2dOptions opt{pick(rng, 1, 2), pick(rng, 0, 1)};
  Tensor* x = c.own(random_tensor({N, Ci, H, W}, rng));
  Tensor* k = c.own(random_tensor({Co, Ci, K, K}, rng));
  Tensor* b = c.own(random_tensor({Co}, rng));
  const Tensor y = conv2d(*x, *k, *b, opt);
  Tensor* r = c.own(random_tensor(y.dims(), rng));
  auto g = conv2d_backward(*x, *k, *r, opt);
  c.inputs = {x, k, b};
  c.analytic = {g.input, g.kernel, g.bias};
  c.objective = [=](Sig*) { return project(conv2d(*x, *k, *b, opt), *r); };
  return c;
}

inline FdCase linear_case(std::mt19937_64& rng) {
  FdCase c;
  const std::size_t N = pick(rng, 1, 4), I = pick(rng, 1, 6), O = pick(rng, 1, 5);
  Tensor* x = c.own(random_tensor({N, I}, rng));
  Tensor* w = c.own(random_tensor({O, I}, rng));
  Tensor* b = c.own(random_tensor({O}, rng));
  Tensor* r = c.own(random_tensor({N, O}, rng));
  auto g = linear_backward(*x, *w, *r);
  c.inputs = {x, w, b};
  c.analytic = {g.input, g.weight, g.bias};
  c.objective = [=](Sig*) { return project(linear(*x, *w, *b), *r); };
  return c;
}

inline FdCase activation_case(std::mt19937_64& rng, Activation kind) {
  FdCase c;
  Tensor* x = c.own(random_tensor({pick(rng, 1, 3), pick(rng, 1, 8)}, rng, -4.0, 4.0));
  Tensor* r = c.own(random_tensor(x->dims(), rng));
  const Tensor y = activation(*x, kind);
  c.inputs = {x};
  c.analytic = {activation_backward(*x, y, *r, kind)};
  c.objective = [=](Sig*) { return project(activation(*x, kind), *r); };
  if (kind == Activation::relu) {
    c.add_signature([=] {
      Sig s;
      for (double v : x->values()) s.push_back(v > 0.0);
      return s;
    });
  }
  return c;
}

inline FdCase pool_case(std::mt19937_64& rng) {
  FdCase c;
  Tensor* x = c.own(random_tensor(
      {pick(rng, 1, 2), pick(rng, 1, 3), pick(rng, 1, 3), pick(rng, 1, 4), pick(rng, 1, 4)}, rng));
  const Tensor y = global_avg_pool_spatial(*x);
  Tensor* r = c.own(random_tensor(y.dims(), rng));
  c.inputs = {x};
  c.analytic = {global_avg_pool_spatial_backward(x->dims(), *r)};
  c.objective = [=](Sig*) { return project(global_avg_pool_spatial(*x), *r); };
  return c;
}

inline FdCase dropout_case(std::mt19937_64& rng) {
  FdCase c;
  Tensor* x = c.own(random_tensor({pick(rng, 1, 4), pick(rng, 1, 8)}, rng));
  Tensor* r = c.own(random_tensor(x->dims(), rng));
  const double rate = 0.5 * uniform01(rng);
  const std::uint64_t seed = rng();
  const Tensor mask = dropout_mask(x->dims(), rate, seed);
  Tensor g = *r;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= mask[i];
  c.inputs = {x};
  c.analytic = {g};
  c.objective = [=](Sig*) { return project(dropout(*x, rate, seed, true), *r); };
  return c;
}

inline FdCase interlace_case(std::mt19937_64& rng) {
  FdCase c;
  const std::size_t N = pick(rng, 1, 2), T = pick(rng, 2, 6), G = pick(rng, 1, 3);
  const std::size_t C = G * pick(rng, 1, 2), H = pick(rng, 1, 2), W = pick(rng, 1, 2);
  const double dmax = static_cast<double>(T) / 2.0;
  const GroupSpec groups = GroupSpec::even(C, G);
  Tensor* x = c.own(random_tensor({N, T, C, H, W}, rng));
  Tensor* off = c.own(random_tensor({N, G}, rng, -0.95 * dmax, 0.95 * dmax));
  for (double& o : off->span())
    if (std::abs(o - std::round(o)) < 1e-3) o = std::round(o) + (o < std::round(o) ? -2e-3 : 2e-3);
  Tensor* wt = c.own(random_tensor({N, G, T}, rng, 0.0, 2.0));
  Tensor* r = c.own(random_tensor(x->dims(), rng));
  auto g = interlace_backward(*x, groups, InterlaceParams{*off, *wt}, dmax, *r);
  c.inputs = {x, off, wt};
  c.analytic = {g.input, g.offsets, g.weights};
  c.objective = [=](Sig*) {
    return project(interlace_forward(*x, groups, InterlaceParams{*off, *wt}, dmax), *r);
  };
  c.add_signature([=] {
    Sig s;
    for (double o : off->values()) s.push_back(static_cast<std::int64_t>(std::floor(o)));
    return s;
  });
  return c;
}

inline FdCase tsm_case(std::mt19937_64& rng) {
  FdCase c;
  Tensor* x = c.own(random_tensor(
      {pick(rng, 1, 2), pick(rng, 1, 5), pick(rng, 2, 8), pick(rng, 1, 2), pick(rng, 1, 2)}, rng));
  const ShiftSpec spec{0.125 + 0.125 * uniform01(rng)};
  Tensor* r = c.own(random_tensor(x->dims(), rng));
  c.inputs = {x};
  c.analytic = {tsm_shift_backward(*r, spec)};
  c.objective = [=](Sig*) { return project(tsm_shift(*x, spec), *r); };
  return c;
}

inline FdCase consensus_case(std::mt19937_64& rng) {
  FdCase c;
  const std::size_t K = pick(rng, 1, 6);
  Tensor* x = c.own(random_tensor({pick(rng, 1, 3), K, pick(rng, 1, 5)}, rng));
  const Tensor y = segment_consensus(*x);
  Tensor* r = c.own(random_tensor(y.dims(), rng));
  c.inputs = {x};
  c.analytic = {segment_consensus_backward(K, *r)};
  c.objective = [=](Sig*) { return project(segment_consensus(*x), *r); };
  return c;
}

inline Tensor random_targets(Shape dims, std::mt19937_64& rng) {
  Tensor y(std::move(dims));
  for (auto& v : y.span()) v = uniform01(rng) < 0.4 ? 1.0 : 0.0;
  return y;
}

inline FdCase loss_case(std::mt19937_64& rng, LossKind kind) {
  FdCase c;
  const std::size_t N = pick(rng, 1, 4), C = pick(rng, 2, 6);
  Tensor* z = c.own(random_tensor({N, C}, rng, -3.0, 3.0));
  const Tensor y = random_targets({N, C}, rng);
  LossConfig cfg;
  cfg.kind = kind;
  cfg.scale = kind == LossKind::bce ? 160.0 : 1.0;
  if (kind == LossKind::bce)
    for (std::size_t i = 0; i < C; ++i) cfg.class_weights.push_back(0.5 + uniform01(rng));
  cfg.margin = 1.0;
  c.inputs = {z};
  c.analytic = {compute_loss(*z, y, cfg).grad};
  c.objective = [=](Sig*) { return compute_loss(*z, y, cfg).value; };
  if (kind == LossKind::warp) {
    c.add_signature([=] {
      Sig s;
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t p = 0; p < C; ++p)
          for (std::size_t q = 0; q < C; ++q)
            if (y[n * C + p] == 1.0 && y[n * C + q] == 0.0)
              s.push_back((*z)[n * C + q] + cfg.margin > (*z)[n * C + p]);
      return s;
    });
  }
  return c;
}

// Small model config used by the offset-net and micro-model checks.
inline ModelConfig micro_config(std::mt19937_64& rng, TemporalMode mode) {
  ModelConfig m;
  m.temporal_mode = mode;
  m.frames = pick(rng, 2, 4);
  m.height = m.width = pick(rng, 4, 6);
  m.in_channels = pick(rng, 1, 2);
  m.channels = {2, 4};
  m.num_blocks = 2;
  m.num_groups = 2;
  m.fold = 0.25;
  m.num_classes = 3;
  m.hidden = 4;
  m.stem_stride = 1;
  m.dropout = 0.3;
  return m;
}

// Heads start at zero, which parks every offset on an integer kink.
inline void randomize_heads(ParamStore& ps, std::mt19937_64& rng) {
  for (auto& [name, gp] : ps.entries())
    if (name.find(".head.") != std::string::npos)
      for (auto& v : gp.value.span()) v = 0.5 * (2.0 * uniform01(rng) - 1.0);
}

inline std::vector<std::int64_t> relu_signs(const Tensor& t) {
  Sig s;
  for (double v : t.values()) s.push_back(v > 0.0);
  return s;
}

inline void bind_params(FdCase& c, ParamStore& ps) {
  for (auto& [name, gp] : ps.entries()) {
    c.inputs.push_back(&gp.value);
    c.analytic.push_back(gp.grad);
  }
}

inline FdCase offset_net_case(std::mt19937_64& rng) {
  FdCase c;
  const ModelConfig m = micro_config(rng, TemporalMode::tin);
  auto ps = std::make_shared<ParamStore>(init_params(m, rng()));
  randomize_heads(*ps, rng);
  const std::string prefix = "block0.";
  Tensor* feat = c.own(random_tensor({pick(rng, 1, 2), m.frames, 4, 2, 2}, rng));
  OffsetNetCache cache;
  const InterlaceParams ip = offset_weight_net_forward(*feat, *ps, m, prefix, &cache);
  Tensor* ro = c.own(random_tensor(ip.offsets.dims(), rng));
  Tensor* rw = c.own(random_tensor(ip.weights.dims(), rng));
  ps->zero_grad();
  const Tensor dfeat = offset_weight_net_backward(*ps, m, prefix, cache, *ro, *rw);
  c.inputs = {feat};
  c.analytic = {dfeat};
  for (auto& [name, gp] : ps->entries()) {
    if (!name.starts_with(prefix + "offset.") && !name.starts_with(prefix + "weight.")) continue;
    c.inputs.push_back(&gp.value);
    c.analytic.push_back(gp.grad);
  }
  c.objective = [=](Sig*) {
    const InterlaceParams p = offset_weight_net_forward(*feat, *ps, m, prefix);
    return project(p.offsets, *ro) + project(p.weights, *rw);
  };
  c.add_signature([=] {
    OffsetNetCache k;
    offset_weight_net_forward(*feat, *ps, m, prefix, &k);
    return relu_signs(k.hidden_pre);
  });
  return c;
}

inline FdCase model_case(std::mt19937_64& rng, TemporalMode mode) {
  FdCase c;
  const ModelConfig m = micro_config(rng, mode);
  auto ps = std::make_shared<ParamStore>(init_params(m, rng()));
  randomize_heads(*ps, rng);
  Tensor* clip = c.own(random_tensor({pick(rng, 1, 2), m.frames, m.in_channels, m.height, m.width},
                                     rng, 0.0, 1.0));
  const std::uint64_t seed = rng();
  ForwardCache fc;
  const Tensor logits = backbone_forward(*clip, *ps, m, true, seed, &fc);
  Tensor* r = c.own(random_tensor(logits.dims(), rng));
  ps->zero_grad();
  const Tensor dclip = backbone_backward(*ps, m, fc, *r);
  c.inputs = {clip};
  c.analytic = {dclip};
  bind_params(c, *ps);
  c.objective = [=](Sig* sig) {
    ForwardCache k;
    const double v = project(backbone_forward(*clip, *ps, m, true, seed, sig ? &k : nullptr), *r);
    if (sig) *sig = kink_signature(k);
    return v;
  };
  c.signature_of = [=](Sig& sig) {
    ForwardCache k;
    backbone_forward(*clip, *ps, m, true, seed, &k);
    sig = kink_signature(k);
  };
  return c;
}

}  // namespace detail

struct GradCheck {
  std::string name;
  GradScope scope;
  std::function<FdCase(std::mt19937_64&)> make;
};

inline std::vector<GradCheck> gradient_checks() {
  using namespace detail;
  const auto ops = GradScope::ops, model = GradScope::model;
  return {
      {"conv2d", ops, conv2d_case},
      {"linear", ops, linear_case},
      {"relu", ops, [](auto& r) { return activation_case(r, Activation::relu); }},
      {"sigmoid", ops, [](auto& r) { return activation_case(r, Activation::sigmoid); }},
      {"tanh", ops, [](auto& r) { return activation_case(r, Activation::tanh); }},
      {"global_avg_pool", ops, pool_case},
      {"dropout", ops, dropout_case},
      {"interlace", ops, interlace_case},
      {"tsm_shift", ops, tsm_case},
      {"segment_consensus", ops, consensus_case},
      {"bce_scaled", ops, [](auto& r) { return loss_case(r, LossKind::bce); }},
      {"lsep", ops, [](auto& r) { return loss_case(r, LossKind::lsep); }},
      {"warp", ops, [](auto& r) { return loss_case(r, LossKind::warp); }},
      {"offset_weight_net", ops, offset_net_case},
      {"model_none", model, [](auto& r) { return model_case(r, TemporalMode::none); }},
      {"model_tsm", model, [](auto& r) { return model_case(r, TemporalMode::tsm); }},
      {"model_tin", model, [](auto& r) { return model_case(r, TemporalMode::tin); }},
  };
}

namespace detail {

inline std::uint64_t name_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ull;
  return h;
}

}  // namespace detail

inline GradcheckResult run_gradcheck(const GradCheck& check, const GradcheckOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  GradcheckResult res;
  res.name = check.name;
  std::mt19937_64 rng(mix_seed(opt.seed, detail::name_hash(check.name)));
  const bool flip = opt.inject_fault == check.name;
  const std::size_t max_draws = opt.cases * 20;
  for (std::size_t draw = 0; res.cases < opt.cases && draw < max_draws; ++draw) {
    FdCase c = check.make(rng);
    const double err = detail::run_case(c, opt.step, flip, res.coordinates);
    if (err < 0.0) {
      ++res.redraws;
      continue;
    }
    res.max_rel_error = std::max(res.max_rel_error, err);
    ++res.cases;
  }
  res.passed = res.cases == opt.cases && res.max_rel_error <= opt.tolerance;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline std::vector<GradcheckResult> run_gradchecks(GradScope scope, const GradcheckOptions& opt) {
  std::vector<GradcheckResult> out;
  for (const auto& check : gradient_checks())
    if (scope == GradScope::all || check.scope == scope) out.push_back(run_gradcheck(check, opt));
  return out;
}

}  // namespace tempo
