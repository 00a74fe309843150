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

// Toy residual video backbone with a pluggable temporal module per block.
//
//   clip [N,T,C_in,H,W]
//     -> stem conv3x3 (stride cfg.stem_stride) -> relu
//     -> blocks: x -> temporal(x) -> conv3x3 -> relu -> conv3x3 (+ skip) -> relu
//     -> spatial mean -> mean over T -> dropout -> linear -> logits [N,K]
//
// The temporal module is one of: nothing, a TSM shift, or interlacing driven
// by an offset/weight generator that reads the block input.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tempo/ops.hpp"
#include "tempo/temporal.hpp"
#include "tempo/tensor.hpp"

namespace tempo {

enum class TemporalMode { none, tsm, tin };

inline std::string_view to_string(TemporalMode m) {
  switch (m) {
    case TemporalMode::none: return "none";
    case TemporalMode::tsm: return "tsm";
    case TemporalMode::tin: return "tin";
  }
  return "?";
}

inline TemporalMode parse_temporal_mode(std::string_view s) {
  if (s == "none") return TemporalMode::none;
  if (s == "tsm") return TemporalMode::tsm;
  if (s == "tin") return TemporalMode::tin;
  fail("unknown temporal_mode '", s, "' (expected none, tsm or tin)");
}

struct ModelConfig {
  TemporalMode temporal_mode = TemporalMode::tin;
  std::size_t num_groups = 4;
  double delta_max = 0.0;  ///< 0 selects frames / 2
  double fold = 0.125;     ///< TSM fraction per direction
  std::vector<std::size_t> channels{8, 16, 32};
  std::size_t num_blocks = 3;
  std::size_t frames = 16;
  std::size_t in_channels = 1;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t num_classes = 6;
  double dropout = 0.5;
  std::size_t stem_stride = 2;
  std::size_t hidden = 16;

  double max_offset() const {
    return delta_max > 0.0 ? delta_max : static_cast<double>(frames) / 2.0;
  }

  struct BlockLayout {
    std::size_t in_channels;
    std::size_t out_channels;
    std::size_t stride;
  };

  std::vector<BlockLayout> blocks() const {
    std::vector<BlockLayout> out;
    std::size_t prev_stage = 0, prev_c = channels.at(0);
    for (std::size_t b = 0; b < num_blocks; ++b) {
      const std::size_t stage = b * channels.size() / num_blocks;
      const std::size_t stride = (b > 0 && stage != prev_stage) ? 2 : 1;
      out.push_back({prev_c, channels[stage], stride});
      prev_stage = stage;
      prev_c = channels[stage];
    }
    return out;
  }

  void validate() const {
    require(!channels.empty(), "model: channels must be non-empty");
    require(num_blocks >= channels.size(), "model: num_blocks (", num_blocks,
            ") must be at least the number of stages (", channels.size(), ")");
    require(frames >= 1 && in_channels >= 1 && height >= 1 && width >= 1,
            "model: input dims must be positive");
    require(num_classes >= 1, "model: num_classes must be positive");
    require(dropout >= 0.0 && dropout < 1.0, "model: dropout must be in [0,1)");
    require(stem_stride >= 1 && hidden >= 1, "model: stem_stride and hidden must be positive");
    for (const auto& b : blocks()) {
      if (temporal_mode == TemporalMode::tin) {
        require(num_groups >= 1 && num_groups <= b.in_channels, "model: ", num_groups,
                " groups do not fit a block with ", b.in_channels, " channels");
      }
      if (temporal_mode == TemporalMode::tsm) ShiftSpec{fold}.validate(b.in_channels);
    }
  }
};

/// Ordered name -> (value, grad) store. Insertion order is the iteration
/// and serialization order.
class ParamStore {
 public:
  using Entry = std::pair<std::string, GradPair>;

  GradPair& add(std::string name, Tensor value) {
    require(!index_.contains(name), "ParamStore: duplicate parameter '", name, "'");
    index_.emplace(name, entries_.size());
    entries_.emplace_back(std::move(name), GradPair(std::move(value)));
    return entries_.back().second;
  }

  bool contains(const std::string& name) const { return index_.contains(name); }

  const GradPair& at(const std::string& name) const {
    auto it = index_.find(name);
    require(it != index_.end(), "ParamStore: missing parameter '", name, "'");
    return entries_[it->second].second;
  }
  GradPair& at(const std::string& name) {
    return const_cast<GradPair&>(std::as_const(*this).at(name));
  }

  const Tensor& value(const std::string& name) const { return at(name).value; }
  Tensor& value(const std::string& name) { return at(name).value; }
  Tensor& grad(const std::string& name) { return at(name).grad; }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t num_scalars() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.second.value.size();
    return n;
  }

  void zero_grad() {
    for (auto& e : entries_) e.second.grad.fill(0.0);
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline bool same_values(const ParamStore& a, const ParamStore& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.entries()[i].first != b.entries()[i].first) return false;
    if (!(a.entries()[i].second.value == b.entries()[i].second.value)) return false;
  }
  return true;
}

inline double max_param_diff(const ParamStore& a, const ParamStore& b) {
  require(a.size() == b.size(), "param stores differ in size");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a.entries()[i].first == b.entries()[i].first, "param stores differ in layout");
    m = std::max(m, max_abs_diff(a.entries()[i].second.value, b.entries()[i].second.value));
  }
  return m;
}

// ---------------------------------------------------------------------------
// initialization
// ---------------------------------------------------------------------------

namespace detail {

inline Tensor xavier(Shape dims, std::size_t fan_in, std::size_t fan_out,
                     std::mt19937_64& rng) {
  Tensor t(std::move(dims));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (2.0 * uniform01(rng) - 1.0) * bound;
  return t;
}

// Uniform with variance 2 / fan_in.
inline Tensor he_uniform(Shape dims, std::size_t fan_in, std::mt19937_64& rng) {
  Tensor t(std::move(dims));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (2.0 * uniform01(rng) - 1.0) * bound;
  return t;
}

inline void add_conv(ParamStore& ps, const std::string& name, std::size_t cout,
                     std::size_t cin, std::size_t k, std::mt19937_64& rng) {
  ps.add(name + ".weight", he_uniform({cout, cin, k, k}, cin * k * k, rng));
  ps.add(name + ".bias", Tensor({cout}));
}

inline void add_linear(ParamStore& ps, const std::string& name, std::size_t out,
                       std::size_t in, std::mt19937_64& rng) {
  ps.add(name + ".weight", xavier({out, in}, in, out, rng));
  ps.add(name + ".bias", Tensor({out}));
}

inline std::string block_name(std::size_t b) { return "block" + std::to_string(b); }

inline bool needs_projection(const ModelConfig::BlockLayout& b) {
  return b.in_channels != b.out_channels || b.stride != 1;
}

}  // namespace detail

/// Seeded parameter initialization. Backbone and offset/weight heads draw
/// from separate streams, so the backbone is identical for every temporal
/// mode at a given seed. Offset/weight heads start at zero, which makes
/// interlacing an exact identity.
inline ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(mix_seed(seed, 1));
  std::mt19937_64 trng(mix_seed(seed, 2));
  ParamStore ps;
  detail::add_conv(ps, "stem", cfg.channels[0], cfg.in_channels, 3, rng);
  const auto layout = cfg.blocks();
  for (std::size_t b = 0; b < layout.size(); ++b) {
    const auto& L = layout[b];
    const std::string p = detail::block_name(b);
    detail::add_conv(ps, p + ".conv1", L.out_channels, L.in_channels, 3, rng);
    detail::add_conv(ps, p + ".conv2", L.out_channels, L.out_channels, 3, rng);
    if (detail::needs_projection(L))
      detail::add_conv(ps, p + ".skip", L.out_channels, L.in_channels, 1, rng);
    if (cfg.temporal_mode == TemporalMode::tin) {
      const std::size_t G = cfg.num_groups, T = cfg.frames;
      detail::add_linear(ps, p + ".offset.fc", cfg.hidden, T, trng);
      ps.add(p + ".offset.head.weight", Tensor({G, cfg.hidden}));
      ps.add(p + ".offset.head.bias", Tensor({G}));
      ps.add(p + ".weight.head.weight", Tensor({G * T, cfg.hidden}));
      ps.add(p + ".weight.head.bias", Tensor({G * T}));
    }
  }
  detail::add_linear(ps, "fc", cfg.num_classes, cfg.channels.back(), rng);
  return ps;
}

// ---------------------------------------------------------------------------
// offset / weight generator
// ---------------------------------------------------------------------------

struct OffsetNetCache {
  Shape feat_dims;
  Tensor frame_mean;  // [N,T]
  Tensor hidden_pre;  // [N,H]
  Tensor hidden;      // [N,H]
  Tensor offset_tanh; // [N,G]
  Tensor weight_sig;  // [N,G*T]
};

/// feat -> spatial mean -> channel mean -> [N,T] -> fc -> relu ->
///   offsets = max_offset * tanh(head), weights = 2 * sigmoid(head).
inline InterlaceParams offset_weight_net_forward(const Tensor& feat, const ParamStore& params,
                                                 const ModelConfig& cfg,
                                                 const std::string& prefix,
                                                 OffsetNetCache* cache = nullptr) {
  require(feat.rank() == 5, "offset net: feature must be [N,T,C,H,W], got ",
          shape_str(feat.dims()));
  require(feat.dim(1) == cfg.frames, "offset net: feature has ", feat.dim(1),
          " frames, config expects ", cfg.frames);
  const std::size_t N = feat.dim(0), T = feat.dim(1), C = feat.dim(2);
  const std::size_t G = cfg.num_groups;
  const Tensor pooled = global_avg_pool_spatial(feat);
  Tensor mean({N, T});
  for (std::size_t i = 0; i < N * T; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < C; ++c) s += pooled[i * C + c];
    mean[i] = s / static_cast<double>(C);
  }
  Tensor hpre = linear(mean, params.value(prefix + "offset.fc.weight"),
                       params.value(prefix + "offset.fc.bias"));
  Tensor h = activation(hpre, Activation::relu);
  Tensor opre = linear(h, params.value(prefix + "offset.head.weight"),
                       params.value(prefix + "offset.head.bias"));
  Tensor wpre = linear(h, params.value(prefix + "weight.head.weight"),
                       params.value(prefix + "weight.head.bias"));
  Tensor otanh = activation(opre, Activation::tanh);
  Tensor wsig = activation(wpre, Activation::sigmoid);
  InterlaceParams ip{Tensor({N, G}), Tensor({N, G, T})};
  const double dmax = cfg.max_offset();
  for (std::size_t i = 0; i < ip.offsets.size(); ++i) ip.offsets[i] = dmax * otanh[i];
  for (std::size_t i = 0; i < ip.weights.size(); ++i) ip.weights[i] = 2.0 * wsig[i];
  if (cache) {
    *cache = OffsetNetCache{feat.dims(), std::move(mean), std::move(hpre), std::move(h),
                            std::move(otanh), std::move(wsig)};
  }
  return ip;
}

/// Accumulates head gradients into `params` and returns d(loss)/d(feat).
inline Tensor offset_weight_net_backward(ParamStore& params, const ModelConfig& cfg,
                                         const std::string& prefix,
                                         const OffsetNetCache& cache,
                                         const Tensor& grad_offsets,
                                         const Tensor& grad_weights) {
  const Shape& fd = cache.feat_dims;
  const std::size_t N = fd[0], T = fd[1], C = fd[2];
  const double dmax = cfg.max_offset();
  Tensor dopre(cache.offset_tanh.dims());
  for (std::size_t i = 0; i < dopre.size(); ++i) {
    const double y = cache.offset_tanh[i];
    dopre[i] = grad_offsets[i] * dmax * (1.0 - y * y);
  }
  Tensor dwpre(cache.weight_sig.dims());
  for (std::size_t i = 0; i < dwpre.size(); ++i) {
    const double s = cache.weight_sig[i];
    dwpre[i] = grad_weights[i] * 2.0 * s * (1.0 - s);
  }
  auto go = linear_backward(cache.hidden, params.value(prefix + "offset.head.weight"), dopre);
  auto gw = linear_backward(cache.hidden, params.value(prefix + "weight.head.weight"), dwpre);
  params.grad(prefix + "offset.head.weight") += go.weight;
  params.grad(prefix + "offset.head.bias") += go.bias;
  params.grad(prefix + "weight.head.weight") += gw.weight;
  params.grad(prefix + "weight.head.bias") += gw.bias;
  Tensor dh = std::move(go.input);
  dh += gw.input;
  Tensor dhpre = activation_backward(cache.hidden_pre, cache.hidden, dh, Activation::relu);
  auto gf = linear_backward(cache.frame_mean, params.value(prefix + "offset.fc.weight"), dhpre);
  params.grad(prefix + "offset.fc.weight") += gf.weight;
  params.grad(prefix + "offset.fc.bias") += gf.bias;
  Tensor dpooled({N, T, C});
  const double invc = 1.0 / static_cast<double>(C);
  for (std::size_t i = 0; i < N * T; ++i)
    for (std::size_t c = 0; c < C; ++c) dpooled[i * C + c] = gf.input[i] * invc;
  return global_avg_pool_spatial_backward(fd, dpooled);
}

// ---------------------------------------------------------------------------
// backbone
// ---------------------------------------------------------------------------

struct BlockCache {
  Tensor input;  // [N,T,C,H,W]
  Tensor mixed;  // temporal module output, empty for TemporalMode::none
  InterlaceParams interlace;
  OffsetNetCache offset_net;
  Tensor a1, h1;  // conv1 pre/post relu, [N*T,C,H,W]
  Tensor sum;     // conv2 + skip, pre relu
  Tensor out;
};

struct ForwardCache {
  Shape clip_dims;
  Tensor clip;  // [N*T,C,H,W]
  Tensor stem_pre, stem_out;
  std::vector<BlockCache> blocks;
  Shape last_dims;    // [N,T,C,H,W] of final block output
  Tensor feat;        // [N,C] after temporal mean
  Tensor drop_mask;   // empty when dropout is inactive
  Tensor dropped;     // [N,C]
};

namespace detail {

inline Tensor as_frames(Tensor t) {
  const Shape& d = t.dims();
  return std::move(t).reshaped({d[0] * d[1], d[2], d[3], d[4]});
}

inline Tensor as_video(Tensor t, std::size_t n, std::size_t frames) {
  const Shape d = t.dims();
  return std::move(t).reshaped({n, frames, d[1], d[2], d[3]});
}

}  // namespace detail

/// Per-class logits for a batch of clips. Fills `cache` when non-null.
inline Tensor backbone_forward(const Tensor& clip, const ParamStore& params,
                               const ModelConfig& cfg, bool training, std::uint64_t seed,
                               ForwardCache* cache = nullptr) {
  require(clip.rank() == 5, "backbone: clip must be [N,T,C,H,W], got ",
          shape_str(clip.dims()));
  require(clip.dim(1) == cfg.frames, "backbone: clip has ", clip.dim(1),
          " frames, config expects ", cfg.frames);
  require(clip.dim(2) == cfg.in_channels, "backbone: clip has ", clip.dim(2),
          " channels, config expects ", cfg.in_channels);
  require(clip.dim(3) == cfg.height && clip.dim(4) == cfg.width, "backbone: clip is ",
          clip.dim(3), "x", clip.dim(4), ", config expects ", cfg.height, "x", cfg.width);
  const std::size_t N = clip.dim(0), T = clip.dim(1);
  ForwardCache local;
  ForwardCache& fc = cache ? *cache : local;
  fc = ForwardCache{};
  fc.clip_dims = clip.dims();
  fc.clip = detail::as_frames(clip);
  fc.stem_pre = conv2d(fc.clip, params.value("stem.weight"), params.value("stem.bias"),
                       {cfg.stem_stride, 1});
  fc.stem_out = activation(fc.stem_pre, Activation::relu);
  Tensor x = detail::as_video(fc.stem_out, N, T);

  const auto layout = cfg.blocks();
  fc.blocks.resize(layout.size());
  const double dmax = cfg.max_offset();
  for (std::size_t b = 0; b < layout.size(); ++b) {
    const auto& L = layout[b];
    const std::string p = detail::block_name(b) + ".";
    BlockCache& bc = fc.blocks[b];
    bc.input = std::move(x);
    const Tensor* mixed = &bc.input;
    if (cfg.temporal_mode == TemporalMode::tsm) {
      bc.mixed = tsm_shift(bc.input, ShiftSpec{cfg.fold});
      mixed = &bc.mixed;
    } else if (cfg.temporal_mode == TemporalMode::tin) {
      const GroupSpec groups = GroupSpec::even(L.in_channels, cfg.num_groups);
      bc.interlace = offset_weight_net_forward(bc.input, params, cfg, p, &bc.offset_net);
      bc.mixed = interlace_forward(bc.input, groups, bc.interlace, dmax);
      mixed = &bc.mixed;
    }
    const Tensor mixed_frames = mixed->reshaped(
        {N * T, L.in_channels, mixed->dim(3), mixed->dim(4)});
    bc.a1 = conv2d(mixed_frames, params.value(p + "conv1.weight"),
                   params.value(p + "conv1.bias"), {L.stride, 1});
    bc.h1 = activation(bc.a1, Activation::relu);
    bc.sum = conv2d(bc.h1, params.value(p + "conv2.weight"), params.value(p + "conv2.bias"),
                    {1, 1});
    const Tensor in_frames = bc.input.reshaped(
        {N * T, L.in_channels, bc.input.dim(3), bc.input.dim(4)});
    if (detail::needs_projection(L)) {
      bc.sum += conv2d(in_frames, params.value(p + "skip.weight"),
                       params.value(p + "skip.bias"), {L.stride, 0});
    } else {
      bc.sum += in_frames;
    }
    bc.out = activation(bc.sum, Activation::relu);
    x = detail::as_video(bc.out, N, T);
  }
  fc.last_dims = x.dims();
  const Tensor pooled = global_avg_pool_spatial(x);
  fc.feat = segment_consensus(pooled);
  if (training && cfg.dropout > 0.0) {
    fc.drop_mask = dropout_mask(fc.feat.dims(), cfg.dropout, seed);
    fc.dropped = fc.feat;
    for (std::size_t i = 0; i < fc.dropped.size(); ++i) fc.dropped[i] *= fc.drop_mask[i];
  } else {
    fc.dropped = fc.feat;
  }
  return linear(fc.dropped, params.value("fc.weight"), params.value("fc.bias"));
}

/// Accumulates parameter gradients into `params` and returns the gradient
/// with respect to the clip.
inline Tensor backbone_backward(ParamStore& params, const ModelConfig& cfg,
                                const ForwardCache& fc, const Tensor& grad_logits) {
  const std::size_t N = fc.clip_dims[0], T = fc.clip_dims[1];
  auto gfc = linear_backward(fc.dropped, params.value("fc.weight"), grad_logits);
  params.grad("fc.weight") += gfc.weight;
  params.grad("fc.bias") += gfc.bias;
  Tensor dfeat = std::move(gfc.input);
  if (!fc.drop_mask.empty())
    for (std::size_t i = 0; i < dfeat.size(); ++i) dfeat[i] *= fc.drop_mask[i];
  Tensor dpooled = segment_consensus_backward(T, dfeat);
  Tensor dx = detail::as_frames(global_avg_pool_spatial_backward(fc.last_dims, dpooled));

  const auto layout = cfg.blocks();
  const double dmax = cfg.max_offset();
  for (std::size_t bi = layout.size(); bi-- > 0;) {
    const auto& L = layout[bi];
    const BlockCache& bc = fc.blocks[bi];
    const std::string p = detail::block_name(bi) + ".";
    Tensor dsum = activation_backward(bc.sum, bc.out, dx, Activation::relu);
    const Tensor in_frames = bc.input.reshaped(
        {N * T, L.in_channels, bc.input.dim(3), bc.input.dim(4)});
    Tensor din;
    if (detail::needs_projection(L)) {
      auto gs = conv2d_backward(in_frames, params.value(p + "skip.weight"), dsum,
                                {L.stride, 0});
      params.grad(p + "skip.weight") += gs.kernel;
      params.grad(p + "skip.bias") += gs.bias;
      din = std::move(gs.input);
    } else {
      din = dsum;
    }
    auto g2 = conv2d_backward(bc.h1, params.value(p + "conv2.weight"), dsum, {1, 1});
    params.grad(p + "conv2.weight") += g2.kernel;
    params.grad(p + "conv2.bias") += g2.bias;
    Tensor da1 = activation_backward(bc.a1, bc.h1, g2.input, Activation::relu);
    const Tensor& mixed = cfg.temporal_mode == TemporalMode::none ? bc.input : bc.mixed;
    const Tensor mixed_frames =
        mixed.reshaped({N * T, L.in_channels, mixed.dim(3), mixed.dim(4)});
    auto g1 = conv2d_backward(mixed_frames, params.value(p + "conv1.weight"), da1,
                              {L.stride, 1});
    params.grad(p + "conv1.weight") += g1.kernel;
    params.grad(p + "conv1.bias") += g1.bias;
    Tensor dmixed = detail::as_video(std::move(g1.input), N, T);
    Tensor dinput;
    if (cfg.temporal_mode == TemporalMode::none) {
      dinput = std::move(dmixed);
    } else if (cfg.temporal_mode == TemporalMode::tsm) {
      dinput = tsm_shift_backward(dmixed, ShiftSpec{cfg.fold});
    } else {
      const GroupSpec groups = GroupSpec::even(L.in_channels, cfg.num_groups);
      auto gi = interlace_backward(bc.input, groups, bc.interlace, dmax, dmixed);
      dinput = std::move(gi.input);
      dinput += offset_weight_net_backward(params, cfg, p, bc.offset_net, gi.offsets,
                                           gi.weights);
    }
    dx = detail::as_frames(std::move(dinput));
    dx += din;
  }
  Tensor dstem = activation_backward(fc.stem_pre, fc.stem_out, dx, Activation::relu);
  auto gst = conv2d_backward(fc.clip, params.value("stem.weight"), dstem,
                             {cfg.stem_stride, 1});
  params.grad("stem.weight") += gst.kernel;
  params.grad("stem.bias") += gst.bias;
  return gst.input.reshaped(fc.clip_dims);
}

/// Bits that pin the piecewise branch of the forward pass: every relu
/// argument's sign and every interlace offset's integer part. Two forwards
/// with equal signatures lie on the same smooth piece.
inline std::vector<std::int64_t> kink_signature(const ForwardCache& fc) {
  std::vector<std::int64_t> sig;
  auto signs = [&sig](const Tensor& t) {
    for (std::size_t i = 0; i < t.size(); ++i) sig.push_back(t[i] > 0.0 ? 1 : 0);
  };
  signs(fc.stem_pre);
  for (const auto& b : fc.blocks) {
    signs(b.a1);
    signs(b.sum);
    if (!b.offset_net.hidden_pre.empty()) signs(b.offset_net.hidden_pre);
    for (std::size_t i = 0; i < b.interlace.offsets.size(); ++i)
      sig.push_back(static_cast<std::int64_t>(std::floor(b.interlace.offsets[i])));
  }
  return sig;
}

/// Elementwise sigmoid of logits.
inline Tensor predict_clip(const Tensor& logits) {
  return activation(logits, Activation::sigmoid);
}

}  // namespace tempo
