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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tempo/config.hpp"
#include "tempo/eval.hpp"
#include "tempo/io.hpp"
#include "tempo/losses.hpp"
#include "tempo/model.hpp"
#include "tempo/optim.hpp"
#include "tempo/sampling.hpp"

namespace tempo {

// ---------------------------------------------------------------------------
// data
// ---------------------------------------------------------------------------

struct Dataset {
  Manifest manifest;
  std::vector<Video> videos;
  LabelMatrix labels;

  std::size_t size() const { return videos.size(); }
};

inline fs::path resolve_path(const fs::path& root, const fs::path& p) {
  return p.is_absolute() ? p : root / p;
}

/// Loads every video of a manifest. `limit` > 0 keeps only the first rows.
inline Dataset load_dataset(const fs::path& root, const fs::path& manifest_path,
                            std::size_t num_classes, std::size_t channels,
                            std::size_t limit = 0) {
  Dataset ds;
  ds.manifest = read_manifest(resolve_path(root, manifest_path), num_classes);
  require(!ds.manifest.empty(), manifest_path.string(), ": manifest has no rows");
  if (limit > 0 && ds.manifest.size() > limit) ds.manifest.resize(limit);
  ds.videos.reserve(ds.manifest.size());
  for (const auto& row : ds.manifest) {
    const fs::path p = resolve_path(root, row.path);
    Video v = read_video(p);
    require(v.frames == row.frames, p.string(), ": video has ", v.frames,
            " frames, manifest says ", row.frames);
    require(v.channels == channels, p.string(), ": video has ", v.channels,
            " channels, config expects ", channels);
    ds.videos.push_back(std::move(v));
  }
  ds.labels = manifest_labels(ds.manifest, num_classes);
  return ds;
}

inline ClassStats class_stats(const Dataset& ds) {
  ClassStats st{std::vector<double>(ds.labels.num_classes, 0.0)};
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t c = 0; c < ds.labels.num_classes; ++c) st.counts[c] += ds.labels.row(i)[c];
  return st;
}

/// Stacks [T,C,S,S] views into [N,T,C,S,S].
inline Tensor stack_views(const std::vector<Tensor>& views) {
  require(!views.empty(), "stack_views: no views");
  Shape d = views.front().dims();
  d.insert(d.begin(), views.size());
  Tensor out(d);
  const std::size_t each = views.front().size();
  for (std::size_t i = 0; i < views.size(); ++i) {
    require(views[i].dims() == views.front().dims(), "stack_views: view ", i, " has shape ",
            shape_str(views[i].dims()));
    std::copy(views[i].values().begin(), views[i].values().end(),
              out.data() + static_cast<std::ptrdiff_t>(i * each));
  }
  return out;
}

/// Sample indices of mini-batch k. Epoch e visits a seeded permutation of
/// the dataset; batches run through epochs back to back, so the batch
/// depends only on (seed, k).
inline std::vector<std::size_t> batch_indices(std::size_t n, std::size_t batch,
                                              std::uint64_t seed, long k) {
  require(n >= 1 && batch >= 1, "batch_indices: empty dataset or batch");
  std::vector<std::size_t> out;
  out.reserve(batch);
  std::vector<std::size_t> perm;
  std::size_t perm_epoch = std::numeric_limits<std::size_t>::max();
  for (std::size_t j = 0; j < batch; ++j) {
    const std::size_t pos = static_cast<std::size_t>(k) * batch + j;
    const std::size_t epoch = pos / n;
    if (epoch != perm_epoch) {
      perm.resize(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::mt19937_64 rng(mix_seed(mix_seed(seed, 0xe90c), epoch));
      for (std::size_t i = n; i > 1; --i) {
        const auto r = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        std::swap(perm[i - 1], perm[std::min(r, i - 1)]);
      }
      perm_epoch = epoch;
    }
    out.push_back(perm[pos % n]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

enum class EvalMode { clip, dense };

inline EvalMode parse_eval_mode(std::string_view s) {
  if (s == "clip") return EvalMode::clip;
  if (s == "dense") return EvalMode::dense;
  fail("unknown eval mode '", s, "' (expected clip or dense)");
}

/// Clip mode is one temporally centered, spatially centered view at the
/// middle test scale; dense mode is the full configured plan.
inline ClipPlan eval_plan(const RunConfig& cfg, const Video& v, EvalMode mode) {
  DenseSettings ds = cfg.dense();
  if (mode == EvalMode::clip) {
    const std::size_t mid = ds.scales[ds.scales.size() / 2];
    ds = DenseSettings{1, 1, {mid}, ds.crop, false};
  }
  return dense_test_plan(v.frames, v.geometry(), cfg.sampler_spec(), ds);
}

/// Per-video probabilities averaged over the views of the plan.
inline PredictionMatrix predict(const ParamStore& params, const RunConfig& cfg,
                                const Dataset& ds, EvalMode mode, std::size_t chunk = 30) {
  const ModelConfig mc = cfg.model_config();
  PredictionMatrix out{ds.labels.ids, mc.num_classes,
                       std::vector<double>(ds.size() * mc.num_classes, 0.0)};
  std::vector<Tensor> views;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const ClipPlan plan = eval_plan(cfg, ds.videos[i], mode);
    auto row = out.row(i);
    for (std::size_t begin = 0; begin < plan.views.size(); begin += chunk) {
      const std::size_t end = std::min(plan.views.size(), begin + chunk);
      views.clear();
      for (std::size_t j = begin; j < end; ++j)
        views.push_back(materialize_view(ds.videos[i], plan.views[j]));
      const Tensor probs = predict_clip(backbone_forward(stack_views(views), params, mc, false, 0));
      for (std::size_t j = 0; j < end - begin; ++j)
        for (std::size_t c = 0; c < mc.num_classes; ++c) row[c] += probs[j * mc.num_classes + c];
    }
    for (double& p : row) p /= static_cast<double>(plan.views.size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// training
// ---------------------------------------------------------------------------

struct TrainOptions {
  bool write_files = true;
  std::optional<Checkpoint> resume;
  long stop_at = -1;  ///< stop after this many completed iterations (< max_iters)
  std::function<void(const std::string&)> on_log;
};

struct TrainResult {
  ParamStore params;
  SgdState state;
  long iteration = 0;
  std::vector<std::string> log;
  double val_map = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> losses;
};

inline std::string checkpoint_name(long iteration) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "checkpoint_%08ld.xtck", iteration);
  return buf;
}

inline std::string format_log_line(long iter, double lr, double loss, double val_map) {
  char buf[128];
  if (std::isnan(val_map))
    std::snprintf(buf, sizeof buf, "%ld\t%.9g\t%.9g\t-", iter, lr, loss);
  else
    std::snprintf(buf, sizeof buf, "%ld\t%.9g\t%.9g\t%.9g", iter, lr, loss, val_map);
  return buf;
}

namespace detail {

// Keeps log lines up to and including `iteration`.
inline std::string truncate_log(std::string_view text, long iteration) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    const auto tab = line.find('\t');
    if (tab != std::string_view::npos &&
        parse_long(line.substr(0, tab), "log") <= iteration) {
      out.append(line);
      out += '\n';
    }
    start = end + 1;
  }
  return out;
}

}  // namespace detail

/// One SGD step on mini-batch k. Returns the loss.
inline double train_step(ParamStore& params, SgdState& state, const RunConfig& cfg,
                         const ModelConfig& mc, const LossConfig& lc, const SgdConfig& sc,
                         const Schedule& sched, const Dataset& train, long k) {
  const std::uint64_t it_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(k));
  const auto idx = batch_indices(train.size(), static_cast<std::size_t>(cfg.batch), cfg.seed, k);
  const ClipSamplerSpec spec = cfg.sampler_spec();
  const AugmentSettings aug = cfg.augment();
  std::vector<Tensor> views;
  Tensor targets({idx.size(), mc.num_classes});
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const Video& v = train.videos[idx[j]];
    const View view = train_augment_view(v.frames, v.geometry(), spec, aug, mix_seed(it_seed, j));
    views.push_back(materialize_view(v, view));
    const auto lab = train.labels.row(idx[j]);
    std::copy(lab.begin(), lab.end(), targets.data() + j * mc.num_classes);
  }
  ForwardCache fc;
  const Tensor logits = backbone_forward(stack_views(views), params, mc, true,
                                         mix_seed(it_seed, 0xd0), &fc);
  const LossResult loss = compute_loss(logits, targets, lc);
  params.zero_grad();
  backbone_backward(params, mc, fc, loss.grad);
  sgd_step(params, sc, lr_at(sched, sc, k), state);
  return loss.value;
}

/// Seeded mini-batch SGD. Every random draw of iteration k derives from
/// (seed, k), so a run resumed from a checkpoint reproduces the
/// uninterrupted run.
inline TrainResult train(const RunConfig& cfg, const Dataset& train_set, const Dataset* val,
                         TrainOptions opt = {}) {
  const ModelConfig mc = cfg.model_config();
  LossConfig lc = cfg.loss_config();
  if (lc.kind == LossKind::bce && lc.weight_rule != WeightRule::none)
    lc.class_weights = class_weights(class_stats(train_set), lc.weight_rule);
  const SgdConfig sc = cfg.sgd_config();
  const Schedule sched = cfg.lr_schedule();
  require(cfg.batch >= 1, "batch must be >= 1");
  require(cfg.eval_interval >= 0 && cfg.checkpoint_interval >= 0,
          "intervals must be nonnegative");
  require(train_set.labels.num_classes == mc.num_classes, "training labels have ",
          train_set.labels.num_classes, " classes, model has ", mc.num_classes);

  TrainResult res;
  res.params = init_params(mc, cfg.seed);
  res.state = SgdState::zeros_like(res.params);
  if (opt.resume) {
    const long it = restore_checkpoint(*opt.resume, res.params, &res.state);
    require(it >= 0, "resume checkpoint has no iteration counter");
    require(it <= cfg.max_iters, "resume checkpoint is at iteration ", it, ", beyond max_iters ",
            cfg.max_iters);
    res.iteration = it;
  }
  const long stop = opt.stop_at >= 0 ? std::min(opt.stop_at, cfg.max_iters) : cfg.max_iters;

  const fs::path out_dir = cfg.output_dir;
  const fs::path log_path = out_dir / "train.log";
  std::string log_text;
  if (opt.write_files) {
    write_file(out_dir / "config.txt", cfg.to_text());
    if (opt.resume && fs::exists(log_path))
      log_text = detail::truncate_log(read_file(log_path), res.iteration);
    write_file(log_path, log_text);
  }
  std::FILE* log_file = nullptr;
  if (opt.write_files) {
    log_file = std::fopen(log_path.string().c_str(), "ab");
    if (!log_file) throw IoError("cannot open '" + log_path.string() + "' for appending");
  }
  struct Closer {
    std::FILE* f;
    ~Closer() {
      if (f) std::fclose(f);
    }
  } closer{log_file};

  const auto validate = [&] {
    return map_eval(predict(res.params, cfg, *val, EvalMode::clip), val->labels, MapMode::sample);
  };
  for (long k = res.iteration; k < stop; ++k) {
    const double lr = lr_at(sched, sc, k);
    const double loss = train_step(res.params, res.state, cfg, mc, lc, sc, sched, train_set, k);
    res.losses.push_back(loss);
    res.iteration = k + 1;
    double vmap = std::numeric_limits<double>::quiet_NaN();
    const bool last = res.iteration == cfg.max_iters;
    if (val && ((cfg.eval_interval > 0 && res.iteration % cfg.eval_interval == 0) || last)) {
      vmap = validate();
      res.val_map = vmap;
    }
    const std::string line = format_log_line(res.iteration, lr, loss, vmap);
    res.log.push_back(line);
    if (log_file) {
      std::fprintf(log_file, "%s\n", line.c_str());
      std::fflush(log_file);
    }
    if (opt.on_log) opt.on_log(line);
    if (opt.write_files && cfg.checkpoint_interval > 0 &&
        res.iteration % cfg.checkpoint_interval == 0 && !last)
      write_checkpoint(out_dir / checkpoint_name(res.iteration),
                       make_checkpoint(res.params, &res.state, res.iteration));
  }
  if (opt.write_files && res.iteration == cfg.max_iters)
    write_checkpoint(out_dir / "final.xtck", make_checkpoint(res.params, &res.state, res.iteration));
  return res;
}

}  // namespace tempo
