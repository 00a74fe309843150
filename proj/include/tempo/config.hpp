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

#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tempo/io.hpp"
#include "tempo/losses.hpp"
#include "tempo/model.hpp"
#include "tempo/optim.hpp"
#include "tempo/sampling.hpp"

namespace tempo {

/// Flat key=value run configuration. Defaults are the desk-scale synthetic
/// setup: 16 frames of 32x32, batch 8, 2000 iterations, cosine schedule with
/// 100 warmup iterations, BCE scaled by 160.
struct RunConfig {
  // model
  std::string temporal_mode = "tin";
  long groups = 4;
  double delta_max = 0.0;
  double fold = 0.125;
  std::vector<long> channels{8, 16, 32};
  long num_blocks = 3;
  long stem_stride = 2;
  double dropout = 0.5;
  long num_classes = 6;
  long input_channels = 1;
  // sampling
  std::string sampler = "strided";
  long frames = 16;
  long segments = 8;
  long stride = 1;
  long crop = 32;
  long scale_min = 32;
  long scale_max = 40;
  bool train_flip = false;
  std::vector<long> scales{32, 36, 40};
  long num_clips = 10;
  long crops = 3;
  bool test_flip = false;
  // loss
  std::string loss = "bce";
  double loss_scale = 160.0;
  std::string weight_rule = "none";
  double margin = 1.0;
  // optimization
  double lr = 0.001;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::string schedule = "cosine";
  std::vector<long> milestones{};
  double step_factor = 0.1;
  long warmup_iters = 100;
  double warmup_factor = 0.1;
  long max_iters = 2000;
  long batch = 8;
  std::uint64_t seed = 0;
  // io
  std::string data_root = ".";
  std::string train_manifest = "train.txt";
  std::string val_manifest = "val.txt";
  std::string output_dir = "run";
  long eval_interval = 500;
  long checkpoint_interval = 500;
  long log_interval = 100;  ///< console echo only; the log file gets every line
  long val_limit = 0;  ///< 0 evaluates every validation video

  using Setter = std::function<void(RunConfig&, std::string_view)>;
  using Getter = std::function<std::string(const RunConfig&)>;
  struct Key {
    Setter set;
    Getter get;
  };

  static const std::map<std::string, Key, std::less<>>& keys();

  void set(std::string_view key, std::string_view value) {
    const auto& k = keys();
    auto it = k.find(key);
    require(it != k.end(), "unknown config key '", key, "'");
    it->second.set(*this, detail::trim(value));
  }

  /// Parses "key = value" lines; '#' starts a comment line.
  static RunConfig parse(std::string_view text, const std::string& what = "config") {
    RunConfig cfg;
    detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
      const auto eq = line.find('=');
      require(eq != std::string_view::npos, what, ":", no, ": expected key = value");
      cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    });
    return cfg;
  }

  static RunConfig load(const fs::path& path) {
    return parse(read_file(path), path.string());
  }

  std::string to_text() const {
    std::string out;
    for (const auto& [name, key] : keys()) out += name + " = " + key.get(*this) + "\n";
    return out;
  }

  ModelConfig model_config() const {
    ModelConfig m;
    m.temporal_mode = parse_temporal_mode(temporal_mode);
    require(groups >= 1, "groups must be >= 1");
    m.num_groups = static_cast<std::size_t>(groups);
    m.delta_max = delta_max;
    m.fold = fold;
    m.channels.clear();
    for (long c : channels) {
      require(c >= 1, "channels must be positive");
      m.channels.push_back(static_cast<std::size_t>(c));
    }
    require(num_blocks >= 1 && stem_stride >= 1, "num_blocks and stem_stride must be positive");
    m.num_blocks = static_cast<std::size_t>(num_blocks);
    m.stem_stride = static_cast<std::size_t>(stem_stride);
    m.dropout = dropout;
    require(num_classes >= 1 && input_channels >= 1, "num_classes and input_channels must be positive");
    m.num_classes = static_cast<std::size_t>(num_classes);
    m.in_channels = static_cast<std::size_t>(input_channels);
    m.frames = sampler_spec().length();
    require(crop >= 1, "crop must be positive");
    m.height = m.width = static_cast<std::size_t>(crop);
    m.validate();
    return m;
  }

  ClipSamplerSpec sampler_spec() const {
    ClipSamplerSpec s;
    s.pattern = parse_sampler_pattern(sampler);
    require(frames >= 1 && segments >= 1 && stride >= 1, "frames, segments and stride must be >= 1");
    s.frames = static_cast<std::size_t>(frames);
    s.segments = static_cast<std::size_t>(segments);
    s.stride = static_cast<std::size_t>(stride);
    return s;
  }

  AugmentSettings augment() const {
    require(scale_min >= 1 && scale_max >= scale_min, "invalid train scale range");
    return {static_cast<std::size_t>(scale_min), static_cast<std::size_t>(scale_max),
            static_cast<std::size_t>(crop), train_flip};
  }

  DenseSettings dense() const {
    require(num_clips >= 1 && crops >= 1 && !scales.empty(), "invalid dense test settings");
    DenseSettings d;
    d.num_clips = static_cast<std::size_t>(num_clips);
    d.crops_per_clip = static_cast<std::size_t>(crops);
    d.scales.clear();
    for (long s : scales) {
      require(s >= 1, "scales must be positive");
      d.scales.push_back(static_cast<std::size_t>(s));
    }
    d.crop = static_cast<std::size_t>(crop);
    d.flip = test_flip;
    return d;
  }

  LossConfig loss_config() const {
    LossConfig l;
    l.kind = parse_loss_kind(loss);
    l.scale = loss_scale;
    l.weight_rule = parse_weight_rule(weight_rule);
    l.margin = margin;
    l.validate();
    return l;
  }

  SgdConfig sgd_config() const {
    SgdConfig s{lr, momentum, weight_decay};
    s.validate();
    return s;
  }

  Schedule lr_schedule() const {
    Schedule s;
    s.kind = parse_schedule_kind(schedule);
    s.max_iter = max_iters;
    s.milestones = milestones;
    s.factor = step_factor;
    s.warmup_iters = warmup_iters;
    s.warmup_start_factor = warmup_factor;
    s.validate();
    return s;
  }
};

namespace detail {

inline bool parse_bool(std::string_view s, std::string_view key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(key, ": '", s, "' is not a boolean");
}

inline std::vector<long> parse_long_list(std::string_view s, std::string_view key) {
  std::vector<long> out;
  if (trim(s).empty()) return out;
  for (auto tok : split(s, ',')) out.push_back(parse_long(tok, key));
  return out;
}

inline std::string join(const std::vector<long>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::string fmt_double(double d) {
  std::ostringstream o;
  o.precision(17);
  o << d;
  return o.str();
}

}  // namespace detail

inline const std::map<std::string, RunConfig::Key, std::less<>>& RunConfig::keys() {
  using R = RunConfig;
  static const auto table = [] {
    std::map<std::string, Key, std::less<>> t;
    auto str = [&t](const char* name, std::string R::*m) {
      t[name] = {[m](R& c, std::string_view v) { c.*m = std::string(v); },
                 [m](const R& c) { return c.*m; }};
    };
    auto lng = [&t](const char* name, long R::*m) {
      t[name] = {[m, name](R& c, std::string_view v) { c.*m = detail::parse_long(v, name); },
                 [m](const R& c) { return std::to_string(c.*m); }};
    };
    auto dbl = [&t](const char* name, double R::*m) {
      t[name] = {[m, name](R& c, std::string_view v) { c.*m = detail::parse_double(v, name); },
                 [m](const R& c) { return detail::fmt_double(c.*m); }};
    };
    auto bln = [&t](const char* name, bool R::*m) {
      t[name] = {[m, name](R& c, std::string_view v) { c.*m = detail::parse_bool(v, name); },
                 [m](const R& c) { return std::string(c.*m ? "true" : "false"); }};
    };
    auto lst = [&t](const char* name, std::vector<long> R::*m) {
      t[name] = {[m, name](R& c, std::string_view v) { c.*m = detail::parse_long_list(v, name); },
                 [m](const R& c) { return detail::join(c.*m); }};
    };
    str("temporal_mode", &R::temporal_mode);
    lng("groups", &R::groups);
    dbl("delta_max", &R::delta_max);
    dbl("fold", &R::fold);
    lst("channels", &R::channels);
    lng("num_blocks", &R::num_blocks);
    lng("stem_stride", &R::stem_stride);
    dbl("dropout", &R::dropout);
    lng("num_classes", &R::num_classes);
    lng("input_channels", &R::input_channels);
    str("sampler", &R::sampler);
    lng("frames", &R::frames);
    lng("segments", &R::segments);
    lng("stride", &R::stride);
    lng("crop", &R::crop);
    lng("scale_min", &R::scale_min);
    lng("scale_max", &R::scale_max);
    bln("train_flip", &R::train_flip);
    lst("scales", &R::scales);
    lng("num_clips", &R::num_clips);
    lng("crops", &R::crops);
    bln("test_flip", &R::test_flip);
    str("loss", &R::loss);
    dbl("loss_scale", &R::loss_scale);
    str("weight_rule", &R::weight_rule);
    dbl("margin", &R::margin);
    dbl("lr", &R::lr);
    dbl("momentum", &R::momentum);
    dbl("weight_decay", &R::weight_decay);
    str("schedule", &R::schedule);
    lst("milestones", &R::milestones);
    dbl("step_factor", &R::step_factor);
    lng("warmup_iters", &R::warmup_iters);
    dbl("warmup_factor", &R::warmup_factor);
    lng("max_iters", &R::max_iters);
    lng("batch", &R::batch);
    t["seed"] = {[](R& c, std::string_view v) {
                   const long s = detail::parse_long(v, "seed");
                   require(s >= 0, "seed must be nonnegative");
                   c.seed = static_cast<std::uint64_t>(s);
                 },
                 [](const R& c) { return std::to_string(c.seed); }};
    str("data_root", &R::data_root);
    str("train_manifest", &R::train_manifest);
    str("val_manifest", &R::val_manifest);
    str("output_dir", &R::output_dir);
    lng("eval_interval", &R::eval_interval);
    lng("checkpoint_interval", &R::checkpoint_interval);
    lng("log_interval", &R::log_interval);
    lng("val_limit", &R::val_limit);
    return t;
  }();
  return table;
}

}  // namespace tempo
