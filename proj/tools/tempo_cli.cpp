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


#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "tempo.hpp"

namespace {

using namespace tempo;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitGradcheck = 3;

std::string kebab(std::string s) {
  for (char& c : s)
    if (c == '_') c = '-';
  return s;
}

/// Registers one --kebab-case flag per RunConfig key plus --config.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file");
    for (const auto& [name, key] : RunConfig::keys())
      cmd->add_option("--" + kebab(name), values[name], "override '" + name + "'");
  }

  // Precedence: flag, then X_TEMPORAL_DATA_ROOT (data_root only), then file, then defaults.
  RunConfig resolve(const CLI::App* cmd) const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (const char* env = std::getenv("X_TEMPORAL_DATA_ROOT"); env && *env) cfg.data_root = env;
    for (const auto& [name, value] : values)
      if (cmd->count("--" + kebab(name)) > 0) cfg.set(name, value);
    return cfg;
  }
};

void print_line(const std::string& s) {
  std::fputs(s.c_str(), stdout);
  std::fputc('\n', stdout);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ParamStore load_params(const RunConfig& cfg, const std::string& checkpoint) {
  ParamStore params = init_params(cfg.model_config(), cfg.seed);
  restore_checkpoint(read_checkpoint(checkpoint), params);
  return params;
}

LabelMatrix load_labels(const std::string& manifest, long num_classes) {
  require(num_classes >= 1, "num-classes must be positive");
  const auto C = static_cast<std::size_t>(num_classes);
  return manifest_labels(read_manifest(manifest, C), C);
}

int cmd_gen_synth(const fs::path& out_dir, const std::string& split, const SynthOptions& opt) {
  const Manifest m = write_synthetic(out_dir, split, opt);
  print_line("wrote " + std::to_string(m.size()) + " videos to " + (out_dir / split).string() +
             " and manifest " + (out_dir / (split + ".txt")).string());
  return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& resume) {
  const ModelConfig mc = cfg.model_config();
  const Dataset tr = load_dataset(cfg.data_root, cfg.train_manifest, mc.num_classes, mc.in_channels);
  std::optional<Dataset> val;
  if (!cfg.val_manifest.empty())
    val = load_dataset(cfg.data_root, cfg.val_manifest, mc.num_classes, mc.in_channels,
                       static_cast<std::size_t>(std::max(0L, cfg.val_limit)));
  TrainOptions opt;
  if (!resume.empty()) opt.resume = read_checkpoint(resume);
  opt.on_log = [&cfg](const std::string& line) {
    const long it = detail::parse_long(line.substr(0, line.find('\t')), "log");
    if ((cfg.log_interval > 0 && it % cfg.log_interval == 0) || it == cfg.max_iters ||
        line.back() != '-')
      print_line(line);
  };
  fs::create_directories(cfg.output_dir);
  const TrainResult r = train(cfg, tr, val ? &*val : nullptr, opt);
  print_line("finished at iteration " + std::to_string(r.iteration) + ", final checkpoint " +
             (fs::path(cfg.output_dir) / "final.xtck").string());
  if (!std::isnan(r.val_map)) print_line("val_map\t" + fmt("%.6f", r.val_map));
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& checkpoint, const std::string& mode_name,
             std::string manifest, std::string output) {
  const EvalMode mode = parse_eval_mode(mode_name);
  const ModelConfig mc = cfg.model_config();
  const ParamStore params = load_params(cfg, checkpoint);
  if (manifest.empty()) manifest = cfg.val_manifest;
  const Dataset ds = load_dataset(cfg.data_root, manifest, mc.num_classes, mc.in_channels,
                                  static_cast<std::size_t>(std::max(0L, cfg.val_limit)));
  const PredictionMatrix preds = predict(params, cfg, ds, mode);
  if (output.empty()) output = (fs::path(cfg.output_dir) / ("predictions_" + mode_name + ".txt")).string();
  write_scores(output, preds);
  print_line("views_per_video\t" + std::to_string(eval_plan(cfg, ds.videos.front(), mode).views.size()));
  print_line("sample_mAP\t" + fmt("%.6f", map_eval(preds, ds.labels, MapMode::sample)));
  print_line("class_mAP\t" + fmt("%.6f", map_eval(preds, ds.labels, MapMode::klass)));
  print_line("predictions\t" + output);
  return 0;
}

int cmd_gradcheck(const std::string& scope, const GradcheckOptions& opt) {
  if (!opt.inject_fault.empty()) {
    bool known = false;
    for (const auto& c : gradient_checks()) known |= c.name == opt.inject_fault;
    require(known, "no gradient check named '", opt.inject_fault, "'");
  }
  bool ok = true;
  double total = 0.0;
  for (const auto& check : gradient_checks()) {
    const GradScope s = parse_grad_scope(scope);
    if (s != GradScope::all && check.scope != s) continue;
    const GradcheckResult r = run_gradcheck(check, opt);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-18s cases=%zu max_rel_error=%.3e time=%.2fs %s",
                  r.name.c_str(), r.cases, r.max_rel_error, r.seconds, r.passed ? "PASS" : "FAIL");
    print_line(buf);
    ok &= r.passed;
    total += r.seconds;
  }
  print_line(std::string(ok ? "all gradient checks passed" : "gradient check FAILED") +
             fmt(" (%.1fs)", total));
  return ok ? 0 : kExitGradcheck;
}

int cmd_ensemble(const std::vector<std::string>& files, std::vector<double> weights,
                 const std::string& labels_path, long num_classes, const std::string& output) {
  const LabelMatrix labels = load_labels(labels_path, num_classes);
  std::vector<PredictionMatrix> preds;
  for (const auto& f : files) {
    preds.push_back(read_scores(f));
    preds.back().validate(false);
    print_line(f + "\tsample_mAP\t" + fmt("%.6f", map_eval(preds.back(), labels, MapMode::sample)));
  }
  const PredictionMatrix ens = ensemble_average(preds, std::move(weights));
  if (!output.empty()) write_scores(output, ens);
  print_line("ensemble\tsample_mAP\t" + fmt("%.6f", map_eval(ens, labels, MapMode::sample)));
  print_line("ensemble\tclass_mAP\t" + fmt("%.6f", map_eval(ens, labels, MapMode::klass)));
  return 0;
}

int cmd_map(const std::string& file, const std::string& labels_path, long num_classes,
            const std::string& mode) {
  if (mode != "both") parse_map_mode(mode);
  const LabelMatrix labels = load_labels(labels_path, num_classes);
  PredictionMatrix preds = read_scores(file);
  preds.validate(false);
  if (mode == "both" || mode == "sample")
    print_line("sample_mAP\t" + fmt("%.6f", map_eval(preds, labels, MapMode::sample)));
  if (mode == "both" || mode == "class")
    print_line("class_mAP\t" + fmt("%.6f", map_eval(preds, labels, MapMode::klass)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal modeling toolkit for multi-label video recognition"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-synth", "write the synthetic moving-square dataset");
  std::string out_dir, split = "train";
  SynthOptions synth;
  gen->add_option("--out-dir", out_dir, "output directory")->required();
  gen->add_option("--split", split, "split name (subdirectory and manifest stem)");
  gen->add_option("--num-videos", synth.num_videos, "number of videos (even)");
  gen->add_option("--frames", synth.frames, "frames per video");
  gen->add_option("--height", synth.height, "frame height");
  gen->add_option("--width", synth.width, "frame width");
  gen->add_option("--seed", synth.seed, "generator seed");

  ConfigFlags train_flags, eval_flags;
  auto* trn = app.add_subcommand("train", "train a model");
  train_flags.attach(trn);
  std::string resume;
  trn->add_option("--resume", resume, "checkpoint to resume from");

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_flags.attach(ev);
  std::string checkpoint, mode = "dense", manifest, output;
  ev->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  ev->add_option("--mode", mode, "clip or dense");
  ev->add_option("--manifest", manifest, "manifest to evaluate (default: val_manifest)");
  ev->add_option("--output", output, "predictions file");

  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  std::string scope = "all";
  GradcheckOptions gopt;
  gc->add_option("--scope", scope, "ops, model or all");
  gc->add_option("--cases", gopt.cases, "cases per check");
  gc->add_option("--tolerance", gopt.tolerance, "max relative error");
  gc->add_option("--seed", gopt.seed, "case seed");
  gc->add_option("--inject-fault", gopt.inject_fault, "flip the analytic gradient of this check");

  auto* ens = app.add_subcommand("ensemble", "average prediction files and score them");
  std::vector<std::string> pred_files;
  std::vector<double> weights;
  std::string labels;
  long num_classes = 6;
  std::string ens_output;
  ens->add_option("--predictions", pred_files, "prediction files")->required();
  ens->add_option("--weights", weights, "per-file weights summing to 1")->delimiter(',');
  ens->add_option("--labels", labels, "manifest with ground-truth labels")->required();
  ens->add_option("--num-classes", num_classes, "number of classes");
  ens->add_option("--output", ens_output, "ensembled predictions file");

  auto* mp = app.add_subcommand("map", "score a prediction file");
  std::string map_file, map_labels, map_mode = "both";
  long map_classes = 6;
  mp->add_option("--predictions", map_file, "prediction file")->required();
  mp->add_option("--labels", map_labels, "manifest with ground-truth labels")->required();
  mp->add_option("--num-classes", map_classes, "number of classes");
  mp->add_option("--mode", map_mode, "sample, class or both");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*gen) return cmd_gen_synth(out_dir, split, synth);
    if (*trn) return cmd_train(train_flags.resolve(trn), resume);
    if (*ev) return cmd_eval(eval_flags.resolve(ev), checkpoint, mode, manifest, output);
    if (*gc) return cmd_gradcheck(scope, gopt);
    if (*ens) return cmd_ensemble(pred_files, weights, labels, num_classes, ens_output);
    if (*mp) return cmd_map(map_file, map_labels, map_classes, map_mode);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}
