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
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tempo/tensor.hpp"

namespace tempo {

/// Row-major [S, C] matrix keyed by sample id. Used for both class
/// probabilities and 0/1 labels.
struct ScoreMatrix {
  std::vector<std::string> ids;
  std::size_t num_classes = 0;
  std::vector<double> values;

  std::size_t num_samples() const { return ids.size(); }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * num_classes, num_classes};
  }
  std::span<double> row(std::size_t i) { return {values.data() + i * num_classes, num_classes}; }

  void validate(bool binary) const {
    require(values.size() == ids.size() * num_classes, "score matrix: ", values.size(),
            " values for ", ids.size(), " rows of ", num_classes);
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) require(seen.insert(id).second, "duplicate sample id '", id, "'");
    for (double v : values) {
      if (binary)
        require(v == 0.0 || v == 1.0, "label value ", v, " is not binary");
      else
        require(v >= 0.0 && v <= 1.0, "probability ", v, " outside [0,1]");
    }
  }
};

using PredictionMatrix = ScoreMatrix;
using LabelMatrix = ScoreMatrix;

enum class MapMode { sample, klass };

inline MapMode parse_map_mode(std::string_view s) {
  if (s == "sample") return MapMode::sample;
  if (s == "class") return MapMode::klass;
  fail("unknown mAP mode '", s, "' (expected sample or class)");
}

/// Mean over positives of precision at each positive's rank. Ranking is by
/// descending score, ties broken by ascending index. Returns nullopt when
/// there are no positives.
inline std::optional<double> average_precision(std::span<const double> scores,
                                               std::span<const double> labels) {
  require(scores.size() == labels.size(), "average_precision: ", scores.size(),
          " scores vs ", labels.size(), " labels");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (labels[order[r]] != 0.0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

namespace detail {

// Row indices of `labels` aligned to the order of `preds`.
inline std::vector<std::size_t> align_rows(const ScoreMatrix& preds, const ScoreMatrix& labels,
                                           std::string_view what = "labels") {
  require(preds.num_classes == labels.num_classes, "class count mismatch: ", preds.num_classes,
          " vs ", labels.num_classes, " in ", what);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.ids.size(); ++i) index.emplace(labels.ids[i], i);
  std::vector<std::size_t> rows;
  rows.reserve(preds.ids.size());
  for (const auto& id : preds.ids) {
    auto it = index.find(id);
    require(it != index.end(), "sample id '", id, "' missing from ", what);
    rows.push_back(it->second);
  }
  if (labels.ids.size() != preds.ids.size()) {
    std::unordered_set<std::string> have(preds.ids.begin(), preds.ids.end());
    for (const auto& id : labels.ids)
      require(have.contains(id), "sample id '", id, "' in ", what, " has no match");
  }
  return rows;
}

}  // namespace detail

/// Sample mode: AP of each sample's class ranking, averaged over samples with
/// at least one positive. Class mode: AP of each class's sample ranking,
/// averaged over classes with at least one positive. Returns 0 if nothing
/// qualifies.
inline double map_eval(const PredictionMatrix& preds, const LabelMatrix& labels, MapMode mode) {
  const auto rows = detail::align_rows(preds, labels);
  const std::size_t S = preds.num_samples(), C = preds.num_classes;
  double sum = 0.0;
  std::size_t count = 0;
  if (mode == MapMode::sample) {
    for (std::size_t i = 0; i < S; ++i) {
      if (auto ap = average_precision(preds.row(i), labels.row(rows[i]))) {
        sum += *ap;
        ++count;
      }
    }
  } else {
    std::vector<double> sc(S), lb(S);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t i = 0; i < S; ++i) {
        sc[i] = preds.values[i * C + c];
        lb[i] = labels.values[rows[i] * C + c];
      }
      if (auto ap = average_precision(sc, lb)) {
        sum += *ap;
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

/// Per-cell weighted mean of probabilities. Rows follow the first input's id
/// order; the other inputs are matched by id.
inline PredictionMatrix ensemble_average(const std::vector<PredictionMatrix>& preds,
                                         std::vector<double> weights = {}) {
  require(!preds.empty(), "ensemble: no inputs");
  if (weights.empty()) weights.assign(preds.size(), 1.0 / static_cast<double>(preds.size()));
  require(weights.size() == preds.size(), "ensemble: ", weights.size(), " weights for ",
          preds.size(), " inputs");
  double wsum = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "ensemble: negative weight ", w);
    wsum += w;
  }
  require(std::abs(wsum - 1.0) <= 1e-9, "ensemble: weights sum to ", wsum, ", expected 1");
  const PredictionMatrix& first = preds.front();
  PredictionMatrix out{first.ids, first.num_classes,
                       std::vector<double>(first.values.size(), 0.0)};
  for (std::size_t m = 0; m < preds.size(); ++m) {
    const auto& p = preds[m];
    require(p.ids.size() == first.ids.size(), "ensemble: input ", m, " has ", p.ids.size(),
            " samples, expected ", first.ids.size());
    const auto rows = detail::align_rows(first, p, "ensemble input " + std::to_string(m));
    for (std::size_t i = 0; i < out.num_samples(); ++i) {
      auto src = p.row(rows[i]);
      auto dst = out.row(i);
      for (std::size_t c = 0; c < out.num_classes; ++c) dst[c] += weights[m] * src[c];
    }
  }
  // the weighted sum can overshoot 1 by an ulp
  for (double& v : out.values) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace tempo
