// Copyright 2026 The SHEFL Simulator Authors.
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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shefl/model.hpp"
#include "shefl/param_vector.hpp"

namespace shefl {

/// One metrics.csv row.
struct MetricRow {
  int round = 0;  // 1-based
  std::string algo;
  std::uint64_t seed = 0;
  double test_acc = 0.0;
  std::vector<double> per_model_acc;
  std::uint64_t uplink_bytes = 0;
  double lr = 0.0;
  // Fixed at 0: byte-identical reruns are part of the output contract, so a
  // measured wall time cannot live in this file. Timings go to the console.
  std::int64_t wall_ms = 0;
};

/// Soft-voting ensemble: per sample, the M softmax vectors are averaged and
/// the argmax taken, ties broken by lowest class index.
std::vector<int> ensemble_predict(const ModelSpec& spec,
                                  std::span<const ParamVector> submodels,
                                  const Batch& batch);

double accuracy(std::span<const int> predictions, std::span<const int> labels);

/// 1-based index of the first round with accuracy >= threshold, or nullopt.
std::optional<int> convergence_rounds(std::span<const double> acc_series,
                                      double threshold);

/// Serializes rows with the exact header
/// `round,algo,seed,test_acc,per_model_acc,uplink_bytes,lr,wall_ms`,
/// 6 fractional digits, `;`-joined per-model accuracies, LF endings.
std::string metrics_csv(std::span<const MetricRow> rows);
void write_metrics_csv(const std::filesystem::path& path,
                       std::span<const MetricRow> rows);

/// Parses a file produced by write_metrics_csv.
std::vector<MetricRow> parse_metrics_csv(const std::filesystem::path& path);

}  // namespace shefl
