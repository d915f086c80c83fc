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

#include <filesystem>
#include <string>
#include <vector>

#include "shefl/config.hpp"
#include "shefl/dataset.hpp"
#include "shefl/federation.hpp"
#include "shefl/metrics.hpp"

namespace shefl {

struct RunnerOptions {
  std::filesystem::path out_dir;
  std::filesystem::path data_dir = ".";
  bool trace = false;
  bool plot_data = false;
  bool force = false;
  int workers = 0;     // 0: SHEFL_THREADS env or hardware concurrency
  bool quiet = false;  // suppress per-run console lines
};

/// Builds (blobs) or loads (mnist/fmnist IDX files) the train/test pair.
std::pair<Dataset, Dataset> load_datasets(const ExperimentConfig& cfg,
                                          const std::filesystem::path& data_dir);

/// Runs every (algo, seed) pair sequentially (clients within a round run on
/// the pool) and returns the concatenated metric rows in run order.
std::vector<MetricRow> run_all(const ExperimentConfig& cfg, const Dataset& train,
                               const Dataset& test, ThreadPool& pool,
                               const RunnerOptions& opts);

/// Per-algo summary across seeds: mean/std (population) of final and best
/// accuracy plus mean convergence rounds at the threshold; runs that never
/// cross are excluded from the mean and counted in nc_count.
std::string summary_csv(std::span<const MetricRow> rows, double threshold);

/// Per-algo whitespace-separated (round, mean_acc, std_acc) files computed
/// from a metrics.csv, one `plot_<algo>.dat` per algorithm in out_dir.
void emit_plot_data(const std::filesystem::path& metrics_csv_path,
                    const std::filesystem::path& out_dir);

/// Full CLI workload: dataset load, all runs, metrics.csv + summary.csv
/// (+ optional plot data and per-run traces) under opts.out_dir. The output
/// directory must be fresh or empty unless opts.force is set.
void run_experiments(const ExperimentConfig& cfg, const RunnerOptions& opts);

}  // namespace shefl
