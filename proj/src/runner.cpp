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

#include "shefl/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>

namespace shefl {

namespace {

std::filesystem::path resolve(const std::filesystem::path& data_dir,
                              const std::string& configured,
                              const std::string& fallback) {
  std::filesystem::path p = configured.empty() ? std::filesystem::path(fallback)
                                               : std::filesystem::path(configured);
  return p.is_absolute() ? p : data_dir / p;
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

// Population standard deviation; a single sample yields 0.
double std_of(const std::vector<double>& xs) {
  double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

std::pair<Dataset, Dataset> load_datasets(const ExperimentConfig& cfg,
                                          const std::filesystem::path& data_dir) {
  if (cfg.dataset == DatasetKind::kBlobs) {
    auto rng = derive_stream(cfg.effective_data_seed(), "blobs", 0, 0);
    return generate_blobs(cfg.blobs.classes, cfg.blobs.dim, cfg.blobs.n_train,
                          cfg.blobs.n_test, cfg.blobs.class_sep, rng);
  }
  const std::string sub = cfg.dataset == DatasetKind::kMnist ? "mnist" : "fmnist";
  Dataset train = load_idx_dataset(
      resolve(data_dir, cfg.data.train_images, sub + "/train-images-idx3-ubyte"),
      resolve(data_dir, cfg.data.train_labels, sub + "/train-labels-idx1-ubyte"),
      10, "train");
  Dataset test = load_idx_dataset(
      resolve(data_dir, cfg.data.test_images, sub + "/t10k-images-idx3-ubyte"),
      resolve(data_dir, cfg.data.test_labels, sub + "/t10k-labels-idx1-ubyte"),
      10, "test");
  return {std::move(train), std::move(test)};
}

std::vector<MetricRow> run_all(const ExperimentConfig& cfg, const Dataset& train,
                               const Dataset& test, ThreadPool& pool,
                               const RunnerOptions& opts) {
  std::vector<MetricRow> rows;
  for (Algo algo : cfg.algos) {
    for (std::uint64_t seed : cfg.seeds) {
      std::unique_ptr<TraceWriter> trace;
      if (opts.trace) {
        trace = std::make_unique<TraceWriter>(
            opts.out_dir / ("trace_" + algo_name(algo) + "_" + std::to_string(seed) + ".bin"));
      }
      auto start = std::chrono::steady_clock::now();
      std::vector<MetricRow> run =
          run_algorithm(algo, cfg, train, test, seed, pool, trace.get());
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
      if (!opts.quiet) {
        std::fprintf(stderr, "%s seed %llu: final acc %.4f (%lld ms)\n",
                     algo_name(algo).c_str(), static_cast<unsigned long long>(seed),
                     run.back().test_acc, static_cast<long long>(elapsed));
      }
      rows.insert(rows.end(), std::make_move_iterator(run.begin()),
                  std::make_move_iterator(run.end()));
    }
  }
  return rows;
}

std::string summary_csv(std::span<const MetricRow> rows, double threshold) {
  // Group rows into per-(algo, seed) accuracy series, preserving run order.
  std::vector<std::string> algo_order;
  std::map<std::string, std::map<std::uint64_t, std::vector<double>>> series;
  for (const MetricRow& row : rows) {
    if (!series.count(row.algo)) algo_order.push_back(row.algo);
    series[row.algo][row.seed].push_back(row.test_acc);
  }

  std::string out = "algo,final_mean,final_std,best_mean,best_std,conv_mean,nc_count\n";
  char buf[160];
  for (const std::string& algo : algo_order) {
    std::vector<double> finals, bests, convs;
    int nc_count = 0;
    for (const auto& [seed, accs] : series[algo]) {
      finals.push_back(accs.back());
      bests.push_back(*std::max_element(accs.begin(), accs.end()));
      if (auto conv = convergence_rounds(accs, threshold)) {
        convs.push_back(static_cast<double>(*conv));
      } else {
        ++nc_count;
      }
    }
    std::string conv_field = "nc";
    if (!convs.empty()) {
      std::snprintf(buf, sizeof(buf), "%.6f", mean_of(convs));
      conv_field = buf;
    }
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%s,%d\n", algo.c_str(),
                  mean_of(finals), std_of(finals), mean_of(bests), std_of(bests),
                  conv_field.c_str(), nc_count);
    out += buf;
  }
  return out;
}

void emit_plot_data(const std::filesystem::path& metrics_csv_path,
                    const std::filesystem::path& out_dir) {
  std::vector<MetricRow> rows = parse_metrics_csv(metrics_csv_path);
  std::vector<std::string> algo_order;
  std::map<std::string, std::map<int, std::vector<double>>> by_round;
  for (const MetricRow& row : rows) {
    if (!by_round.count(row.algo)) algo_order.push_back(row.algo);
    by_round[row.algo][row.round].push_back(row.test_acc);
  }
  for (const std::string& algo : algo_order) {
    std::ofstream file(out_dir / ("plot_" + algo + ".dat"), std::ios::binary);
    if (!file) {
      throw std::runtime_error("cannot write plot data for " + algo);
    }
    char buf[96];
    for (const auto& [round, accs] : by_round[algo]) {
      std::snprintf(buf, sizeof(buf), "%d %.6f %.6f\n", round, mean_of(accs),
                    std_of(accs));
      file << buf;
    }
  }
}

void run_experiments(const ExperimentConfig& cfg, const RunnerOptions& opts) {
  namespace fs = std::filesystem;
  if (fs::exists(opts.out_dir) && !fs::is_empty(opts.out_dir) && !opts.force) {
    throw std::runtime_error("output directory " + opts.out_dir.string() +
                             " is not empty (pass --force to overwrite)");
  }
  fs::create_directories(opts.out_dir);

  auto [train, test] = load_datasets(cfg, opts.data_dir);
  ThreadPool pool(opts.workers > 0 ? opts.workers : ThreadPool::env_workers());
  std::vector<MetricRow> rows = run_all(cfg, train, test, pool, opts);

  const fs::path metrics_path = opts.out_dir / "metrics.csv";
  write_metrics_csv(metrics_path, rows);
  std::ofstream summary(opts.out_dir / "summary.csv", std::ios::binary);
  summary << summary_csv(rows, cfg.threshold);
  summary.close();
  if (opts.plot_data) emit_plot_data(metrics_path, opts.out_dir);
}

}  // namespace shefl
