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

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "shefl/config.hpp"
#include "shefl/runner.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator for sparse heterogeneous ensemble federated learning"};

  std::string config_path;
  std::string out_dir;
  std::string data_dir = ".";
  std::string algo_override;
  std::string seeds_override;
  bool trace = false, plot_data = false, force = false;

  app.add_option("--config", config_path, "Experiment config file (key = value)");
  app.add_option("--out", out_dir, "Output directory for metrics/summary")->required();
  app.add_option("--data-dir", data_dir, "Directory holding IDX dataset files");
  app.add_option("--algo", algo_override, "Override algorithms (comma-separated)");
  app.add_option("--seeds", seeds_override, "Override seeds (comma-separated)");
  app.add_flag("--trace", trace, "Write per-upload binary traces");
  app.add_flag("--plot-data", plot_data, "Emit per-algo accuracy-vs-round files");
  app.add_flag("--force", force, "Allow writing into a non-empty output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) {
        std::fprintf(stderr, "error: cannot open config file %s\n", config_path.c_str());
        return 1;
      }
      std::stringstream buffer;
      buffer << file.rdbuf();
      text = buffer.str();
    }
    shefl::ExperimentConfig cfg = shefl::parse_config(text);

    if (!algo_override.empty()) {
      cfg.algos.clear();
      for (const std::string& name : split_csv(algo_override)) {
        cfg.algos.push_back(shefl::algo_from_name(name));
      }
    }
    if (!seeds_override.empty()) {
      cfg.seeds.clear();
      for (const std::string& s : split_csv(seeds_override)) {
        cfg.seeds.push_back(std::stoull(s));
      }
    }
    shefl::validate_config(cfg);

    shefl::RunnerOptions opts;
    opts.out_dir = out_dir;
    opts.data_dir = data_dir;
    opts.trace = trace;
    opts.plot_data = plot_data;
    opts.force = force;
    shefl::run_experiments(cfg, opts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
