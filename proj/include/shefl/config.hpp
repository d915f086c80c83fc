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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shefl/model.hpp"

namespace shefl {

enum class Algo { kShefl, kFedAvg, kFedProx, kFedEns };
enum class CoeffMode { kEq2, kBalanced };
enum class DatasetKind { kBlobs, kMnist, kFmnist };
enum class PartitionKind { kDirichlet, kPathological };

std::string algo_name(Algo algo);
Algo algo_from_name(const std::string& name);

struct LocalConfig {
  double lr = 1e-2;
  int batch = 16;
  double weight_decay = 1e-3;
  int iters = 10;
  double decay = 0.99;
  int decay_every = 10;
};

struct BlobsConfig {
  int classes = 10;
  int dim = 16;
  int n_train = 10000;
  int n_test = 2000;
  double class_sep = 10.0;
};

/// IDX file locations, relative to --data-dir unless absolute. Empty fields
/// fall back to the conventional names under "<dataset>/".
struct DataPaths {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
};

struct ExperimentConfig {
  DatasetKind dataset = DatasetKind::kBlobs;
  ModelKind model = ModelKind::kLogReg;
  std::vector<Algo> algos = {Algo::kShefl, Algo::kFedAvg, Algo::kFedProx, Algo::kFedEns};
  int rounds = 100;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::optional<std::uint64_t> data_seed;  // defaults to seeds.front()

  int num_clients = 100;
  int hpc_count = 50;
  int clients_per_round = 10;
  int hpc_per_round = 5;

  int ensemble_size = 5;  // M
  double k_frac = 0.1;
  double ratio_r = 5.0;

  PartitionKind partition = PartitionKind::kDirichlet;
  double alpha = 0.6;
  int shards_per_client = 4;

  LocalConfig local;
  double mu = 0.01;  // FedProx proximal weight

  CoeffMode coefficients = CoeffMode::kEq2;
  bool normalize = true;
  bool wire_quantize = false;
  double threshold = 0.9;

  std::vector<int> hidden = {200, 100};
  BlobsConfig blobs;
  DataPaths data;

  std::uint64_t effective_data_seed() const {
    return data_seed ? *data_seed : seeds.front();
  }
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kUnknownKey, kType, kInvariant };
  ConfigError(Kind kind, int line, const std::string& msg)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        kind_(kind),
        line_(line) {}
  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

/// Parses the line-oriented `key = value` format with optional `[section]`
/// headers (a flat TOML subset: quoted strings, numbers, booleans, flat
/// arrays). Unknown keys are rejected; an empty string yields all defaults.
ExperimentConfig parse_config(const std::string& text);

/// Re-checks the cross-field invariants (also called by parse_config), so
/// programmatic overrides go through the same gate as file edits.
void validate_config(const ExperimentConfig& cfg);

}  // namespace shefl
