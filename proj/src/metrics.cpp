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

#include "shefl/metrics.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace shefl {

std::vector<int> ensemble_predict(const ModelSpec& spec,
                                  std::span<const ParamVector> submodels,
                                  const Batch& batch) {
  if (submodels.empty()) {
    throw std::invalid_argument("ensemble_predict: at least one submodel required");
  }
  Eigen::MatrixXd mean_probs = forward_probs(spec, submodels[0], batch);
  for (std::size_t m = 1; m < submodels.size(); ++m) {
    mean_probs += forward_probs(spec, submodels[m], batch);
  }
  mean_probs /= static_cast<double>(submodels.size());

  std::vector<int> predictions(static_cast<std::size_t>(batch.size()));
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    int best = 0;
    for (Eigen::Index c = 1; c < mean_probs.cols(); ++c) {
      if (mean_probs(i, c) > mean_probs(i, best)) best = static_cast<int>(c);
    }
    predictions[static_cast<std::size_t>(i)] = best;
  }
  return predictions;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw std::invalid_argument("accuracy: length mismatch or empty input");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

std::optional<int> convergence_rounds(std::span<const double> acc_series,
                                      double threshold) {
  if (acc_series.empty()) {
    throw std::invalid_argument("convergence_rounds: empty series");
  }
  for (std::size_t i = 0; i < acc_series.size(); ++i) {
    if (acc_series[i] >= threshold) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

std::string metrics_csv(std::span<const MetricRow> rows) {
  std::string out = "round,algo,seed,test_acc,per_model_acc,uplink_bytes,lr,wall_ms\n";
  char buf[64];
  for (const auto& row : rows) {
    out += std::to_string(row.round);
    out += ',';
    out += row.algo;
    out += ',';
    out += std::to_string(row.seed);
    std::snprintf(buf, sizeof(buf), ",%.6f,", row.test_acc);
    out += buf;
    for (std::size_t m = 0; m < row.per_model_acc.size(); ++m) {
      std::snprintf(buf, sizeof(buf), m == 0 ? "%.6f" : ";%.6f", row.per_model_acc[m]);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%" PRIu64 ",%.6f,%" PRId64 "\n",
                  row.uplink_bytes, row.lr, row.wall_ms);
    out += buf;
  }
  return out;
}

void write_metrics_csv(const std::filesystem::path& path,
                       std::span<const MetricRow> rows) {
  std::ofstream file(path, std::ios::binary);  // binary keeps LF endings
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << metrics_csv(rows);
}

std::vector<MetricRow> parse_metrics_csv(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(file, line) ||
      line != "round,algo,seed,test_acc,per_model_acc,uplink_bytes,lr,wall_ms") {
    throw std::runtime_error(path.string() + ": unexpected metrics header");
  }
  std::vector<MetricRow> rows;
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    MetricRow row;
    auto next = [&](const char* what) {
      if (!std::getline(ss, field, ',')) {
        throw std::runtime_error(path.string() + ": missing field " + what);
      }
      return field;
    };
    row.round = std::stoi(next("round"));
    row.algo = next("algo");
    row.seed = std::stoull(next("seed"));
    row.test_acc = std::stod(next("test_acc"));
    std::string per_model = next("per_model_acc");
    std::stringstream pm(per_model);
    std::string acc;
    while (std::getline(pm, acc, ';')) row.per_model_acc.push_back(std::stod(acc));
    row.uplink_bytes = std::stoull(next("uplink_bytes"));
    row.lr = std::stod(next("lr"));
    row.wall_ms = std::stoll(next("wall_ms"));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace shefl
