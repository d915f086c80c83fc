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

#include "shefl/partition.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace shefl {

namespace {

// CDF inversion; the final bucket absorbs floating-point residue.
std::size_t categorical(const std::vector<double>& probs, RngStream& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

void repair_empty_shards(std::vector<std::vector<int>>& shards) {
  for (auto& shard : shards) {
    if (!shard.empty()) continue;
    auto donor = std::max_element(
        shards.begin(), shards.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });
    if (donor->size() < 2) {
      throw std::runtime_error("partition repair failed: no shard can donate");
    }
    shard.push_back(donor->back());
    donor->pop_back();
  }
}

}  // namespace

Partition partition_dirichlet(const std::vector<int>& labels, int num_classes,
                              int n_clients, double alpha, RngStream& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("partition_dirichlet: alpha must be > 0");
  if (n_clients < 1) throw std::invalid_argument("partition_dirichlet: n_clients must be >= 1");
  if (labels.size() < static_cast<std::size_t>(n_clients)) {
    throw std::invalid_argument("partition_dirichlet: fewer samples than clients");
  }

  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class.at(static_cast<std::size_t>(labels[i])).push_back(static_cast<int>(i));
  }

  Partition out;
  out.shards.resize(static_cast<std::size_t>(n_clients));
  for (int c = 0; c < num_classes; ++c) {
    const auto& members = by_class[static_cast<std::size_t>(c)];
    if (members.empty()) continue;
    std::vector<double> probs = rng.dirichlet(alpha, static_cast<std::size_t>(n_clients));
    for (int idx : members) {
      out.shards[categorical(probs, rng)].push_back(idx);
    }
  }

  repair_empty_shards(out.shards);
  for (auto& shard : out.shards) std::sort(shard.begin(), shard.end());
  return out;
}

Partition partition_pathological(const std::vector<int>& labels, int n_clients,
                                 int shards_per_client, RngStream& rng) {
  if (n_clients < 1 || shards_per_client < 1) {
    throw std::invalid_argument("partition_pathological: counts must be >= 1");
  }
  const std::size_t n = labels.size();
  const std::size_t total_shards =
      static_cast<std::size_t>(n_clients) * static_cast<std::size_t>(shards_per_client);
  if (total_shards > n) {
    throw std::invalid_argument(
        "partition_pathological: n_clients * shards_per_client exceeds sample count");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    int la = labels[static_cast<std::size_t>(a)], lb = labels[static_cast<std::size_t>(b)];
    return la != lb ? la < lb : a < b;
  });

  // Contiguous label-sorted shards; the remainder pads the final shard.
  const std::size_t shard_size = n / total_shards;
  std::vector<std::size_t> shard_ids(total_shards);
  std::iota(shard_ids.begin(), shard_ids.end(), std::size_t{0});
  rng.shuffle(shard_ids);

  Partition out;
  out.shards.resize(static_cast<std::size_t>(n_clients));
  for (int client = 0; client < n_clients; ++client) {
    auto& shard = out.shards[static_cast<std::size_t>(client)];
    for (int s = 0; s < shards_per_client; ++s) {
      std::size_t id = shard_ids[static_cast<std::size_t>(client) * shards_per_client +
                                 static_cast<std::size_t>(s)];
      std::size_t begin = id * shard_size;
      std::size_t end = (id + 1 == total_shards) ? n : (id + 1) * shard_size;
      for (std::size_t i = begin; i < end; ++i) shard.push_back(order[i]);
    }
    std::sort(shard.begin(), shard.end());
  }
  return out;
}

}  // namespace shefl
