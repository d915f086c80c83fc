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

#include <vector>

#include "shefl/rng.hpp"

namespace shefl {

/// Per-client index lists into a dataset. Shards are disjoint, cover all
/// indices, and are never empty.
struct Partition {
  std::vector<std::vector<int>> shards;

  std::size_t n_clients() const { return shards.size(); }
};

/// Non-IID split: for each class, a Dirichlet(alpha) draw over clients
/// assigns that class's samples multinomially. A repair pass then moves one
/// sample at a time from the currently largest shard into any empty shard.
/// Smaller alpha means more heterogeneous shards.
Partition partition_dirichlet(const std::vector<int>& labels, int num_classes,
                              int n_clients, double alpha, RngStream& rng);

/// Pathological split: indices sorted by label are cut into
/// n_clients * shards_per_client contiguous shards (remainder appended to
/// the final shard) and dealt randomly, shards_per_client per client.
Partition partition_pathological(const std::vector<int>& labels, int n_clients,
                                 int shards_per_client, RngStream& rng);

}  // namespace shefl
