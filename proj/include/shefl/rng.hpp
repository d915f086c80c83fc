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
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace shefl {

/// Deterministic hierarchical random stream.
///
/// A stream is a pure function of its lineage (master_seed, purpose_tag,
/// round, client_id): the lineage components are folded into a 64-bit seed
/// with a splitmix64-style finalizer (purpose_tag enters via FNV-1a), which
/// seeds a mt19937_64 engine. All distributions below are implemented on the
/// raw 64-bit engine output rather than std::*_distribution, so the byte
/// sequence of every draw is stable across standard libraries and runs.
/// Each unit of parallel work derives its own stream; streams are never
/// shared between threads.
class RngStream {
 public:
  struct Lineage {
    std::uint64_t master_seed = 0;
    std::string purpose_tag;
    std::uint64_t round = 0;
    std::uint64_t client_id = 0;
  };

  RngStream(std::uint64_t master_seed, std::string_view purpose_tag,
            std::uint64_t round, std::uint64_t client_id);

  const Lineage& lineage() const { return lineage_; }

  std::uint64_t next_u64();

  /// Uniform real in [0,1), 53-bit resolution.
  double uniform();

  /// Standard normal via Box-Muller; the paired draw is cached.
  double normal();

  /// Uniform integer in [0, n), unbiased (rejection). n must be >= 1.
  std::uint64_t uniform_int(std::uint64_t n);

  /// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape must be > 0.
  double gamma(double shape);

  /// Dirichlet(alpha * 1_n) draw as normalized gammas.
  std::vector<double> dirichlet(double alpha, std::size_t n);

  /// In-place Fisher-Yates shuffle (descending index sweep).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  Lineage lineage_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Convenience constructor matching the lineage tuple.
RngStream derive_stream(std::uint64_t master_seed, std::string_view purpose_tag,
                        std::uint64_t round, std::uint64_t client_id);

}  // namespace shefl
