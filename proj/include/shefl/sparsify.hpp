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
#include <span>
#include <utility>
#include <vector>

#include "shefl/param_vector.hpp"

namespace shefl {

/// Index/value pairs of a top-k-sparsified client update. Indices are
/// strictly increasing; values keep full 64-bit precision in memory but
/// count as 4 bytes on the simulated wire.
struct SparseDelta {
  std::uint32_t dim = 0;
  std::uint16_t model_index = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;
};

/// Per-round element budgets. An LPC uplinks one submodel of k_l elements;
/// an HPC uplinks M submodels of k_h elements each, so the HPC:LPC uplink
/// ratio is exactly r:1 whenever neither budget clamps.
struct Budget {
  int k_l = 0;
  int k_h = 0;
  double k_frac = 0.0;
  double r = 1.0;
  int ensemble_size = 1;
  int dim = 0;
};

/// k_l = clamp(round(k_frac*d), 1, d); k_h = clamp(round(r*k_frac*d/M), 1, d).
/// Rounding is half-up.
Budget compute_budgets(double k_frac, double r, int ensemble_size, int dim);

/// The k entries of largest absolute value, ties broken by lower index.
/// Values are the original signed entries; output is sorted by index.
SparseDelta top_k(const ParamVector& v, int k, std::uint16_t model_index = 0);

/// out[i] = dense[i] + scale * value on the delta's support.
ParamVector apply_sparse(const ParamVector& dense, const SparseDelta& delta,
                         double scale);

/// In-place accumulate, for the aggregation hot path.
void add_sparse_inplace(ParamVector& dense, const SparseDelta& delta, double scale);

/// Rounds each value through a 32-bit float, emulating the wire width.
void quantize_wire(SparseDelta& delta);

/// Simulated uplink cost: 8 bytes per entry (4-byte index + 4-byte value)
/// plus an 8-byte header (4-byte dim + 2-byte model index + 2-byte reserved).
std::uint64_t uplink_bytes(const SparseDelta& delta);
std::uint64_t uplink_bytes(std::span<const SparseDelta> deltas);

/// Little-endian binary layout, exactly the accounted wire bytes:
/// header {u32 dim, u16 model_index, u16 reserved=0}, then per entry
/// {u32 index, f32 value}.
std::vector<std::uint8_t> encode_delta(const SparseDelta& delta);
SparseDelta decode_delta(std::span<const std::uint8_t> bytes);

}  // namespace shefl
