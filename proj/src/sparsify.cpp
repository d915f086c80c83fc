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

#include "shefl/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace shefl {

Budget compute_budgets(double k_frac, double r, int ensemble_size, int dim) {
  if (!(k_frac > 0.0 && k_frac <= 1.0)) {
    throw std::invalid_argument("compute_budgets: k_frac must be in (0,1]");
  }
  if (!(r >= 1.0)) throw std::invalid_argument("compute_budgets: r must be >= 1");
  if (ensemble_size < 1) throw std::invalid_argument("compute_budgets: M must be >= 1");
  if (dim < 1) throw std::invalid_argument("compute_budgets: d must be >= 1");

  auto clamp_k = [dim](double x) {
    long long k = std::llround(x);
    return static_cast<int>(std::clamp<long long>(k, 1, dim));
  };
  Budget b;
  b.k_frac = k_frac;
  b.r = r;
  b.ensemble_size = ensemble_size;
  b.dim = dim;
  b.k_l = clamp_k(k_frac * dim);
  b.k_h = clamp_k(r * k_frac * dim / ensemble_size);
  return b;
}

SparseDelta top_k(const ParamVector& v, int k, std::uint16_t model_index) {
  const std::size_t d = v.dim();
  if (k < 1 || static_cast<std::size_t>(k) > d) {
    throw std::invalid_argument("top_k: k must be in [1, dim]");
  }
  std::vector<std::uint32_t> order(d);
  std::iota(order.begin(), order.end(), 0u);
  auto larger = [&v](std::uint32_t a, std::uint32_t b) {
    double ma = std::fabs(v[a]), mb = std::fabs(v[b]);
    return ma != mb ? ma > mb : a < b;  // lower index wins ties
  };
  if (static_cast<std::size_t>(k) < d) {
    std::nth_element(order.begin(), order.begin() + k, order.end(), larger);
    order.resize(static_cast<std::size_t>(k));
  }
  std::sort(order.begin(), order.end());

  SparseDelta delta;
  delta.dim = static_cast<std::uint32_t>(d);
  delta.model_index = model_index;
  delta.entries.reserve(static_cast<std::size_t>(k));
  for (std::uint32_t idx : order) delta.entries.emplace_back(idx, v[idx]);
  return delta;
}

ParamVector apply_sparse(const ParamVector& dense, const SparseDelta& delta,
                         double scale) {
  ParamVector out = dense;
  add_sparse_inplace(out, delta, scale);
  return out;
}

void add_sparse_inplace(ParamVector& dense, const SparseDelta& delta, double scale) {
  if (dense.dim() != delta.dim) {
    throw std::invalid_argument("apply_sparse: dimension mismatch");
  }
  for (const auto& [idx, val] : delta.entries) {
    dense[idx] += scale * val;
  }
}

void quantize_wire(SparseDelta& delta) {
  for (auto& [idx, val] : delta.entries) {
    val = static_cast<double>(static_cast<float>(val));
  }
}

std::uint64_t uplink_bytes(const SparseDelta& delta) {
  return 8ull * delta.entries.size() + 8ull;
}

std::uint64_t uplink_bytes(std::span<const SparseDelta> deltas) {
  std::uint64_t total = 0;
  for (const auto& d : deltas) total += uplink_bytes(d);
  return total;
}

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t off) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[off + i]) << (8 * i);
  }
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_delta(const SparseDelta& delta) {
  std::vector<std::uint8_t> out;
  out.reserve(uplink_bytes(delta));
  put_le(out, delta.dim);
  put_le(out, delta.model_index);
  put_le(out, std::uint16_t{0});
  for (const auto& [idx, val] : delta.entries) {
    put_le(out, idx);
    float f = static_cast<float>(val);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_le(out, bits);
  }
  return out;
}

SparseDelta decode_delta(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || (bytes.size() - 8) % 8 != 0) {
    throw std::invalid_argument("decode_delta: malformed byte length");
  }
  SparseDelta delta;
  delta.dim = get_le<std::uint32_t>(bytes, 0);
  delta.model_index = get_le<std::uint16_t>(bytes, 4);
  std::size_t n = (bytes.size() - 8) / 8;
  delta.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t idx = get_le<std::uint32_t>(bytes, 8 + 8 * i);
    std::uint32_t bits = get_le<std::uint32_t>(bytes, 12 + 8 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    delta.entries.emplace_back(idx, static_cast<double>(f));
  }
  return delta;
}

}  // namespace shefl
