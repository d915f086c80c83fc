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

#include "shefl/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shefl {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// splitmix64 finalizer folding one component into the running seed.
std::uint64_t mix(std::uint64_t acc, std::uint64_t component) {
  std::uint64_t z = acc + 0x9e3779b97f4a7c15ULL + component;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string_view purpose_tag,
                     std::uint64_t round, std::uint64_t client_id)
    : lineage_{master_seed, std::string(purpose_tag), round, client_id} {
  std::uint64_t seed = mix(master_seed, fnv1a(purpose_tag));
  seed = mix(seed, round);
  seed = mix(seed, client_id);
  engine_.seed(seed);
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = 1.0 - uniform();  // (0,1], keeps log finite
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be >= 1");
  // reject the partial block at the top of the 2^64 range
  std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t x = next_u64();
    if (x >= threshold) return x % n;
  }
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    double u = 1.0 - uniform();  // (0,1]
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

std::vector<double> RngStream::dirichlet(double alpha, std::size_t n) {
  std::vector<double> out(n);
  for (;;) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = gamma(alpha);
      sum += out[i];
    }
    if (sum > 0.0) {
      for (double& x : out) x /= sum;
      return out;
    }
  }
}

RngStream derive_stream(std::uint64_t master_seed, std::string_view purpose_tag,
                        std::uint64_t round, std::uint64_t client_id) {
  return RngStream(master_seed, purpose_tag, round, client_id);
}

}  // namespace shefl
