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

#include <cstddef>
#include <vector>

namespace shefl {

/// Flat 64-bit parameter vector. One instance holds all parameters of a
/// single submodel; the dimension is fixed at construction.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim) : values_(dim, 0.0) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t dim() const { return values_.size(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const ParamVector& other) const = default;

 private:
  std::vector<double> values_;
};

// Elementwise arithmetic. Pure variants return fresh vectors and leave the
// operands untouched; dimension mismatches throw std::invalid_argument.
// Summation in dot/l2_norm runs in ascending index order, fixed across runs.
ParamVector add(const ParamVector& a, const ParamVector& b);
ParamVector sub(const ParamVector& a, const ParamVector& b);
ParamVector scale(double c, const ParamVector& v);
// c*x + y
ParamVector axpy(double c, const ParamVector& x, const ParamVector& y);
double dot(const ParamVector& a, const ParamVector& b);
double l2_norm(const ParamVector& v);

// In-place y += c*x, for hot loops.
void axpy_inplace(double c, const ParamVector& x, ParamVector& y);

bool all_finite(const ParamVector& v);

}  // namespace shefl
