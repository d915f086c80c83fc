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

#include "shefl/param_vector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shefl {

namespace {
void require_same_dim(const ParamVector& a, const ParamVector& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
  }
}
}  // namespace

ParamVector add(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b, "add");
  ParamVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
  return out;
}

ParamVector sub(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b, "sub");
  ParamVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
  return out;
}

ParamVector scale(double c, const ParamVector& v) {
  ParamVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = c * v[i];
  return out;
}

ParamVector axpy(double c, const ParamVector& x, const ParamVector& y) {
  require_same_dim(x, y, "axpy");
  ParamVector out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = c * x[i] + y[i];
  return out;
}

double dot(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(const ParamVector& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) acc += v[i] * v[i];
  return std::sqrt(acc);
}

void axpy_inplace(double c, const ParamVector& x, ParamVector& y) {
  require_same_dim(x, y, "axpy_inplace");
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] += c * x[i];
}

bool all_finite(const ParamVector& v) {
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

}  // namespace shefl
