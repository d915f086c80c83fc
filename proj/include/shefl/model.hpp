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

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "shefl/param_vector.hpp"
#include "shefl/rng.hpp"

namespace shefl {

enum class ModelKind { kLogReg, kMlp };

/// Classifier architecture. The flat parameter dimension is a pure function
/// of this struct; parameters pack layer by layer as W (fan_in x fan_out,
/// column-major) followed by the bias (fan_out).
struct ModelSpec {
  ModelKind kind = ModelKind::kLogReg;
  int input_dim = 0;
  int num_classes = 0;
  std::vector<int> hidden = {200, 100};  // mlp only

  /// Per-layer (fan_in, fan_out) pairs: logreg has one layer, mlp has
  /// hidden.size() + 1 with ReLU between them.
  std::vector<std::pair<int, int>> layer_shapes() const;
};

std::size_t param_dim(const ModelSpec& spec);

/// A minibatch: inputs is batch_size x input_dim, labels in [0, num_classes).
/// An empty batch (0 rows) is accepted by the loss routines and contributes
/// no data term, which lets tests isolate the regularizer and prox terms.
struct Batch {
  Eigen::MatrixXd inputs;
  std::vector<int> labels;

  Eigen::Index size() const { return inputs.rows(); }
};

/// FedProx-style proximal term (mu/2)*||w - anchor||^2 over all parameters.
struct ProxTerm {
  double mu = 0.0;
  const ParamVector* anchor = nullptr;
};

/// Weights drawn from N(0, 1/fan_in) (scale 1/sqrt(fan_in)), biases zero.
/// Weight entries are drawn in storage order, layer by layer.
ParamVector init_params(const ModelSpec& spec, RngStream& rng);

/// Row-wise softmax probabilities, batch_size x num_classes. Max-subtracted
/// log-sum-exp keeps rows finite for large logits.
Eigen::MatrixXd forward_probs(const ModelSpec& spec, const ParamVector& params,
                              const Batch& batch);

struct LossGrad {
  double loss = 0.0;
  ParamVector grad;
};

/// loss = mean cross-entropy + (weight_decay/2)*sum ||W_l||^2 (weight
/// matrices only, biases excluded) + optional prox term; grad is its exact
/// analytic gradient. Non-finite intermediates raise std::runtime_error
/// naming the offending layer.
LossGrad loss_and_grad(const ModelSpec& spec, const ParamVector& params,
                       const Batch& batch, double weight_decay,
                       const ProxTerm* prox = nullptr);

/// Loss only (same objective as loss_and_grad).
double loss_value(const ModelSpec& spec, const ParamVector& params,
                  const Batch& batch, double weight_decay,
                  const ProxTerm* prox = nullptr);

/// Central-difference gradient oracle: (L(w+h e_j) - L(w-h e_j)) / (2h).
ParamVector finite_diff_grad(const ModelSpec& spec, const ParamVector& params,
                             const Batch& batch, double weight_decay,
                             const ProxTerm* prox, double h);

}  // namespace shefl
