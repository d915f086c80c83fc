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

#include "shefl/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shefl {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

using ConstWMap = Eigen::Map<const MatrixXd>;
using ConstBMap = Eigen::Map<const VectorXd>;
using WMap = Eigen::Map<MatrixXd>;
using BMap = Eigen::Map<VectorXd>;

void require_dim(const ModelSpec& spec, const ParamVector& params) {
  if (params.dim() != param_dim(spec)) {
    throw std::invalid_argument(
        "params dim " + std::to_string(params.dim()) + " does not match spec dim " +
        std::to_string(param_dim(spec)));
  }
}

void require_finite(const MatrixXd& m, int layer, const char* what) {
  if (!m.allFinite()) {
    throw std::runtime_error("non-finite " + std::string(what) + " at layer " +
                             std::to_string(layer));
  }
}

// Offsets of W_l / b_l within the flat vector.
struct LayerView {
  std::size_t w_off, b_off;
  int fan_in, fan_out;
};

std::vector<LayerView> layer_views(const ModelSpec& spec) {
  std::vector<LayerView> views;
  std::size_t off = 0;
  for (auto [fan_in, fan_out] : spec.layer_shapes()) {
    views.push_back({off, off + static_cast<std::size_t>(fan_in) * fan_out,
                     fan_in, fan_out});
    off += static_cast<std::size_t>(fan_in) * fan_out + fan_out;
  }
  return views;
}

// Forward pass keeping per-layer activations (A[0] is the input) and
// pre-activations Z for backprop. Returns the logits.
MatrixXd forward_logits(const ModelSpec& spec, const ParamVector& params,
                        const MatrixXd& x, std::vector<MatrixXd>* activations) {
  auto views = layer_views(spec);
  MatrixXd a = x;
  if (activations) activations->push_back(a);
  for (std::size_t l = 0; l < views.size(); ++l) {
    const auto& v = views[l];
    ConstWMap w(params.data() + v.w_off, v.fan_in, v.fan_out);
    ConstBMap b(params.data() + v.b_off, v.fan_out);
    MatrixXd z = (a * w).rowwise() + b.transpose();
    require_finite(z, static_cast<int>(l), "pre-activation");
    if (l + 1 < views.size()) {
      a = z.cwiseMax(0.0);  // ReLU, subgradient 0 at 0
      if (activations) activations->push_back(a);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

MatrixXd softmax_rows(const MatrixXd& logits) {
  MatrixXd shifted = logits.colwise() - logits.rowwise().maxCoeff();
  MatrixXd e = shifted.array().exp();
  return e.array().colwise() / e.rowwise().sum().array();
}

// Mean cross-entropy via log-sum-exp with max subtraction.
double mean_cross_entropy(const MatrixXd& logits, const std::vector<int>& labels) {
  const Index n = logits.rows();
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    double mx = logits.row(i).maxCoeff();
    double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
    acc += lse - logits(i, labels[static_cast<std::size_t>(i)]);
  }
  return acc / static_cast<double>(n);
}

double decay_and_prox_loss(const ModelSpec& spec, const ParamVector& params,
                           double weight_decay, const ProxTerm* prox) {
  double loss = 0.0;
  if (weight_decay > 0.0) {
    for (const auto& v : layer_views(spec)) {
      ConstWMap w(params.data() + v.w_off, v.fan_in, v.fan_out);
      loss += 0.5 * weight_decay * w.squaredNorm();
    }
  }
  if (prox && prox->mu != 0.0) {
    const ParamVector& anchor = *prox->anchor;
    if (anchor.dim() != params.dim()) {
      throw std::invalid_argument("prox anchor dim mismatch");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < params.dim(); ++i) {
      double diff = params[i] - anchor[i];
      sq += diff * diff;
    }
    loss += 0.5 * prox->mu * sq;
  }
  return loss;
}

}  // namespace

std::vector<std::pair<int, int>> ModelSpec::layer_shapes() const {
  std::vector<std::pair<int, int>> shapes;
  if (kind == ModelKind::kLogReg) {
    shapes.emplace_back(input_dim, num_classes);
    return shapes;
  }
  int prev = input_dim;
  for (int h : hidden) {
    shapes.emplace_back(prev, h);
    prev = h;
  }
  shapes.emplace_back(prev, num_classes);
  return shapes;
}

std::size_t param_dim(const ModelSpec& spec) {
  std::size_t d = 0;
  for (auto [fan_in, fan_out] : spec.layer_shapes()) {
    d += static_cast<std::size_t>(fan_in) * fan_out + fan_out;
  }
  return d;
}

ParamVector init_params(const ModelSpec& spec, RngStream& rng) {
  ParamVector params(param_dim(spec));
  for (const auto& v : layer_views(spec)) {
    double s = 1.0 / std::sqrt(static_cast<double>(v.fan_in));
    std::size_t n = static_cast<std::size_t>(v.fan_in) * v.fan_out;
    for (std::size_t i = 0; i < n; ++i) params[v.w_off + i] = s * rng.normal();
    // biases stay zero
  }
  return params;
}

Eigen::MatrixXd forward_probs(const ModelSpec& spec, const ParamVector& params,
                              const Batch& batch) {
  require_dim(spec, params);
  MatrixXd logits = forward_logits(spec, params, batch.inputs, nullptr);
  return softmax_rows(logits);
}

LossGrad loss_and_grad(const ModelSpec& spec, const ParamVector& params,
                       const Batch& batch, double weight_decay,
                       const ProxTerm* prox) {
  require_dim(spec, params);
  auto views = layer_views(spec);
  LossGrad out;
  out.grad = ParamVector(params.dim());

  const Index n = batch.size();
  if (n > 0) {
    std::vector<MatrixXd> acts;
    MatrixXd logits = forward_logits(spec, params, batch.inputs, &acts);
    out.loss = mean_cross_entropy(logits, batch.labels);
    if (!std::isfinite(out.loss)) {
      throw std::runtime_error("non-finite loss at output layer");
    }

    // dZ at the output: (softmax - onehot) / n
    MatrixXd dz = softmax_rows(logits);
    for (Index i = 0; i < n; ++i) {
      dz(i, batch.labels[static_cast<std::size_t>(i)]) -= 1.0;
    }
    dz /= static_cast<double>(n);

    for (int l = static_cast<int>(views.size()) - 1; l >= 0; --l) {
      const auto& v = views[static_cast<std::size_t>(l)];
      const MatrixXd& a_prev = acts[static_cast<std::size_t>(l)];
      WMap dw(out.grad.data() + v.w_off, v.fan_in, v.fan_out);
      BMap db(out.grad.data() + v.b_off, v.fan_out);
      dw.noalias() = a_prev.transpose() * dz;
      db = dz.colwise().sum();
      if (l > 0) {
        ConstWMap w(params.data() + v.w_off, v.fan_in, v.fan_out);
        MatrixXd da = dz * w.transpose();
        // ReLU mask: strict positivity, subgradient 0 at 0
        dz = da.array() * (a_prev.array() > 0.0).cast<double>();
      }
    }
  }

  out.loss += decay_and_prox_loss(spec, params, weight_decay, prox);
  if (weight_decay > 0.0) {
    for (const auto& v : views) {
      ConstWMap w(params.data() + v.w_off, v.fan_in, v.fan_out);
      WMap dw(out.grad.data() + v.w_off, v.fan_in, v.fan_out);
      dw.noalias() += weight_decay * w;
    }
  }
  if (prox && prox->mu != 0.0) {
    const ParamVector& anchor = *prox->anchor;
    for (std::size_t i = 0; i < params.dim(); ++i) {
      out.grad[i] += prox->mu * (params[i] - anchor[i]);
    }
  }
  return out;
}

double loss_value(const ModelSpec& spec, const ParamVector& params,
                  const Batch& batch, double weight_decay, const ProxTerm* prox) {
  require_dim(spec, params);
  double loss = 0.0;
  if (batch.size() > 0) {
    MatrixXd logits = forward_logits(spec, params, batch.inputs, nullptr);
    loss = mean_cross_entropy(logits, batch.labels);
  }
  return loss + decay_and_prox_loss(spec, params, weight_decay, prox);
}

ParamVector finite_diff_grad(const ModelSpec& spec, const ParamVector& params,
                             const Batch& batch, double weight_decay,
                             const ProxTerm* prox, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  ParamVector probe = params;
  ParamVector grad(params.dim());
  for (std::size_t j = 0; j < params.dim(); ++j) {
    double orig = probe[j];
    probe[j] = orig + h;
    double up = loss_value(spec, probe, batch, weight_decay, prox);
    probe[j] = orig - h;
    double down = loss_value(spec, probe, batch, weight_decay, prox);
    probe[j] = orig;
    grad[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace shefl
