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

#include "shefl/federation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace shefl {

Coefficients compute_coefficients(int h_count, int l_count, int ensemble_size,
                                  CoeffMode mode) {
  if (h_count < 0 || l_count < 0 || h_count + l_count < 1) {
    throw std::invalid_argument("compute_coefficients: invalid counts");
  }
  if (l_count == 0) return {1.0, 0.0};
  if (h_count == 0) return {0.0, 1.0};
  // Single division keeps the values exact for small integer counts.
  double a_l = static_cast<double>(h_count + l_count) / 2.0;
  double a_h = mode == CoeffMode::kEq2
                   ? static_cast<double>(static_cast<long long>(h_count + l_count) * l_count) /
                         static_cast<double>(2LL * ensemble_size * h_count)
                   : a_l;
  return {a_h, a_l};
}

namespace {

// Partial Fisher-Yates: permutes the first `take` slots, returns them sorted.
std::vector<int> draw_without_replacement(std::vector<int> ids, int take, RngStream& rng) {
  for (int i = 0; i < take; ++i) {
    std::size_t j = static_cast<std::size_t>(i) +
                    static_cast<std::size_t>(rng.uniform_int(ids.size() - static_cast<std::size_t>(i)));
    std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(take));
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

std::pair<std::vector<int>, std::vector<int>> sample_round(
    std::span<const ClientRecord> clients, int clients_per_round,
    int hpc_per_round, RngStream& rng) {
  std::vector<int> hpc_ids, lpc_ids;
  for (const auto& c : clients) {
    (c.power_class == PowerClass::kHpc ? hpc_ids : lpc_ids).push_back(c.id);
  }
  std::sort(hpc_ids.begin(), hpc_ids.end());
  std::sort(lpc_ids.begin(), lpc_ids.end());

  int lpc_per_round = clients_per_round - hpc_per_round;
  if (hpc_per_round < 0 || lpc_per_round < 0) {
    throw std::invalid_argument("sample_round: negative stratum size");
  }
  if (hpc_per_round > static_cast<int>(hpc_ids.size()) ||
      lpc_per_round > static_cast<int>(lpc_ids.size())) {
    throw std::invalid_argument("sample_round: insufficient population (" +
                                std::to_string(hpc_ids.size()) + " HPC, " +
                                std::to_string(lpc_ids.size()) + " LPC)");
  }
  // HPC stratum consumes the stream first.
  auto hpc_sel = draw_without_replacement(std::move(hpc_ids), hpc_per_round, rng);
  auto lpc_sel = draw_without_replacement(std::move(lpc_ids), lpc_per_round, rng);
  return {std::move(hpc_sel), std::move(lpc_sel)};
}

int permutation_assign(const EnsembleState& state, int client_id) {
  const auto& row = state.perm_rows.at(static_cast<std::size_t>(client_id));
  return row[static_cast<std::size_t>(state.round) % row.size()];
}

SparseDelta local_update(const ModelSpec& spec, const Dataset& train,
                         const ClientRecord& client, int model_index,
                         const ParamVector& global_params, const LocalHyper& hyper,
                         double coeff, int budget_k, bool wire_quantize,
                         RngStream rng) {
  if (client.shard.empty()) {
    throw std::invalid_argument("local_update: client " + std::to_string(client.id) +
                                " has an empty shard");
  }
  ParamVector w = global_params;
  ProxTerm prox{hyper.prox_mu, &global_params};
  const ProxTerm* prox_ptr = hyper.prox_mu > 0.0 ? &prox : nullptr;

  std::vector<int> working = client.shard;
  const int batch = std::min<int>(hyper.batch, static_cast<int>(working.size()));
  for (int it = 0; it < hyper.iters; ++it) {
    std::span<const int> indices;
    if (batch == static_cast<int>(client.shard.size())) {
      indices = client.shard;  // full shard, index order
    } else {
      for (int i = 0; i < batch; ++i) {
        std::size_t j = static_cast<std::size_t>(i) +
                        static_cast<std::size_t>(
                            rng.uniform_int(working.size() - static_cast<std::size_t>(i)));
        std::swap(working[static_cast<std::size_t>(i)], working[j]);
      }
      indices = std::span<const int>(working.data(), static_cast<std::size_t>(batch));
    }
    Batch b = gather_batch(train, indices);
    LossGrad lg = loss_and_grad(spec, w, b, hyper.weight_decay, prox_ptr);
    axpy_inplace(-hyper.lr, lg.grad, w);
  }

  ParamVector delta = sub(w, global_params);
  if (coeff != 1.0) delta = scale(coeff, delta);
  SparseDelta sparse = top_k(delta, budget_k, static_cast<std::uint16_t>(model_index));
  if (wire_quantize) quantize_wire(sparse);
  return sparse;
}

namespace {

void validate_upload(const RoundPlan& plan, const Upload& upload, int ensemble_size) {
  const int m = upload.delta.model_index;
  if (m < 0 || m >= ensemble_size) {
    throw std::invalid_argument("upload for out-of-range submodel " + std::to_string(m));
  }
  auto assigned = plan.assignment.find(upload.client_id);
  if (assigned != plan.assignment.end()) {
    if (assigned->second != m) {
      throw std::invalid_argument("client " + std::to_string(upload.client_id) +
                                  " uploaded submodel " + std::to_string(m) +
                                  " but is assigned " + std::to_string(assigned->second));
    }
    return;
  }
  // Not a single-model trainer: must be a selected HPC training all submodels.
  if (upload.power_class != PowerClass::kHpc ||
      !std::binary_search(plan.hpc_selected.begin(), plan.hpc_selected.end(),
                          upload.client_id)) {
    throw std::invalid_argument("upload from unplanned client " +
                                std::to_string(upload.client_id));
  }
}

}  // namespace

void aggregate_shefl(EnsembleState& state, const RoundPlan& plan,
                     std::span<const Upload> uploads, bool normalize) {
  const int ensemble = state.ensemble_size();
  const std::size_t dim = state.submodels.front().dim();
  std::vector<ParamVector> hpc_sum(static_cast<std::size_t>(ensemble), ParamVector(dim));
  std::vector<ParamVector> lpc_sum(static_cast<std::size_t>(ensemble), ParamVector(dim));

  for (const Upload& u : uploads) {
    validate_upload(plan, u, ensemble);
    auto& sums = u.power_class == PowerClass::kHpc ? hpc_sum : lpc_sum;
    add_sparse_inplace(sums[u.delta.model_index], u.delta, 1.0);
  }

  for (int m = 0; m < ensemble; ++m) {
    const int h = plan.h_count[static_cast<std::size_t>(m)];
    const int l = plan.l_count[static_cast<std::size_t>(m)];
    if (h == 0 && l == 0) continue;  // no uploads, submodel untouched
    ParamVector g(dim);
    if (h > 0) axpy_inplace(1.0 / h, hpc_sum[static_cast<std::size_t>(m)], g);
    if (l > 0) axpy_inplace(1.0 / l, lpc_sum[static_cast<std::size_t>(m)], g);
    double step = 1.0;
    if (normalize) {
      const auto& c = plan.coeffs[static_cast<std::size_t>(m)];
      if (c.a_h + c.a_l > 0.0) step = 1.0 / (c.a_h + c.a_l);
    }
    axpy_inplace(step, g, state.submodels[static_cast<std::size_t>(m)]);
  }
}

void aggregate_mean(EnsembleState& state, const RoundPlan& plan,
                    std::span<const Upload> uploads) {
  const int ensemble = state.ensemble_size();
  const std::size_t dim = state.submodels.front().dim();
  std::vector<ParamVector> sum(static_cast<std::size_t>(ensemble), ParamVector(dim));
  std::vector<int> count(static_cast<std::size_t>(ensemble), 0);

  for (const Upload& u : uploads) {
    validate_upload(plan, u, ensemble);
    add_sparse_inplace(sum[u.delta.model_index], u.delta, 1.0);
    count[u.delta.model_index]++;
  }
  for (int m = 0; m < ensemble; ++m) {
    if (count[static_cast<std::size_t>(m)] == 0) continue;
    axpy_inplace(1.0 / count[static_cast<std::size_t>(m)],
                 sum[static_cast<std::size_t>(m)],
                 state.submodels[static_cast<std::size_t>(m)]);
  }
}

RoundPolicy make_policy(Algo algo, const ExperimentConfig& cfg, int param_dim) {
  RoundPolicy p;
  p.algo = algo;
  switch (algo) {
    case Algo::kShefl: {
      p.ensemble_size = cfg.ensemble_size;
      p.hpc_trains_all = true;
      p.class_weighted = true;
      Budget b = compute_budgets(cfg.k_frac, cfg.ratio_r, cfg.ensemble_size, param_dim);
      p.k_h = b.k_h;
      p.k_l = b.k_l;
      break;
    }
    case Algo::kFedAvg:
    case Algo::kFedProx: {
      p.ensemble_size = 1;
      Budget b = compute_budgets(cfg.k_frac, 1.0, 1, param_dim);
      p.k_h = p.k_l = b.k_l;
      if (algo == Algo::kFedProx) p.prox_mu = cfg.mu;
      break;
    }
    case Algo::kFedEns: {
      p.ensemble_size = cfg.ensemble_size;
      Budget b = compute_budgets(cfg.k_frac, 1.0, 1, param_dim);
      p.k_h = p.k_l = b.k_l;
      break;
    }
  }
  return p;
}

std::vector<ClientRecord> build_clients(const ExperimentConfig& cfg,
                                        const Dataset& train, std::uint64_t seed) {
  auto rng = derive_stream(seed, "partition", 0, 0);
  Partition part;
  if (cfg.partition == PartitionKind::kDirichlet) {
    part = partition_dirichlet(train.labels, train.num_classes, cfg.num_clients,
                               cfg.alpha, rng);
  } else {
    part = partition_pathological(train.labels, cfg.num_clients,
                                  cfg.shards_per_client, rng);
  }
  std::vector<ClientRecord> clients;
  clients.reserve(static_cast<std::size_t>(cfg.num_clients));
  for (int id = 0; id < cfg.num_clients; ++id) {
    clients.push_back({id,
                       id < cfg.hpc_count ? PowerClass::kHpc : PowerClass::kLpc,
                       std::move(part.shards[static_cast<std::size_t>(id)])});
  }
  return clients;
}

RoundOutcome run_round(EnsembleState& state, const RoundPolicy& policy,
                       const ExperimentConfig& cfg,
                       std::span<const ClientRecord> clients,
                       const ModelSpec& spec, const Dataset& train,
                       std::uint64_t seed, ThreadPool& pool, TraceWriter* trace) {
  const int t = state.round;
  const int ensemble = policy.ensemble_size;
  const double lr_t =
      cfg.local.lr * std::pow(cfg.local.decay, t / cfg.local.decay_every);
  state.lr = lr_t;

  if (t % ensemble == 0 || state.perm_rows.empty()) {
    state.perm_rows.assign(clients.size(), {});
    for (const ClientRecord& c : clients) {
      std::vector<int> row(static_cast<std::size_t>(ensemble));
      std::iota(row.begin(), row.end(), 0);
      auto rng = derive_stream(seed, "perm", static_cast<std::uint64_t>(t),
                               static_cast<std::uint64_t>(c.id));
      rng.shuffle(row);
      state.perm_rows[static_cast<std::size_t>(c.id)] = std::move(row);
    }
  }

  auto rng_sample = derive_stream(seed, "sample", static_cast<std::uint64_t>(t), 0);
  auto [hpc_sel, lpc_sel] =
      sample_round(clients, cfg.clients_per_round, cfg.hpc_per_round, rng_sample);

  RoundPlan plan;
  plan.hpc_selected = hpc_sel;
  plan.lpc_selected = lpc_sel;
  plan.h_count.assign(static_cast<std::size_t>(ensemble), 0);
  plan.l_count.assign(static_cast<std::size_t>(ensemble), 0);

  struct Task {
    int client_id;
    PowerClass cls;
    int model;
    double coeff;
    int k;
  };
  std::vector<Task> tasks;

  if (policy.hpc_trains_all) {
    for (int m = 0; m < ensemble; ++m) {
      plan.h_count[static_cast<std::size_t>(m)] = static_cast<int>(hpc_sel.size());
    }
    for (int id : lpc_sel) {
      int m = state.perm_rows[static_cast<std::size_t>(id)]
                             [static_cast<std::size_t>(t % ensemble)];
      plan.assignment[id] = m;
      plan.l_count[static_cast<std::size_t>(m)]++;
    }
    plan.coeffs.resize(static_cast<std::size_t>(ensemble));
    for (int m = 0; m < ensemble; ++m) {
      plan.coeffs[static_cast<std::size_t>(m)] = compute_coefficients(
          plan.h_count[static_cast<std::size_t>(m)],
          plan.l_count[static_cast<std::size_t>(m)], ensemble, cfg.coefficients);
    }
    for (int id : hpc_sel) {
      for (int m = 0; m < ensemble; ++m) {
        double coeff = plan.coeffs[static_cast<std::size_t>(m)].a_h;
        if (coeff > 0.0) tasks.push_back({id, PowerClass::kHpc, m, coeff, policy.k_h});
      }
    }
    for (int id : lpc_sel) {
      int m = plan.assignment.at(id);
      double coeff = plan.coeffs[static_cast<std::size_t>(m)].a_l;
      if (coeff > 0.0) tasks.push_back({id, PowerClass::kLpc, m, coeff, policy.k_l});
    }
  } else {
    // FedAvg/FedProx (M = 1) and FedEns: every selected client trains its
    // single permuted submodel; uploads are unscaled.
    std::vector<std::pair<int, PowerClass>> selected;
    for (int id : hpc_sel) selected.emplace_back(id, PowerClass::kHpc);
    for (int id : lpc_sel) selected.emplace_back(id, PowerClass::kLpc);
    std::sort(selected.begin(), selected.end());
    for (auto [id, cls] : selected) {
      int m = state.perm_rows[static_cast<std::size_t>(id)]
                             [static_cast<std::size_t>(t % ensemble)];
      plan.assignment[id] = m;
      (cls == PowerClass::kHpc ? plan.h_count : plan.l_count)[static_cast<std::size_t>(m)]++;
      tasks.push_back({id, cls, m, 1.0, policy.k_l});
    }
  }

  std::vector<Upload> uploads(tasks.size());
  pool.run(tasks.size(), [&](std::size_t i) {
    const Task& task = tasks[i];
    const ClientRecord& client = clients[static_cast<std::size_t>(task.client_id)];
    LocalHyper hyper{lr_t, cfg.local.batch, cfg.local.weight_decay, cfg.local.iters,
                     policy.prox_mu};
    auto rng = derive_stream(seed, "local" + std::to_string(task.model),
                             static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(task.client_id));
    uploads[i] = Upload{task.client_id, task.cls,
                        local_update(spec, train, client, task.model,
                                     state.submodels[static_cast<std::size_t>(task.model)],
                                     hyper, task.coeff, task.k, cfg.wire_quantize,
                                     std::move(rng))};
  });

  if (policy.class_weighted) {
    aggregate_shefl(state, plan, uploads, cfg.normalize);
  } else {
    aggregate_mean(state, plan, uploads);
  }

  RoundOutcome outcome;
  outcome.lr_used = lr_t;
  for (const Upload& u : uploads) {
    outcome.uplink_bytes += uplink_bytes(u.delta);
    if (trace) {
      trace->record(static_cast<std::uint32_t>(t + 1),
                    static_cast<std::uint32_t>(u.client_id), u.delta);
    }
  }
  outcome.plan = std::move(plan);
  state.round = t + 1;
  return outcome;
}

EvalResult evaluate_ensemble(const ModelSpec& spec,
                             std::span<const ParamVector> submodels,
                             const Dataset& test, ThreadPool& pool) {
  const int n = test.size();
  const std::size_t ensemble = submodels.size();
  constexpr int kChunk = 512;
  const std::size_t n_chunks = static_cast<std::size_t>((n + kChunk - 1) / kChunk);

  struct ChunkCounts {
    std::vector<int> per_model;
    int ens = 0;
  };
  std::vector<ChunkCounts> counts(n_chunks);

  pool.run(n_chunks, [&](std::size_t chunk) {
    const int begin = static_cast<int>(chunk) * kChunk;
    const int rows = std::min(kChunk, n - begin);
    Batch b;
    b.inputs = test.inputs.middleRows(begin, rows);
    b.labels.assign(test.labels.begin() + begin, test.labels.begin() + begin + rows);

    ChunkCounts& c = counts[chunk];
    c.per_model.assign(ensemble, 0);
    Eigen::MatrixXd mean_probs;
    for (std::size_t m = 0; m < ensemble; ++m) {
      Eigen::MatrixXd probs = forward_probs(spec, submodels[m], b);
      for (int i = 0; i < rows; ++i) {
        Eigen::Index arg = 0;
        probs.row(i).maxCoeff(&arg);
        if (static_cast<int>(arg) == b.labels[static_cast<std::size_t>(i)]) {
          c.per_model[m]++;
        }
      }
      if (m == 0) {
        mean_probs = std::move(probs);
      } else {
        mean_probs += probs;
      }
    }
    for (int i = 0; i < rows; ++i) {
      int best = 0;
      for (Eigen::Index cls = 1; cls < mean_probs.cols(); ++cls) {
        if (mean_probs(i, cls) > mean_probs(i, best)) best = static_cast<int>(cls);
      }
      if (best == b.labels[static_cast<std::size_t>(i)]) c.ens++;
    }
  });

  EvalResult result;
  result.per_model_acc.assign(ensemble, 0.0);
  long long ens_correct = 0;
  std::vector<long long> model_correct(ensemble, 0);
  for (const auto& c : counts) {
    ens_correct += c.ens;
    for (std::size_t m = 0; m < ensemble; ++m) model_correct[m] += c.per_model[m];
  }
  result.ensemble_acc = static_cast<double>(ens_correct) / n;
  for (std::size_t m = 0; m < ensemble; ++m) {
    result.per_model_acc[m] = static_cast<double>(model_correct[m]) / n;
  }
  return result;
}

ModelSpec make_model_spec(const ExperimentConfig& cfg, const Dataset& train) {
  ModelSpec spec;
  spec.kind = cfg.model;
  spec.input_dim = train.input_dim();
  spec.num_classes = train.num_classes;
  spec.hidden = cfg.hidden;
  return spec;
}

std::vector<MetricRow> run_algorithm(Algo algo, const ExperimentConfig& cfg,
                                     const Dataset& train, const Dataset& test,
                                     std::uint64_t seed, ThreadPool& pool,
                                     TraceWriter* trace) {
  ModelSpec spec = make_model_spec(cfg, train);
  RoundPolicy policy = make_policy(algo, cfg, static_cast<int>(param_dim(spec)));
  std::vector<ClientRecord> clients = build_clients(cfg, train, seed);

  EnsembleState state;
  state.submodels.reserve(static_cast<std::size_t>(policy.ensemble_size));
  for (int m = 0; m < policy.ensemble_size; ++m) {
    auto rng = derive_stream(seed, "init", 0, static_cast<std::uint64_t>(m));
    state.submodels.push_back(init_params(spec, rng));
  }
  state.lr = cfg.local.lr;

  std::vector<MetricRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.rounds));
  for (int r = 0; r < cfg.rounds; ++r) {
    RoundOutcome out = run_round(state, policy, cfg, clients, spec, train, seed, pool, trace);
    EvalResult ev = evaluate_ensemble(spec, state.submodels, test, pool);
    MetricRow row;
    row.round = state.round;
    row.algo = algo_name(algo);
    row.seed = seed;
    row.test_acc = ev.ensemble_acc;
    row.per_model_acc = std::move(ev.per_model_acc);
    row.uplink_bytes = out.uplink_bytes;
    row.lr = out.lr_used;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace shefl
