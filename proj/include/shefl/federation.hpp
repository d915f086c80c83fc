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
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "shefl/config.hpp"
#include "shefl/dataset.hpp"
#include "shefl/metrics.hpp"
#include "shefl/model.hpp"
#include "shefl/sparsify.hpp"
#include "shefl/thread_pool.hpp"
#include "shefl/trace.hpp"

namespace shefl {

enum class PowerClass { kHpc, kLpc };

struct ClientRecord {
  int id = 0;
  PowerClass power_class = PowerClass::kLpc;
  std::vector<int> shard;

  int num_samples() const { return static_cast<int>(shard.size()); }
};

/// Server-held ensemble: M submodels, the population-wide permutation rows
/// governing single-model assignments (refreshed whenever round % M == 0),
/// and the current learning rate.
struct EnsembleState {
  int round = 0;
  std::vector<ParamVector> submodels;
  std::vector<std::vector<int>> perm_rows;  // indexed by client id
  double lr = 0.0;

  int ensemble_size() const { return static_cast<int>(submodels.size()); }
};

/// Per-submodel aggregation weights. Every HPC-trained submodel update is
/// pre-scaled by a_h before sparsification, every LPC one by a_l.
struct Coefficients {
  double a_h = 0.0;
  double a_l = 0.0;
};

/// Workload-aware weights: in eq2 mode a_h = ((H+L)/(2M))*(L/H) and
/// a_l = (H+L)/2, so the HPC and LPC delta means carry equal total weight;
/// balanced mode sets a_h = a_l = (H+L)/2. Degenerate rounds fall back to
/// single-class averaging: L = 0 gives (1,0), H = 0 gives (0,1).
Coefficients compute_coefficients(int h_count, int l_count, int ensemble_size,
                                  CoeffMode mode);

/// One round's realized plan. h_count[m] / l_count[m] are the numbers of
/// HPC- and LPC-class trainers of submodel m; for SHEFL h_count[m] equals
/// |hpc_selected| for every m.
struct RoundPlan {
  std::vector<int> hpc_selected;  // ascending ids
  std::vector<int> lpc_selected;  // ascending ids
  std::map<int, int> assignment;  // single-model trainers: client id -> submodel
  std::vector<int> h_count;
  std::vector<int> l_count;
  std::vector<Coefficients> coeffs;
};

/// Stratified uniform draw without replacement: hpc_per_round HPC ids and
/// clients_per_round - hpc_per_round LPC ids. Each stratum is drawn by a
/// partial Fisher-Yates over its ascending id list (HPC stratum first);
/// the returned lists are sorted ascending.
std::pair<std::vector<int>, std::vector<int>> sample_round(
    std::span<const ClientRecord> clients, int clients_per_round,
    int hpc_per_round, RngStream& rng);

/// The submodel index this client would train in the state's current round:
/// perm_rows[client_id][round mod M].
int permutation_assign(const EnsembleState& state, int client_id);

struct LocalHyper {
  double lr = 1e-2;
  int batch = 16;
  double weight_decay = 1e-3;
  int iters = 10;
  double prox_mu = 0.0;  // > 0 anchors a proximal term at the global params
};

/// Runs `iters` minibatch SGD steps from global_params on the client shard,
/// then returns top_k(coeff * (w_local - w_global), budget_k). Each step
/// draws min(batch, shard size) distinct indices by a partial Fisher-Yates
/// over a persistent working copy of the shard; if batch >= shard size the
/// full shard is used in index order.
SparseDelta local_update(const ModelSpec& spec, const Dataset& train,
                         const ClientRecord& client, int model_index,
                         const ParamVector& global_params, const LocalHyper& hyper,
                         double coeff, int budget_k, bool wire_quantize,
                         RngStream rng);

struct Upload {
  int client_id = 0;
  PowerClass power_class = PowerClass::kLpc;
  SparseDelta delta;
};

/// Class-weighted aggregation: per submodel m the update is
/// g_m = sum_HPC(delta)/H_m + sum_LPC(delta)/L_m (uploads arrive already
/// coefficient-scaled; an absent class contributes 0), applied as
/// w_m += g_m, divided by (a_h + a_l) first when normalize is set. The
/// client-side learning rate already lives inside the deltas, so the server
/// applies them with unit step. Uploads are reduced in their given order;
/// callers pass them ordered by ascending client id within each class.
void aggregate_shefl(EnsembleState& state, const RoundPlan& plan,
                     std::span<const Upload> uploads, bool normalize);

/// Unweighted per-submodel mean of uploads (FedAvg / FedEns servers).
void aggregate_mean(EnsembleState& state, const RoundPlan& plan,
                    std::span<const Upload> uploads);

/// Resolved per-algorithm behavior.
struct RoundPolicy {
  Algo algo = Algo::kShefl;
  int ensemble_size = 1;
  bool hpc_trains_all = false;  // SHEFL: HPCs train all M submodels
  bool class_weighted = false;  // SHEFL: Coefficients + class-weighted server
  int k_h = 1;
  int k_l = 1;
  double prox_mu = 0.0;
};

RoundPolicy make_policy(Algo algo, const ExperimentConfig& cfg, int param_dim);

/// Partitions the training set with the seed's "partition" stream and labels
/// ids [0, hpc_count) as HPC, the rest as LPC.
std::vector<ClientRecord> build_clients(const ExperimentConfig& cfg,
                                        const Dataset& train, std::uint64_t seed);

struct RoundOutcome {
  RoundPlan plan;
  std::uint64_t uplink_bytes = 0;
  double lr_used = 0.0;
};

/// One global round: permutation refresh (round % M == 0), stratified
/// sampling, local updates (parallel, one derived stream per task),
/// aggregation in ascending client-id order, and the 0.99-per-10-rounds
/// learning-rate schedule. Increments state.round.
RoundOutcome run_round(EnsembleState& state, const RoundPolicy& policy,
                       const ExperimentConfig& cfg,
                       std::span<const ClientRecord> clients,
                       const ModelSpec& spec, const Dataset& train,
                       std::uint64_t seed, ThreadPool& pool,
                       TraceWriter* trace = nullptr);

struct EvalResult {
  double ensemble_acc = 0.0;
  std::vector<double> per_model_acc;
};

EvalResult evaluate_ensemble(const ModelSpec& spec,
                             std::span<const ParamVector> submodels,
                             const Dataset& test, ThreadPool& pool);

ModelSpec make_model_spec(const ExperimentConfig& cfg, const Dataset& train);

/// Full run of one (algorithm, seed) pair: rounds of run_round, each
/// followed by an evaluation on the untouched test split.
std::vector<MetricRow> run_algorithm(Algo algo, const ExperimentConfig& cfg,
                                     const Dataset& train, const Dataset& test,
                                     std::uint64_t seed, ThreadPool& pool,
                                     TraceWriter* trace = nullptr);

}  // namespace shefl
