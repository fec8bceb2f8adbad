#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qaec/qae.hpp"
#include "qaec/sources.hpp"
#include "qaec/types.hpp"

namespace qaec {

struct TrainConfig {
  int epochs = 500;
  double learning_rate = 1e-3;
  int batch_size = 64;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double init_scale = 0.01;
};

struct TrainTrace {
  std::vector<std::pair<double, double>> per_epoch;  // (train, test) infidelity
  QaeParams final_params;
};

struct LossGradient {
  double loss = 0.0;
  CMatrix grad_U;  // Hermitian
  CMatrix grad_V;  // Hermitian
};

struct TrainOptions {
  // > 0: run that many full-batch steps per epoch instead of shuffled
  // mini-batches (used by the exact five-point objective).
  int steps_per_epoch = 0;
  // When set, per-epoch train/test infidelities are recorded as
  // 1 - exact_eval(encoder, decoder) instead of sample averages.
  std::function<double(const KrausChannel&, const KrausChannel&)> exact_eval;
};

// Worker threads for per-sample loss/gradient terms. Chunking is fixed, so
// results are bit-identical for every thread count.
void set_train_threads(int n);
int train_threads();

QaeParams init_params(const QaeArchitecture& arch, const TrainConfig& cfg);

// Mean infidelity over the batch and its Hermitian generator gradients,
// computed through the spectral differential of exp(iH).
LossGradient loss_and_gradient(const QaeParams& p, const std::vector<CVector>& batch);

TrainTrace train(const QaeArchitecture& arch, const std::vector<CVector>& train_states,
                 const std::vector<CVector>& test_states, const TrainConfig& cfg,
                 const TrainOptions& opts = {});

enum class TrainMode { Sampled, FivePoint, ExactMu1 };

struct ExperimentSpec {
  std::string source;  // mu1 | haar | phase | file
  std::string path;    // state-list file when source == file
  double epsilon = 0.1;
  int n = 2;
  int k = 1;
  std::vector<int> n_Bs;  // paired with n_Es, one arch per entry
  std::vector<int> n_Es;
  TrainConfig cfg;
  std::vector<std::uint64_t> seeds;
  TrainMode mode = TrainMode::Sampled;
  int train_count = 2000;
  int test_count = 1000;
};

ExperimentSpec parse_experiment(const std::string& path);

struct ExperimentResult {
  std::vector<std::string> outputs;  // written files
};

// Trains every (arch, seed) pair, writing curves.csv and summary.csv.
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_dir);

}  // namespace qaec
