#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "terraindiff/augment.hpp"
#include "terraindiff/denoiser.hpp"
#include "terraindiff/losses.hpp"
#include "terraindiff/sampler.hpp"

namespace terraindiff {

struct TrainConfig {
  double lr = 1e-4;
  double weight_decay = 0.01;
  int warmup_steps = 500;
  int max_epochs = 1000;
  int batch_size = 16;
  int patch = 64;
  double alpha = 0.25;  // ground-mask threshold in meters
  std::uint64_t seed = 1;
  int early_stop_patience = 10;
  int horizon_steps = 5000;  // cosine end and hard cap on optimizer steps
  int val_every = 0;         // optimizer steps between validations, 0 = once per epoch
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  bool augment = true;
  AugmentConfig augmentation;  // patch is taken from `patch`
  LossWeights loss;
  InitKind val_init = InitKind::noisy_dsm;
  void validate(const ArchSpec& arch) const;
};

// One training/validation scene. `ground` is the reference classification.
struct Example {
  Grid dsm;
  Grid dtm;
  Mask valid;
  Mask ground;
};

// Synthetic corpus: scene i uses a seed derived from (seed, i).
std::vector<Example> synthetic_corpus(int count, std::uint64_t seed, int size, double pixel_size = 1.0);

// Mean and standard deviation of every valid DSM and DTM value, for global standardization.
std::pair<double, double> corpus_statistics(const std::vector<Example>& corpus);

// Adam moments are kept in double regardless of the parameter type.
struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
  static OptimizerState zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0}; }
};

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// Increments the step counter, then applies decoupled decay and the bias-corrected Adam update.
template <class T>
void adamw_update(std::span<T> params, std::span<const T> grads, OptimizerState& opt, double lr, const AdamParams& a);

// Linear warmup from 0, cosine decay to 0 at horizon_steps.
double lr_at(std::int64_t step, const TrainConfig& cfg);

// Network input and loss targets for one sample, all in normalized units.
template <class T>
struct PreparedSample {
  Tensor<T> input;  // [g_t, s]
  std::vector<T> s;
  std::vector<T> g;
  std::vector<std::uint8_t> m_alpha;
  std::vector<std::uint8_t> m;
  int t = 1;
  double spacing = 1.0;
};

// Augment, normalize, derive the ground mask and forward-diffuse the DTM.
PreparedSample<float> prepare_sample(const Example& ex, const ModelConfig& model, const DiffusionSchedule& sched,
                                     const TrainConfig& cfg, std::mt19937_64& rng);

// Loss of one prepared sample. When grads is non-null the parameter gradient is accumulated.
template <class T>
LossBreakdown objective(UNet<T>& net, OutputMode mode, const T* params, T* grads, const PreparedSample<T>& x,
                        const LossWeights& w);

// One AdamW step on the mean loss of the batch. Throws DivergenceError before touching the
// model when the loss or gradient is non-finite.
LossBreakdown train_step(DenoiserModel& model, std::span<const Example* const> batch, const DiffusionSchedule& sched,
                         const TrainConfig& cfg, OptimizerState& opt, std::mt19937_64& rng);

struct TrainLogRow {
  std::int64_t step = 0;
  LossBreakdown loss;
  double lr = 0.0;
};

struct ValidationRow {
  std::int64_t step = 0;
  double rmse = 0.0;
  double mae = 0.0;
  double e_tot = 0.0;
};

struct ValidationResult {
  double rmse = 0.0;
  double mae = 0.0;
  double e_t1 = 0.0;
  double e_t2 = 0.0;
  double e_tot = 0.0;
};

// Full reverse sampling over a validation set, errors pooled over all pixels.
ValidationResult evaluate(const DenoiserModel& model, const std::vector<Example>& set, InitKind init, int reverse_steps,
                          std::uint64_t seed);

// RMSE/E_tot of the identity prediction (DTM := DSM, everything ground).
ValidationResult identity_baseline(const std::vector<Example>& set);

struct FitResult {
  DenoiserModel best;
  std::vector<TrainLogRow> log;
  std::vector<ValidationRow> validation;
  double best_rmse = 0.0;
  std::int64_t steps = 0;
  bool early_stopped = false;
};

using ProgressFn = std::function<void(const TrainLogRow&, const ValidationRow*)>;

FitResult fit(DenoiserModel model, const std::vector<Example>& train, const std::vector<Example>& val,
              const TrainConfig& cfg, const ProgressFn& progress = {});

std::string train_log_csv(const std::vector<TrainLogRow>& rows);
std::string validation_csv(const std::vector<ValidationRow>& rows);

}  // namespace terraindiff
