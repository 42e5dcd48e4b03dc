#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "terraindiff/config.hpp"

namespace terraindiff {

enum class AblationAxis {
  no_diffusion_unet,
  absolute_target,
  no_gating,
  init_mode,
  loss_subset,
  normalization,
  timesteps,
  blend_mode,
};

AblationAxis parse_ablation_axis(const std::string& s);
std::string to_string(AblationAxis a);
std::vector<AblationAxis> all_ablation_axes();

struct AblationSpec {
  AblationAxis axis = AblationAxis::no_gating;
  RunConfig base;                            // corpus sizes, budget (train.horizon_steps) and seed
  std::uint64_t corpus_seed = 7;
  std::vector<int> reverse_steps{1, 2, 5, 10, 20};  // timesteps axis
  int stitch_size = 256;                     // blend_mode axis scene size
};

struct AblationRow {
  std::string variant;
  double rmse = 0.0;
  double mae = 0.0;
  double e_t1 = 0.0;
  double e_t2 = 0.0;
  double e_tot = 0.0;
  bool converged = true;  // false when validation RMSE does not beat the identity baseline
  std::string note;
};

// Trained models keyed by their full training recipe, so axes sharing a baseline train it once.
// With a directory set, models are also persisted as checkpoints there.
class ModelCache {
 public:
  explicit ModelCache(std::optional<std::filesystem::path> dir = std::nullopt) : dir_(std::move(dir)) {}
  std::shared_ptr<const DenoiserModel> get_or_train(const RunConfig& cfg, std::uint64_t corpus_seed,
                                                    const std::vector<Example>& train,
                                                    const std::vector<Example>& val);
  std::size_t trained() const { return trained_; }

 private:
  std::optional<std::filesystem::path> dir_;
  std::map<std::string, std::shared_ptr<const DenoiserModel>> models_;
  std::mutex mutex_;
  std::size_t trained_ = 0;
};

// Recipe string identifying a trained model.
std::string training_key(const RunConfig& cfg, std::uint64_t corpus_seed);

struct Corpus {
  std::vector<Example> train;
  std::vector<Example> val;
};

Corpus make_corpus(const RunConfig& cfg, std::uint64_t corpus_seed);

std::vector<AblationRow> run_ablation(const AblationSpec& spec, ModelCache& cache);

std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace terraindiff
