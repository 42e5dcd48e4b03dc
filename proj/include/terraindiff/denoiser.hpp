#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "terraindiff/grid.hpp"
#include "terraindiff/nn.hpp"
#include "terraindiff/schedule.hpp"
#include "terraindiff/tensor.hpp"

namespace terraindiff {

struct ArchSpec {
  int base_channels = 16;
  int depth = 2;  // encoder stages, each halving resolution
  int resblocks_per_stage = 1;
  bool use_bottleneck_attention = false;
  int timestep_embed_dim = 32;

  int divisor() const { return 1 << depth; }
};

// How the two output maps become a DTM estimate.
enum class OutputMode {
  residual_gated,    // s - (1 - sigmoid(l)) * r_hat
  residual_ungated,  // s - r_hat
  absolute_gated,    // sigmoid(l) * s + (1 - sigmoid(l)) * a_hat
};

enum class NormKind { minmax, global_standardization, mean_shift };

OutputMode parse_output_mode(const std::string& s);
std::string to_string(OutputMode m);
NormKind parse_norm_kind(const std::string& s);
std::string to_string(NormKind k);

// Everything needed to rebuild and run a trained denoiser.
struct ModelConfig {
  ArchSpec arch;
  int diffusion_steps = 10;
  ScheduleKind schedule = ScheduleKind::cosine_alpha_bar;
  double beta_min = 1e-4;
  double beta_max = 0.02;
  OutputMode output = OutputMode::residual_gated;
  NormKind norm = NormKind::minmax;
  // Corpus statistics for global standardization (meters).
  double norm_mean = 0.0;
  double norm_std = 1.0;
  // Single-pass variant: g_t input is replaced by s and t fixed to T; one forward call at inference.
  bool single_pass = false;

  DiffusionSchedule make_schedule() const;
};

std::string to_json(const ModelConfig& cfg);

// Normalization used while training: min-max uses the joint DSM/DTM range.
AffineMap training_map(const ModelConfig& cfg, const Grid& s, const Grid& g, const Mask& m);
// Normalization at inference, from the DSM alone.
AffineMap inference_map(const ModelConfig& cfg, const Grid& s, const Mask& m);
ModelConfig model_config_from_json(const std::string& text);

// Gated encoder-decoder. Input channels [g_t, s]; output channels [r_hat, logits].
template <class T>
class UNet {
 public:
  explicit UNet(const ArchSpec& arch, nn::Options opt = {}, int diffusion_steps = 10);

  const nn::ParamLayout& layout() const { return layout_; }
  const ArchSpec& arch() const { return arch_; }
  nn::Options& options() { return opt_; }

  Tensor<T> forward(const T* params, const Tensor<T>& input, int t);
  // Accumulates parameter gradients for the last forward call.
  void backward(const T* params, T* grads, const Tensor<T>& dout);

  // Activations entering the output convolution, from the last forward call.
  const Tensor<T>& head_input() const { return head_.input(); }
  std::size_t head_weight_offset() const { return head_.weight_offset(); }
  std::size_t head_bias_offset() const { return head_.bias_offset(); }

 private:
  ArchSpec arch_;
  nn::Options opt_;
  int steps_;
  nn::ParamLayout layout_;
  nn::TimeEmbedding<T> time_;
  nn::Conv<T> stem_;
  std::vector<std::vector<nn::ResBlock<T>>> enc_;
  std::vector<nn::Conv<T>> down_;
  nn::ResBlock<T> mid1_, mid2_;
  nn::Attention<T> attn_;
  std::vector<nn::Conv<T>> up_;
  std::vector<std::vector<nn::ResBlock<T>>> dec_;
  nn::GroupNorm<T> out_norm_;
  nn::SiLU<T> out_act_;
  nn::Conv<T> head_;

  bool recorded_ = false;
  std::vector<T> embed_;
  std::vector<int> skip_channels_;
};

struct DenoiserModel {
  ModelConfig config;
  std::vector<float> parameters;

  static DenoiserModel create(const ModelConfig& config, std::uint64_t seed);
  std::size_t parameter_count() const { return parameters.size(); }
};

// Checkpoint: "FCKP" | u16 version | u32 json length | JSON config | u32 count | f32 params (LE).
void save_checkpoint(const std::filesystem::path& path, const DenoiserModel& model);
DenoiserModel load_checkpoint(const std::filesystem::path& path);
std::string checkpoint_bytes(const DenoiserModel& model);
DenoiserModel checkpoint_from_bytes(const std::string& bytes);

struct DenoiserOutput {
  Grid r_hat;
  Grid logits;
};

struct GatedOutput {
  Grid g0_hat;
  Grid logits;
};

// Raw network pass on normalized grids.
DenoiserOutput forward(const DenoiserModel& model, const Grid& g_t, const Grid& s, int t);

// sigmoid(l) * s + (1 - sigmoid(l)) * (s - r_hat), evaluated as s - (1 - sigmoid(l)) * r_hat.
Grid gate(const Grid& r_hat, const Grid& logits, const Grid& s);

// Combine network outputs according to the output mode.
Grid fuse(OutputMode mode, const Grid& first, const Grid& logits, const Grid& s);

GatedOutput gated_predict(const DenoiserModel& model, const Grid& g_t, const Grid& s, int t);

// Region of the source raster covered by a prediction request, and how it was normalized.
struct Window {
  AffineMap norm;
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;
};

// Anything that maps (g_t, s, t) in normalized space to a DTM estimate and logits.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual int steps() const = 0;
  virtual bool single_pass() const { return false; }
  virtual AffineMap inference_map(const Grid& s, const Mask& m) const;
  virtual GatedOutput predict(const Grid& g_t, const Grid& s, int t, const Window& where) const = 0;
};

class NetworkDenoiser : public Denoiser {
 public:
  explicit NetworkDenoiser(std::shared_ptr<const DenoiserModel> model) : model_(std::move(model)) {}
  int steps() const override { return model_->config.diffusion_steps; }
  bool single_pass() const override { return model_->config.single_pass; }
  AffineMap inference_map(const Grid& s, const Mask& m) const override;
  GatedOutput predict(const Grid& g_t, const Grid& s, int t, const Window& where) const override;
  const DenoiserModel& model() const { return *model_; }

 private:
  std::shared_ptr<const DenoiserModel> model_;
};

// Array forms of fuse and its adjoint. fuse_backward accumulates into d_first and d_logits.
template <class T>
void fuse_arrays(OutputMode mode, std::span<const T> first, std::span<const T> logits, std::span<const T> s,
                 std::span<T> out);
template <class T>
void fuse_backward(OutputMode mode, std::span<const T> first, std::span<const T> logits, std::span<const T> s,
                   std::span<const T> d_out, std::span<T> d_first, std::span<T> d_logits);

// Helpers shared with the trainer.
template <class T>
Tensor<T> pack_input(const Grid& g_t, const Grid& s);
void check_divisible(const ArchSpec& arch, int width, int height);

}  // namespace terraindiff
