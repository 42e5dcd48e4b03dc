#include "terraindiff/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"
#include "terraindiff/errors.hpp"
#include "terraindiff/fgrid.hpp"

namespace terraindiff {

OutputMode parse_output_mode(const std::string& s) {
  if (s == "residual_gated") return OutputMode::residual_gated;
  if (s == "residual_ungated") return OutputMode::residual_ungated;
  if (s == "absolute_gated") return OutputMode::absolute_gated;
  throw InputError("unknown output mode: " + s);
}

std::string to_string(OutputMode m) {
  switch (m) {
    case OutputMode::residual_gated: return "residual_gated";
    case OutputMode::residual_ungated: return "residual_ungated";
    case OutputMode::absolute_gated: return "absolute_gated";
  }
  return "?";
}

NormKind parse_norm_kind(const std::string& s) {
  if (s == "minmax") return NormKind::minmax;
  if (s == "global_standardization") return NormKind::global_standardization;
  if (s == "mean_shift") return NormKind::mean_shift;
  throw InputError("unknown normalization: " + s);
}

std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::minmax: return "minmax";
    case NormKind::global_standardization: return "global_standardization";
    case NormKind::mean_shift: return "mean_shift";
  }
  return "?";
}

DiffusionSchedule ModelConfig::make_schedule() const {
  return terraindiff::make_schedule(schedule, diffusion_steps, beta_min, beta_max);
}

std::string to_json(const ModelConfig& cfg) {
  nlohmann::json j;
  j["arch"] = {{"base_channels", cfg.arch.base_channels},
               {"depth", cfg.arch.depth},
               {"resblocks_per_stage", cfg.arch.resblocks_per_stage},
               {"use_bottleneck_attention", cfg.arch.use_bottleneck_attention},
               {"timestep_embed_dim", cfg.arch.timestep_embed_dim}};
  j["diffusion"] = {{"steps", cfg.diffusion_steps},
                    {"schedule", to_string(cfg.schedule)},
                    {"beta_min", cfg.beta_min},
                    {"beta_max", cfg.beta_max}};
  j["output"] = to_string(cfg.output);
  j["normalization"] = {{"kind", to_string(cfg.norm)}, {"mean", cfg.norm_mean}, {"std", cfg.norm_std}};
  j["single_pass"] = cfg.single_pass;
  return j.dump();
}

ModelConfig model_config_from_json(const std::string& text) {
  ModelConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& a = j.at("arch");
    cfg.arch.base_channels = a.at("base_channels");
    cfg.arch.depth = a.at("depth");
    cfg.arch.resblocks_per_stage = a.at("resblocks_per_stage");
    cfg.arch.use_bottleneck_attention = a.at("use_bottleneck_attention");
    cfg.arch.timestep_embed_dim = a.at("timestep_embed_dim");
    const auto& d = j.at("diffusion");
    cfg.diffusion_steps = d.at("steps");
    cfg.schedule = parse_schedule_kind(d.at("schedule"));
    cfg.beta_min = d.at("beta_min");
    cfg.beta_max = d.at("beta_max");
    cfg.output = parse_output_mode(j.at("output"));
    const auto& n = j.at("normalization");
    cfg.norm = parse_norm_kind(n.at("kind"));
    cfg.norm_mean = n.at("mean");
    cfg.norm_std = n.at("std");
    cfg.single_pass = j.value("single_pass", false);
  } catch (const nlohmann::json::exception& e) {
    throw FileError(std::string("bad model config JSON: ") + e.what());
  }
  return cfg;
}

namespace {

double valid_mean(const Grid& s, const Mask& m) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!m[i] || !std::isfinite(s[i])) continue;
    sum += s[i];
    ++n;
  }
  if (n == 0) throw InputError("empty raster");
  return sum / static_cast<double>(n);
}

}  // namespace

AffineMap training_map(const ModelConfig& cfg, const Grid& s, const Grid& g, const Mask& m) {
  switch (cfg.norm) {
    case NormKind::minmax: {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!m[i] || !std::isfinite(s[i]) || !std::isfinite(g[i])) continue;
        lo = std::min({lo, static_cast<double>(s[i]), static_cast<double>(g[i])});
        hi = std::max({hi, static_cast<double>(s[i]), static_cast<double>(g[i])});
      }
      if (!(hi >= lo)) throw InputError("empty raster");
      if (hi == lo) return AffineMap::from(inference_params(s, m));
      return AffineMap::from({lo, hi});
    }
    case NormKind::global_standardization: return {cfg.norm_mean, 1.0 / cfg.norm_std};
    case NormKind::mean_shift: return {valid_mean(s, m), 1.0};
  }
  return {};
}

AffineMap inference_map(const ModelConfig& cfg, const Grid& s, const Mask& m) {
  switch (cfg.norm) {
    case NormKind::minmax: return AffineMap::from(inference_params(s, m));
    case NormKind::global_standardization: return {cfg.norm_mean, 1.0 / cfg.norm_std};
    case NormKind::mean_shift: return {valid_mean(s, m), 1.0};
  }
  return {};
}

AffineMap Denoiser::inference_map(const Grid& s, const Mask& m) const {
  return AffineMap::from(inference_params(s, m));
}

AffineMap NetworkDenoiser::inference_map(const Grid& s, const Mask& m) const {
  return terraindiff::inference_map(model_->config, s, m);
}

// ---------------------------------------------------------------------------------------------

template <class T>
UNet<T>::UNet(const ArchSpec& arch, nn::Options opt, int diffusion_steps)
    : arch_(arch), opt_(opt), steps_(diffusion_steps) {
  if (arch.base_channels < 1 || arch.depth < 0 || arch.resblocks_per_stage < 1 || arch.timestep_embed_dim < 2)
    throw InputError("invalid architecture");
  const int C = arch.base_channels;
  const int E = arch.timestep_embed_dim;
  time_ = nn::TimeEmbedding<T>(layout_, E);
  stem_ = nn::Conv<T>(layout_, "stem", 2, C, 3, 1);
  enc_.resize(arch.depth);
  for (int l = 0; l < arch.depth; ++l) {
    for (int i = 0; i < arch.resblocks_per_stage; ++i)
      enc_[l].emplace_back(layout_, "enc" + std::to_string(l) + "." + std::to_string(i), C, C, E);
    down_.emplace_back(layout_, "down" + std::to_string(l), C, C, 3, 2);
  }
  mid1_ = nn::ResBlock<T>(layout_, "mid1", C, C, E);
  if (arch.use_bottleneck_attention) {
    attn_ = nn::Attention<T>(layout_, "mid.attn", C);
    mid2_ = nn::ResBlock<T>(layout_, "mid2", C, C, E);
  }
  up_.resize(arch.depth);
  dec_.resize(arch.depth);
  for (int l = arch.depth - 1; l >= 0; --l) {
    up_[l] = nn::Conv<T>(layout_, "up" + std::to_string(l), C, C, 3, 1);
    for (int i = 0; i < arch.resblocks_per_stage; ++i)
      dec_[l].emplace_back(layout_, "dec" + std::to_string(l) + "." + std::to_string(i), i == 0 ? 2 * C : C, C, E);
  }
  out_norm_ = nn::GroupNorm<T>(layout_, "out.gn", C);
  head_ = nn::Conv<T>(layout_, "head", C, 2, 3, 1, /*zero_init=*/true);
}

void check_divisible(const ArchSpec& arch, int width, int height) {
  const int d = arch.divisor();
  if (width % d != 0 || height % d != 0)
    throw InputError("input " + std::to_string(width) + "x" + std::to_string(height) + " not divisible by " +
                     std::to_string(d) + ": pad or resize input");
}

template <class T>
Tensor<T> UNet<T>::forward(const T* P, const Tensor<T>& input, int t) {
  if (input.c != 2) throw InputError("denoiser expects two input channels");
  check_divisible(arch_, input.w, input.h);
  embed_ = time_.forward(P, t, steps_, opt_);
  Tensor<T> h = stem_.forward(P, input);
  std::vector<Tensor<T>> skips;
  for (int l = 0; l < arch_.depth; ++l) {
    for (auto& rb : enc_[l]) h = rb.forward(P, h, embed_, opt_);
    skips.push_back(h);
    h = down_[l].forward(P, h);
  }
  h = mid1_.forward(P, h, embed_, opt_);
  if (arch_.use_bottleneck_attention) {
    h = attn_.forward(P, h, opt_);
    h = mid2_.forward(P, h, embed_, opt_);
  }
  for (int l = arch_.depth - 1; l >= 0; --l) {
    h = nn::upsample_nearest2(h);
    h = up_[l].forward(P, h);
    h = nn::concat_channels(h, skips[l]);
    for (auto& rb : dec_[l]) h = rb.forward(P, h, embed_, opt_);
  }
  h = out_norm_.forward(P, h, opt_);
  h = out_act_.forward(h, opt_);
  recorded_ = true;
  return head_.forward(P, h);
}

template <class T>
void UNet<T>::backward(const T* P, T* G, const Tensor<T>& dout) {
  if (!recorded_) throw std::logic_error("backward called without a recorded forward pass");
  const int C = arch_.base_channels;
  std::vector<T> de(embed_.size(), T(0));
  Tensor<T> d = head_.backward(P, G, dout);
  d = out_act_.backward(d, opt_);
  d = out_norm_.backward(P, G, d, opt_);
  std::vector<Tensor<T>> dskips(arch_.depth);
  for (int l = 0; l < arch_.depth; ++l) {
    for (auto it = dec_[l].rbegin(); it != dec_[l].rend(); ++it) d = it->backward(P, G, d, de, opt_);
    Tensor<T> dup(C, d.h, d.w), dskip(C, d.h, d.w);
    std::copy(d.data.begin(), d.data.begin() + static_cast<std::ptrdiff_t>(dup.size()), dup.data.begin());
    std::copy(d.data.begin() + static_cast<std::ptrdiff_t>(dup.size()), d.data.end(), dskip.data.begin());
    dskips[l] = std::move(dskip);
    d = up_[l].backward(P, G, dup);
    d = nn::upsample_nearest2_backward(d);
  }
  if (arch_.use_bottleneck_attention) {
    d = mid2_.backward(P, G, d, de, opt_);
    d = attn_.backward(P, G, d, opt_);
  }
  d = mid1_.backward(P, G, d, de, opt_);
  for (int l = arch_.depth - 1; l >= 0; --l) {
    d = down_[l].backward(P, G, d);
    for (std::size_t i = 0; i < d.size(); ++i) d.data[i] += dskips[l].data[i];
    for (auto it = enc_[l].rbegin(); it != enc_[l].rend(); ++it) d = it->backward(P, G, d, de, opt_);
  }
  stem_.backward(P, G, d);
  time_.backward(G, P, de, opt_);
  recorded_ = false;
}

template class UNet<float>;
template class UNet<double>;

// ---------------------------------------------------------------------------------------------

DenoiserModel DenoiserModel::create(const ModelConfig& config, std::uint64_t seed) {
  UNet<float> net(config.arch, {}, config.diffusion_steps);
  DenoiserModel m{config, {}};
  std::mt19937_64 rng(seed);
  net.layout().initialize(m.parameters, rng);
  return m;
}

std::string checkpoint_bytes(const DenoiserModel& model) {
  std::string out = "FCKP";
  le::put_u16(out, 1);
  const std::string json = to_json(model.config);
  le::put_u32(out, static_cast<std::uint32_t>(json.size()));
  out += json;
  le::put_u32(out, static_cast<std::uint32_t>(model.parameters.size()));
  for (float v : model.parameters) le::put_f32(out, v);
  return out;
}

DenoiserModel checkpoint_from_bytes(const std::string& bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 10 || bytes.compare(0, 4, "FCKP") != 0) throw FileError("bad checkpoint magic");
  if (le::get_u16(p + 4) != 1) throw FileError("unsupported checkpoint version");
  const std::size_t jlen = le::get_u32(p + 6);
  if (bytes.size() < 10 + jlen + 4) throw FileError("truncated checkpoint");
  DenoiserModel m{model_config_from_json(bytes.substr(10, jlen)), {}};
  const std::size_t count = le::get_u32(p + 10 + jlen);
  const std::size_t base = 14 + jlen;
  if (bytes.size() != base + 4 * count) throw FileError("truncated checkpoint payload");
  const UNet<float> net(m.config.arch, {}, m.config.diffusion_steps);
  if (net.layout().total() != count) throw FileError("checkpoint parameter count does not match architecture");
  m.parameters.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    m.parameters[i] = le::get_f32(p + base + 4 * i);
    if (!std::isfinite(m.parameters[i])) throw FileError("non-finite parameter in checkpoint");
  }
  return m;
}

void save_checkpoint(const std::filesystem::path& path, const DenoiserModel& model) {
  const std::string bytes = checkpoint_bytes(model);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FileError("cannot open for writing: " + path.string());
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

DenoiserModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return checkpoint_from_bytes(ss.str());
}

// ---------------------------------------------------------------------------------------------

template <class T>
Tensor<T> pack_input(const Grid& g_t, const Grid& s) {
  if (!g_t.same_shape(s)) throw InputError("g_t/s shape mismatch");
  Tensor<T> x(2, s.height(), s.width());
  for (std::size_t i = 0; i < s.size(); ++i) {
    x.data[i] = std::isfinite(g_t[i]) ? static_cast<T>(g_t[i]) : T(0);
    x.data[s.size() + i] = std::isfinite(s[i]) ? static_cast<T>(s[i]) : T(0);
  }
  return x;
}

template Tensor<float> pack_input<float>(const Grid&, const Grid&);
template Tensor<double> pack_input<double>(const Grid&, const Grid&);

DenoiserOutput forward(const DenoiserModel& model, const Grid& g_t, const Grid& s, int t) {
  if (t < 1 || t > model.config.diffusion_steps) throw InputError("timestep out of range");
  check_divisible(model.config.arch, s.width(), s.height());
  UNet<float> net(model.config.arch, {}, model.config.diffusion_steps);
  const Tensor<float> y = net.forward(model.parameters.data(), pack_input<float>(g_t, s), t);
  std::vector<float> a(y.channel(0), y.channel(0) + y.plane());
  std::vector<float> b(y.channel(1), y.channel(1) + y.plane());
  return {s.with_values(std::move(a)), s.with_values(std::move(b))};
}

namespace {
inline double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }
}  // namespace

Grid gate(const Grid& r_hat, const Grid& logits, const Grid& s) {
  return fuse(OutputMode::residual_gated, r_hat, logits, s);
}

Grid fuse(OutputMode mode, const Grid& first, const Grid& logits, const Grid& s) {
  if (!first.same_shape(s) || !logits.same_shape(s)) throw InputError("gate operand shape mismatch");
  std::vector<float> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double p = sigmoid(logits[i]);
    switch (mode) {
      case OutputMode::residual_gated: out[i] = static_cast<float>(s[i] - (1.0 - p) * first[i]); break;
      case OutputMode::residual_ungated: out[i] = static_cast<float>(s[i] - static_cast<double>(first[i])); break;
      case OutputMode::absolute_gated: out[i] = static_cast<float>(p * s[i] + (1.0 - p) * first[i]); break;
    }
  }
  return s.with_values(std::move(out));
}

template <class T>
void fuse_arrays(OutputMode mode, std::span<const T> first, std::span<const T> logits, std::span<const T> s,
                 std::span<T> out) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const T p = static_cast<T>(sigmoid(logits[i]));
    switch (mode) {
      case OutputMode::residual_gated: out[i] = s[i] - (T(1) - p) * first[i]; break;
      case OutputMode::residual_ungated: out[i] = s[i] - first[i]; break;
      case OutputMode::absolute_gated: out[i] = p * s[i] + (T(1) - p) * first[i]; break;
    }
  }
}

template <class T>
void fuse_backward(OutputMode mode, std::span<const T> first, std::span<const T> logits, std::span<const T> s,
                   std::span<const T> d_out, std::span<T> d_first, std::span<T> d_logits) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const T p = static_cast<T>(sigmoid(logits[i]));
    const T dp = p * (T(1) - p);
    switch (mode) {
      case OutputMode::residual_gated:
        d_first[i] += -(T(1) - p) * d_out[i];
        d_logits[i] += first[i] * dp * d_out[i];
        break;
      case OutputMode::residual_ungated: d_first[i] += -d_out[i]; break;
      case OutputMode::absolute_gated:
        d_first[i] += (T(1) - p) * d_out[i];
        d_logits[i] += (s[i] - first[i]) * dp * d_out[i];
        break;
    }
  }
}

template void fuse_arrays<float>(OutputMode, std::span<const float>, std::span<const float>, std::span<const float>,
                                 std::span<float>);
template void fuse_arrays<double>(OutputMode, std::span<const double>, std::span<const double>,
                                  std::span<const double>, std::span<double>);
template void fuse_backward<float>(OutputMode, std::span<const float>, std::span<const float>, std::span<const float>,
                                   std::span<const float>, std::span<float>, std::span<float>);
template void fuse_backward<double>(OutputMode, std::span<const double>, std::span<const double>,
                                    std::span<const double>, std::span<const double>, std::span<double>,
                                    std::span<double>);

GatedOutput gated_predict(const DenoiserModel& model, const Grid& g_t, const Grid& s, int t) {
  DenoiserOutput raw = forward(model, g_t, s, t);
  return {fuse(model.config.output, raw.r_hat, raw.logits, s), std::move(raw.logits)};
}

GatedOutput NetworkDenoiser::predict(const Grid& g_t, const Grid& s, int t, const Window&) const {
  return gated_predict(*model_, g_t, s, t);
}

}  // namespace terraindiff
