#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "terraindiff/tensor.hpp"

namespace terraindiff::nn {

enum class InitKind { he_normal, small_normal, zeros, ones };

struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
  InitKind init = InitKind::zeros;
  int fan_in = 1;
};

// Named layout of the flat parameter vector.
class ParamLayout {
 public:
  std::size_t add(std::string name, std::size_t size, InitKind init, int fan_in = 1);
  std::size_t total() const { return total_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  const ParamBlock& find(const std::string& name) const;

  template <class T>
  void initialize(std::vector<T>& params, std::mt19937_64& rng) const;

 private:
  std::vector<ParamBlock> blocks_;
  std::size_t total_ = 0;
};

// Switches used by tests and ablations. linear disables SiLU, softmax-free paths are not
// provided, and group normalization is reduced to its affine part.
struct Options {
  bool linear = false;
  bool film = true;
};

template <class T>
class Conv {
 public:
  Conv() = default;
  Conv(ParamLayout& layout, const std::string& name, int cin, int cout, int k, int stride, bool zero_init = false);

  Tensor<T> forward(const T* params, const Tensor<T>& x);
  Tensor<T> backward(const T* params, T* grads, const Tensor<T>& dy);

  int cin() const { return cin_; }
  int cout() const { return cout_; }
  std::size_t weight_offset() const { return w_; }
  std::size_t bias_offset() const { return b_; }
  const Tensor<T>& input() const { return x_; }

 private:
  int cin_ = 0, cout_ = 0, k_ = 3, stride_ = 1;
  std::size_t w_ = 0, b_ = 0;
  Tensor<T> x_;
};

template <class T>
class GroupNorm {
 public:
  GroupNorm() = default;
  GroupNorm(ParamLayout& layout, const std::string& name, int channels);

  Tensor<T> forward(const T* params, const Tensor<T>& x, const Options& opt);
  Tensor<T> backward(const T* params, T* grads, const Tensor<T>& dy, const Options& opt);

 private:
  int c_ = 0, groups_ = 1;
  std::size_t gamma_ = 0, beta_ = 0;
  Tensor<T> xhat_;
  std::vector<T> rstd_;
};

template <class T>
class SiLU {
 public:
  Tensor<T> forward(const Tensor<T>& x, const Options& opt);
  Tensor<T> backward(const Tensor<T>& dy, const Options& opt) const;

 private:
  Tensor<T> x_;
};

// Per-channel scale and shift from the timestep embedding: gamma = 1 + Wg e + bg, beta = Wb e + bb.
template <class T>
class FiLM {
 public:
  FiLM() = default;
  FiLM(ParamLayout& layout, const std::string& name, int channels, int embed_dim);

  Tensor<T> forward(const T* params, const Tensor<T>& h, const std::vector<T>& e, const Options& opt);
  Tensor<T> backward(const T* params, T* grads, const Tensor<T>& dy, std::vector<T>& de, const Options& opt);

 private:
  int c_ = 0, e_ = 0;
  std::size_t wg_ = 0, bg_ = 0, wb_ = 0, bb_ = 0;
  Tensor<T> h_;
  std::vector<T> gamma_, embed_;
};

// Sinusoidal features of t/T followed by an affine projection and SiLU.
template <class T>
class TimeEmbedding {
 public:
  TimeEmbedding() = default;
  TimeEmbedding(ParamLayout& layout, int dim);

  std::vector<T> forward(const T* params, int t, int steps, const Options& opt);
  void backward(T* grads, const T* params, const std::vector<T>& de, const Options& opt);

  static std::vector<T> sinusoid(int t, int steps, int dim);

 private:
  int dim_ = 0;
  std::size_t w_ = 0, b_ = 0;
  std::vector<T> feat_, pre_;
};

template <class T>
class ResBlock {
 public:
  ResBlock() = default;
  ResBlock(ParamLayout& layout, const std::string& name, int cin, int cout, int embed_dim);

  Tensor<T> forward(const T* params, const Tensor<T>& x, const std::vector<T>& e, const Options& opt);
  Tensor<T> backward(const T* params, T* grads, const Tensor<T>& dy, std::vector<T>& de, const Options& opt);

 private:
  GroupNorm<T> gn1_, gn2_;
  SiLU<T> act1_, act2_;
  Conv<T> conv1_, conv2_, skip_;
  FiLM<T> film_;
  bool has_skip_ = false;
};

// Single-head spatial self-attention with a residual connection.
template <class T>
class Attention {
 public:
  Attention() = default;
  Attention(ParamLayout& layout, const std::string& name, int channels);

  Tensor<T> forward(const T* params, const Tensor<T>& x, const Options& opt);
  Tensor<T> backward(const T* params, T* grads, const Tensor<T>& dy, const Options& opt);

 private:
  int c_ = 0;
  GroupNorm<T> gn_;
  Conv<T> q_, k_, v_, proj_;
  Tensor<T> qt_, kt_, vt_;
  std::vector<T> attn_;  // [query][key]
};

template <class T>
Tensor<T> upsample_nearest2(const Tensor<T>& x);
template <class T>
Tensor<T> upsample_nearest2_backward(const Tensor<T>& dy);
template <class T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

}  // namespace terraindiff::nn
