#include "terraindiff/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "terraindiff/errors.hpp"
#include "terraindiff/kernels.hpp"

namespace terraindiff::nn {

std::size_t ParamLayout::add(std::string name, std::size_t size, InitKind init, int fan_in) {
  blocks_.push_back({std::move(name), total_, size, init, fan_in});
  total_ += size;
  return blocks_.back().offset;
}

const ParamBlock& ParamLayout::find(const std::string& name) const {
  for (const auto& b : blocks_)
    if (b.name == name) return b;
  throw InputError("no parameter block named " + name);
}

template <class T>
void ParamLayout::initialize(std::vector<T>& params, std::mt19937_64& rng) const {
  params.assign(total_, T(0));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& b : blocks_) {
    for (std::size_t i = 0; i < b.size; ++i) {
      double v = 0.0;
      switch (b.init) {
        case InitKind::he_normal: v = normal(rng) * std::sqrt(2.0 / b.fan_in); break;
        case InitKind::small_normal: v = normal(rng) * 0.02; break;
        case InitKind::zeros: v = 0.0; break;
        case InitKind::ones: v = 1.0; break;
      }
      params[b.offset + i] = static_cast<T>(v);
    }
  }
}

template void ParamLayout::initialize<float>(std::vector<float>&, std::mt19937_64&) const;
template void ParamLayout::initialize<double>(std::vector<double>&, std::mt19937_64&) const;

// ---------------------------------------------------------------------------------------------
// Conv

template <class T>
Conv<T>::Conv(ParamLayout& layout, const std::string& name, int cin, int cout, int k, int stride, bool zero_init)
    : cin_(cin), cout_(cout), k_(k), stride_(stride) {
  if (!((k == 3 && (stride == 1 || stride == 2)) || (k == 1 && stride == 1)))
    throw std::logic_error("unsupported convolution geometry");
  w_ = layout.add(name + ".weight", static_cast<std::size_t>(cout) * cin * k * k,
                  zero_init ? InitKind::zeros : InitKind::he_normal, cin * k * k);
  b_ = layout.add(name + ".bias", static_cast<std::size_t>(cout), InitKind::zeros);
}

template <class T>
Tensor<T> Conv<T>::forward(const T* params, const Tensor<T>& x) {
  x_ = x;
  const T* w = params + w_;
  const T* b = params + b_;
  if (k_ == 3 && stride_ == 1) {
    Tensor<T> y(cout_, x.h, x.w);
    kernels::conv3x3<T>(x.data.data(), cin_, x.h, x.w, w, b, cout_, y.data.data());
    return y;
  }
  if (k_ == 1) {
    Tensor<T> y(cout_, x.h, x.w);
    const std::size_t n = x.plane();
    for (int co = 0; co < cout_; ++co) {
      T* o = y.channel(co);
      std::fill(o, o + n, b[co]);
      for (int ci = 0; ci < cin_; ++ci) {
        const T wv = w[co * cin_ + ci];
        const T* s = x.channel(ci);
        for (std::size_t i = 0; i < n; ++i) o[i] += wv * s[i];
      }
    }
    return y;
  }
  // 3x3, stride 2, padding 1.
  const int ho = (x.h - 1) / 2 + 1;
  const int wo = (x.w - 1) / 2 + 1;
  Tensor<T> y(cout_, ho, wo);
  for (int co = 0; co < cout_; ++co) {
    T* o = y.channel(co);
    std::fill(o, o + y.plane(), b[co]);
    for (int ci = 0; ci < cin_; ++ci) {
      const T* k = w + (static_cast<std::size_t>(co) * cin_ + ci) * 9;
      const T* s = x.channel(ci);
      for (int oy = 0; oy < ho; ++oy) {
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = 2 * oy + ky - 1;
          if (iy < 0 || iy >= x.h) continue;
          for (int ox = 0; ox < wo; ++ox) {
            T acc = 0;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = 2 * ox + kx - 1;
              if (ix >= 0 && ix < x.w) acc += k[ky * 3 + kx] * s[iy * x.w + ix];
            }
            o[oy * wo + ox] += acc;
          }
        }
      }
    }
  }
  return y;
}

template <class T>
Tensor<T> Conv<T>::backward(const T* params, T* grads, const Tensor<T>& dy) {
  const Tensor<T>& x = x_;
  const T* w = params + w_;
  T* dw = grads + w_;
  T* db = grads + b_;
  Tensor<T> dx(cin_, x.h, x.w);
  if (k_ == 3 && stride_ == 1) {
    kernels::conv3x3_grad_weight<T>(x.data.data(), cin_, x.h, x.w, dy.data.data(), cout_, dw, db);
    kernels::conv3x3_grad_input<T>(dy.data.data(), cout_, x.h, x.w, w, cin_, dx.data.data());
    return dx;
  }
  if (k_ == 1) {
    const std::size_t n = x.plane();
    for (int co = 0; co < cout_; ++co) {
      const T* g = dy.channel(co);
      T bacc = 0;
      for (std::size_t i = 0; i < n; ++i) bacc += g[i];
      db[co] += bacc;
      for (int ci = 0; ci < cin_; ++ci) {
        const T* s = x.channel(ci);
        T* d = dx.channel(ci);
        const T wv = w[co * cin_ + ci];
        T acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += g[i] * s[i];
          d[i] += wv * g[i];
        }
        dw[co * cin_ + ci] += acc;
      }
    }
    return dx;
  }
  const int ho = dy.h;
  const int wo = dy.w;
  for (int co = 0; co < cout_; ++co) {
    const T* g = dy.channel(co);
    T bacc = 0;
    for (std::size_t i = 0; i < dy.plane(); ++i) bacc += g[i];
    db[co] += bacc;
    for (int ci = 0; ci < cin_; ++ci) {
      const T* k = w + (static_cast<std::size_t>(co) * cin_ + ci) * 9;
      T* dk = dw + (static_cast<std::size_t>(co) * cin_ + ci) * 9;
      const T* s = x.channel(ci);
      T* d = dx.channel(ci);
      for (int oy = 0; oy < ho; ++oy) {
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = 2 * oy + ky - 1;
          if (iy < 0 || iy >= x.h) continue;
          for (int ox = 0; ox < wo; ++ox) {
            const T gv = g[oy * wo + ox];
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = 2 * ox + kx - 1;
              if (ix < 0 || ix >= x.w) continue;
              dk[ky * 3 + kx] += gv * s[iy * x.w + ix];
              d[iy * x.w + ix] += gv * k[ky * 3 + kx];
            }
          }
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------------------------
// GroupNorm

template <class T>
GroupNorm<T>::GroupNorm(ParamLayout& layout, const std::string& name, int channels)
    : c_(channels), groups_(std::min(8, channels)) {
  while (c_ % groups_ != 0) --groups_;
  gamma_ = layout.add(name + ".gamma", static_cast<std::size_t>(channels), InitKind::ones);
  beta_ = layout.add(name + ".beta", static_cast<std::size_t>(channels), InitKind::zeros);
}

template <class T>
Tensor<T> GroupNorm<T>::forward(const T* params, const Tensor<T>& x, const Options& opt) {
  const T* gamma = params + gamma_;
  const T* beta = params + beta_;
  Tensor<T> y(x.c, x.h, x.w);
  const std::size_t n = x.plane();
  if (opt.linear) {
    xhat_ = x;
    for (int ch = 0; ch < c_; ++ch)
      for (std::size_t i = 0; i < n; ++i) y.channel(ch)[i] = gamma[ch] * x.channel(ch)[i] + beta[ch];
    return y;
  }
  xhat_ = Tensor<T>(x.c, x.h, x.w);
  rstd_.assign(groups_, T(0));
  const int cpg = c_ / groups_;
  const double count = static_cast<double>(cpg) * n;
  for (int g = 0; g < groups_; ++g) {
    double sum = 0.0;
    for (int ch = g * cpg; ch < (g + 1) * cpg; ++ch)
      for (std::size_t i = 0; i < n; ++i) sum += x.channel(ch)[i];
    const double mean = sum / count;
    double var = 0.0;
    for (int ch = g * cpg; ch < (g + 1) * cpg; ++ch)
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x.channel(ch)[i] - mean;
        var += d * d;
      }
    var /= count;
    const T rstd = static_cast<T>(1.0 / std::sqrt(var + 1e-5));
    rstd_[g] = rstd;
    const T m = static_cast<T>(mean);
    for (int ch = g * cpg; ch < (g + 1) * cpg; ++ch) {
      const T* s = x.channel(ch);
      T* xh = xhat_.channel(ch);
      T* o = y.channel(ch);
      for (std::size_t i = 0; i < n; ++i) {
        xh[i] = (s[i] - m) * rstd;
        o[i] = gamma[ch] * xh[i] + beta[ch];
      }
    }
  }
  return y;
}

template <class T>
Tensor<T> GroupNorm<T>::backward(const T* params, T* grads, const Tensor<T>& dy, const Options& opt) {
  const T* gamma = params + gamma_;
  T* dgamma = grads + gamma_;
  T* dbeta = grads + beta_;
  const std::size_t n = dy.plane();
  Tensor<T> dx(dy.c, dy.h, dy.w);
  for (int ch = 0; ch < c_; ++ch) {
    const T* g = dy.channel(ch);
    const T* xh = xhat_.channel(ch);
    T sg = 0, sgx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sg += g[i];
      sgx += g[i] * xh[i];
    }
    dgamma[ch] += sgx;
    dbeta[ch] += sg;
  }
  if (opt.linear) {
    for (int ch = 0; ch < c_; ++ch)
      for (std::size_t i = 0; i < n; ++i) dx.channel(ch)[i] = gamma[ch] * dy.channel(ch)[i];
    return dx;
  }
  const int cpg = c_ / groups_;
  const T count = static_cast<T>(cpg * n);
  for (int g = 0; g < groups_; ++g) {
    T s1 = 0, s2 = 0;
    for (int ch = g * cpg; ch < (g + 1) * cpg; ++ch) {
      const T* gy = dy.channel(ch);
      const T* xh = xhat_.channel(ch);
      for (std::size_t i = 0; i < n; ++i) {
        const T d = gy[i] * gamma[ch];
        s1 += d;
        s2 += d * xh[i];
      }
    }
    const T rstd = rstd_[g];
    for (int ch = g * cpg; ch < (g + 1) * cpg; ++ch) {
      const T* gy = dy.channel(ch);
      const T* xh = xhat_.channel(ch);
      T* o = dx.channel(ch);
      for (std::size_t i = 0; i < n; ++i) o[i] = rstd / count * (count * gy[i] * gamma[ch] - s1 - xh[i] * s2);
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------------------------
// SiLU

namespace {
template <class T>
T sigmoid(T x) {
  return x >= 0 ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}
template <class T>
T silu_grad(T x) {
  const T s = sigmoid(x);
  return s * (T(1) + x * (T(1) - s));
}
}  // namespace

template <class T>
Tensor<T> SiLU<T>::forward(const Tensor<T>& x, const Options& opt) {
  if (opt.linear) return x;
  x_ = x;
  Tensor<T> y(x.c, x.h, x.w);
  for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = x.data[i] * sigmoid(x.data[i]);
  return y;
}

template <class T>
Tensor<T> SiLU<T>::backward(const Tensor<T>& dy, const Options& opt) const {
  if (opt.linear) return dy;
  Tensor<T> dx(dy.c, dy.h, dy.w);
  for (std::size_t i = 0; i < dy.size(); ++i) dx.data[i] = dy.data[i] * silu_grad(x_.data[i]);
  return dx;
}

// ---------------------------------------------------------------------------------------------
// FiLM

template <class T>
FiLM<T>::FiLM(ParamLayout& layout, const std::string& name, int channels, int embed_dim)
    : c_(channels), e_(embed_dim) {
  wg_ = layout.add(name + ".film.wg", static_cast<std::size_t>(channels) * embed_dim, InitKind::small_normal);
  bg_ = layout.add(name + ".film.bg", static_cast<std::size_t>(channels), InitKind::zeros);
  wb_ = layout.add(name + ".film.wb", static_cast<std::size_t>(channels) * embed_dim, InitKind::small_normal);
  bb_ = layout.add(name + ".film.bb", static_cast<std::size_t>(channels), InitKind::zeros);
}

template <class T>
Tensor<T> FiLM<T>::forward(const T* params, const Tensor<T>& h, const std::vector<T>& e, const Options& opt) {
  if (!opt.film) return h;
  h_ = h;
  embed_ = e;
  gamma_.assign(c_, T(0));
  Tensor<T> y(h.c, h.h, h.w);
  for (int ch = 0; ch < c_; ++ch) {
    T g = T(1) + params[bg_ + ch];
    T b = params[bb_ + ch];
    for (int j = 0; j < e_; ++j) {
      g += params[wg_ + ch * e_ + j] * e[j];
      b += params[wb_ + ch * e_ + j] * e[j];
    }
    gamma_[ch] = g;
    const T* s = h.channel(ch);
    T* o = y.channel(ch);
    for (std::size_t i = 0; i < h.plane(); ++i) o[i] = g * s[i] + b;
  }
  return y;
}

template <class T>
Tensor<T> FiLM<T>::backward(const T* params, T* grads, const Tensor<T>& dy, std::vector<T>& de, const Options& opt) {
  if (!opt.film) return dy;
  Tensor<T> dh(dy.c, dy.h, dy.w);
  for (int ch = 0; ch < c_; ++ch) {
    const T* g = dy.channel(ch);
    const T* s = h_.channel(ch);
    T* o = dh.channel(ch);
    T dgamma = 0, dbeta = 0;
    for (std::size_t i = 0; i < dy.plane(); ++i) {
      dgamma += g[i] * s[i];
      dbeta += g[i];
      o[i] = gamma_[ch] * g[i];
    }
    grads[bg_ + ch] += dgamma;
    grads[bb_ + ch] += dbeta;
    for (int j = 0; j < e_; ++j) {
      grads[wg_ + ch * e_ + j] += dgamma * embed_[j];
      grads[wb_ + ch * e_ + j] += dbeta * embed_[j];
      de[j] += dgamma * params[wg_ + ch * e_ + j] + dbeta * params[wb_ + ch * e_ + j];
    }
  }
  return dh;
}

// ---------------------------------------------------------------------------------------------
// TimeEmbedding

template <class T>
TimeEmbedding<T>::TimeEmbedding(ParamLayout& layout, int dim) : dim_(dim) {
  w_ = layout.add("time.weight", static_cast<std::size_t>(dim) * dim, InitKind::he_normal, dim);
  b_ = layout.add("time.bias", static_cast<std::size_t>(dim), InitKind::zeros);
}

template <class T>
std::vector<T> TimeEmbedding<T>::sinusoid(int t, int steps, int dim) {
  std::vector<T> f(dim, T(0));
  const int half = dim / 2;
  const double tau = 1000.0 * static_cast<double>(t) / static_cast<double>(steps);
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / std::max(1, half));
    f[i] = static_cast<T>(std::sin(tau * freq));
    f[half + i] = static_cast<T>(std::cos(tau * freq));
  }
  return f;
}

template <class T>
std::vector<T> TimeEmbedding<T>::forward(const T* params, int t, int steps, const Options& opt) {
  feat_ = sinusoid(t, steps, dim_);
  pre_.assign(dim_, T(0));
  std::vector<T> e(dim_);
  for (int i = 0; i < dim_; ++i) {
    T acc = params[b_ + i];
    for (int j = 0; j < dim_; ++j) acc += params[w_ + i * dim_ + j] * feat_[j];
    pre_[i] = acc;
    e[i] = opt.linear ? acc : acc * sigmoid(acc);
  }
  return e;
}

template <class T>
void TimeEmbedding<T>::backward(T* grads, const T* /*params*/, const std::vector<T>& de, const Options& opt) {
  for (int i = 0; i < dim_; ++i) {
    const T d = opt.linear ? de[i] : de[i] * silu_grad(pre_[i]);
    grads[b_ + i] += d;
    for (int j = 0; j < dim_; ++j) grads[w_ + i * dim_ + j] += d * feat_[j];
  }
}

// ---------------------------------------------------------------------------------------------
// ResBlock

template <class T>
ResBlock<T>::ResBlock(ParamLayout& layout, const std::string& name, int cin, int cout, int embed_dim)
    : gn1_(layout, name + ".gn1", cin),
      gn2_(layout, name + ".gn2", cout),
      conv1_(layout, name + ".conv1", cin, cout, 3, 1),
      conv2_(layout, name + ".conv2", cout, cout, 3, 1),
      film_(layout, name, cout, embed_dim),
      has_skip_(cin != cout) {
  if (has_skip_) skip_ = Conv<T>(layout, name + ".skip", cin, cout, 1, 1);
}

template <class T>
Tensor<T> ResBlock<T>::forward(const T* params, const Tensor<T>& x, const std::vector<T>& e, const Options& opt) {
  Tensor<T> a = gn1_.forward(params, x, opt);
  a = act1_.forward(a, opt);
  a = conv1_.forward(params, a);
  a = gn2_.forward(params, a, opt);
  a = film_.forward(params, a, e, opt);
  a = act2_.forward(a, opt);
  a = conv2_.forward(params, a);
  if (has_skip_) {
    const Tensor<T> s = skip_.forward(params, x);
    for (std::size_t i = 0; i < a.size(); ++i) a.data[i] += s.data[i];
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) a.data[i] += x.data[i];
  }
  return a;
}

template <class T>
Tensor<T> ResBlock<T>::backward(const T* params, T* grads, const Tensor<T>& dy, std::vector<T>& de,
                                const Options& opt) {
  Tensor<T> d = conv2_.backward(params, grads, dy);
  d = act2_.backward(d, opt);
  d = film_.backward(params, grads, d, de, opt);
  d = gn2_.backward(params, grads, d, opt);
  d = conv1_.backward(params, grads, d);
  d = act1_.backward(d, opt);
  Tensor<T> dx = gn1_.backward(params, grads, d, opt);
  if (has_skip_) {
    const Tensor<T> ds = skip_.backward(params, grads, dy);
    for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += ds.data[i];
  } else {
    for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += dy.data[i];
  }
  return dx;
}

// ---------------------------------------------------------------------------------------------
// Attention

template <class T>
Attention<T>::Attention(ParamLayout& layout, const std::string& name, int channels)
    : c_(channels),
      gn_(layout, name + ".gn", channels),
      q_(layout, name + ".q", channels, channels, 1, 1),
      k_(layout, name + ".k", channels, channels, 1, 1),
      v_(layout, name + ".v", channels, channels, 1, 1),
      proj_(layout, name + ".proj", channels, channels, 1, 1) {}

template <class T>
Tensor<T> Attention<T>::forward(const T* params, const Tensor<T>& x, const Options& opt) {
  const Tensor<T> xn = gn_.forward(params, x, opt);
  qt_ = q_.forward(params, xn);
  kt_ = k_.forward(params, xn);
  vt_ = v_.forward(params, xn);
  const int n = static_cast<int>(x.plane());
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(c_)));
  attn_.assign(static_cast<std::size_t>(n) * n, T(0));
  for (int i = 0; i < n; ++i) {
    T* row = attn_.data() + static_cast<std::size_t>(i) * n;
    T mx = -std::numeric_limits<T>::infinity();
    for (int j = 0; j < n; ++j) {
      T s = 0;
      for (int ch = 0; ch < c_; ++ch) s += qt_.channel(ch)[i] * kt_.channel(ch)[j];
      row[j] = s * scale;
      mx = std::max(mx, row[j]);
    }
    T z = 0;
    for (int j = 0; j < n; ++j) {
      row[j] = std::exp(row[j] - mx);
      z += row[j];
    }
    for (int j = 0; j < n; ++j) row[j] /= z;
  }
  Tensor<T> o(c_, x.h, x.w);
  for (int ch = 0; ch < c_; ++ch) {
    const T* v = vt_.channel(ch);
    T* out = o.channel(ch);
    for (int i = 0; i < n; ++i) {
      const T* row = attn_.data() + static_cast<std::size_t>(i) * n;
      T acc = 0;
      for (int j = 0; j < n; ++j) acc += row[j] * v[j];
      out[i] = acc;
    }
  }
  Tensor<T> y = proj_.forward(params, o);
  for (std::size_t i = 0; i < y.size(); ++i) y.data[i] += x.data[i];
  return y;
}

template <class T>
Tensor<T> Attention<T>::backward(const T* params, T* grads, const Tensor<T>& dy, const Options& opt) {
  const int n = static_cast<int>(dy.plane());
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(c_)));
  const Tensor<T> dout = proj_.backward(params, grads, dy);
  Tensor<T> dv(c_, dy.h, dy.w), dq(c_, dy.h, dy.w), dk(c_, dy.h, dy.w);
  std::vector<T> da(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const T* row = attn_.data() + static_cast<std::size_t>(i) * n;
    T dot = 0;
    for (int j = 0; j < n; ++j) {
      T acc = 0;
      for (int ch = 0; ch < c_; ++ch) {
        acc += dout.channel(ch)[i] * vt_.channel(ch)[j];
        dv.channel(ch)[j] += row[j] * dout.channel(ch)[i];
      }
      da[j] = acc;
      dot += acc * row[j];
    }
    for (int j = 0; j < n; ++j) {
      const T ds = row[j] * (da[j] - dot) * scale;
      for (int ch = 0; ch < c_; ++ch) {
        dq.channel(ch)[i] += ds * kt_.channel(ch)[j];
        dk.channel(ch)[j] += ds * qt_.channel(ch)[i];
      }
    }
  }
  Tensor<T> dxn = q_.backward(params, grads, dq);
  const Tensor<T> dk_in = k_.backward(params, grads, dk);
  const Tensor<T> dv_in = v_.backward(params, grads, dv);
  for (std::size_t i = 0; i < dxn.size(); ++i) dxn.data[i] += dk_in.data[i] + dv_in.data[i];
  Tensor<T> dx = gn_.backward(params, grads, dxn, opt);
  for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += dy.data[i];
  return dx;
}

// ---------------------------------------------------------------------------------------------

template <class T>
Tensor<T> upsample_nearest2(const Tensor<T>& x) {
  Tensor<T> y(x.c, 2 * x.h, 2 * x.w);
  for (int ch = 0; ch < x.c; ++ch)
    for (int r = 0; r < y.h; ++r)
      for (int c = 0; c < y.w; ++c) y.at(ch, r, c) = x.at(ch, r / 2, c / 2);
  return y;
}

template <class T>
Tensor<T> upsample_nearest2_backward(const Tensor<T>& dy) {
  Tensor<T> dx(dy.c, dy.h / 2, dy.w / 2);
  for (int ch = 0; ch < dy.c; ++ch)
    for (int r = 0; r < dy.h; ++r)
      for (int c = 0; c < dy.w; ++c) dx.at(ch, r / 2, c / 2) += dy.at(ch, r, c);
  return dx;
}

template <class T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> y(a.c + b.c, a.h, a.w);
  std::copy(a.data.begin(), a.data.end(), y.data.begin());
  std::copy(b.data.begin(), b.data.end(), y.data.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return y;
}

#define TERRAINDIFF_INSTANTIATE(T)                                   \
  template class Conv<T>;                                            \
  template class GroupNorm<T>;                                       \
  template class SiLU<T>;                                            \
  template class FiLM<T>;                                            \
  template class TimeEmbedding<T>;                                   \
  template class ResBlock<T>;                                        \
  template class Attention<T>;                                       \
  template Tensor<T> upsample_nearest2<T>(const Tensor<T>&);         \
  template Tensor<T> upsample_nearest2_backward<T>(const Tensor<T>&); \
  template Tensor<T> concat_channels<T>(const Tensor<T>&, const Tensor<T>&);

TERRAINDIFF_INSTANTIATE(float)
TERRAINDIFF_INSTANTIATE(double)

#undef TERRAINDIFF_INSTANTIATE

}  // namespace terraindiff::nn
