#include "terraindiff/losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "terraindiff/detail/stencil.hpp"
#include "terraindiff/errors.hpp"

namespace terraindiff {

namespace {

template <class T>
int sign(T v) {
  return (v > T(0)) - (v < T(0));
}

template <class T>
T sigmoid(T x) {
  return x >= 0 ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

void check_weights(const LossWeights& w) {
  if (w.lambda1 < 0 || w.lambda2 < 0 || w.lambda_grad < 0 || w.lambda_c < 0)
    throw InputError("loss weights must be non-negative");
  if (w.lambda1 + w.lambda2 + w.lambda_grad + w.lambda_c <= 0) throw InputError("at least one loss weight must be positive");
}

}  // namespace

template <class T>
LossBreakdown evaluate_loss(const LossInputs<T>& in, const LossWeights& w, std::span<T> d_ghat, std::span<T> d_logits) {
  check_weights(w);
  const int W = in.width;
  const int H = in.height;
  const std::size_t n = static_cast<std::size_t>(W) * H;
  if (in.g_hat.size() != n || in.g.size() != n || in.m.size() != n) throw InputError("loss operand shape mismatch");
  const bool want_grad = !d_ghat.empty();
  if (want_grad) std::fill(d_ghat.begin(), d_ghat.end(), T(0));
  if (!d_logits.empty()) std::fill(d_logits.begin(), d_logits.end(), T(0));

  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += in.m[i] ? 1 : 0;
  if (count == 0) throw InputError("empty mask");
  const double inv = 1.0 / static_cast<double>(count);

  LossBreakdown out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in.m[i]) continue;
    const double d = static_cast<double>(in.g_hat[i]) - static_cast<double>(in.g[i]);
    out.l1 += std::abs(d);
    out.l2 += d * d;
    if (want_grad) d_ghat[i] += static_cast<T>((w.lambda1 * sign(d) + w.lambda2 * 2.0 * d) * inv);
  }
  out.l1 *= inv;
  out.l2 *= inv;

  {
    // Gradient-magnitude term over pixels whose whole stencil is valid.
    const double inv_sp = 1.0 / in.spacing;
    std::size_t gcount = 0;
    double acc = 0.0;
    struct Term {
      std::size_t p;
      std::size_t xlo, xhi, ylo, yhi;
      bool hasx, hasy;
      double dx, dy, mag, s;
    };
    std::vector<Term> terms;
    if (want_grad) terms.reserve(n);
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        const std::size_t p = static_cast<std::size_t>(r) * W + c;
        if (!in.m[p]) continue;
        int c0 = 0, c1 = 0, r0 = 0, r1 = 0;
        const bool hx = detail::diff_pair(c, W, c0, c1);
        const bool hy = detail::diff_pair(r, H, r0, r1);
        const std::size_t xlo = static_cast<std::size_t>(r) * W + c0, xhi = static_cast<std::size_t>(r) * W + c1;
        const std::size_t ylo = static_cast<std::size_t>(r0) * W + c, yhi = static_cast<std::size_t>(r1) * W + c;
        if (hx && !(in.m[xlo] && in.m[xhi])) continue;
        if (hy && !(in.m[ylo] && in.m[yhi])) continue;
        double pdx = 0, pdy = 0, gdx = 0, gdy = 0;
        if (hx) {
          pdx = (static_cast<double>(in.g_hat[xhi]) - in.g_hat[xlo]) * inv_sp;
          gdx = (static_cast<double>(in.g[xhi]) - in.g[xlo]) * inv_sp;
        }
        if (hy) {
          pdy = (static_cast<double>(in.g_hat[yhi]) - in.g_hat[ylo]) * inv_sp;
          gdy = (static_cast<double>(in.g[yhi]) - in.g[ylo]) * inv_sp;
        }
        const double pm = std::sqrt(pdx * pdx + pdy * pdy);
        const double gm = std::sqrt(gdx * gdx + gdy * gdy);
        acc += std::abs(pm - gm);
        ++gcount;
        if (want_grad) terms.push_back({p, xlo, xhi, ylo, yhi, hx, hy, pdx, pdy, pm, static_cast<double>(sign(pm - gm))});
      }
    }
    if (gcount > 0) {
      out.lgrad = acc / static_cast<double>(gcount);
      if (want_grad && w.lambda_grad > 0) {
        const double scale = w.lambda_grad / static_cast<double>(gcount) * inv_sp;
        for (const Term& t : terms) {
          if (t.mag <= 0.0 || t.s == 0.0) continue;
          const double k = scale * t.s / t.mag;
          if (t.hasx) {
            d_ghat[t.xhi] += static_cast<T>(k * t.dx);
            d_ghat[t.xlo] -= static_cast<T>(k * t.dx);
          }
          if (t.hasy) {
            d_ghat[t.yhi] += static_cast<T>(k * t.dy);
            d_ghat[t.ylo] -= static_cast<T>(k * t.dy);
          }
        }
      }
    }
  }

  if (!in.logits.empty()) {
    if (in.logits.size() != n || in.m_alpha.size() != n) throw InputError("loss operand shape mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (!in.m[i]) continue;
      const double l = in.logits[i];
      const double y = in.m_alpha[i] ? 1.0 : 0.0;
      out.lc += std::max(l, 0.0) - l * y + std::log1p(std::exp(-std::abs(l)));
      if (!d_logits.empty()) d_logits[i] = static_cast<T>(w.lambda_c * (sigmoid(l) - y) * inv);
    }
    out.lc *= inv;
  }

  out.total = w.lambda1 * out.l1 + w.lambda2 * out.l2 + w.lambda_grad * out.lgrad + w.lambda_c * out.lc;
  return out;
}

template LossBreakdown evaluate_loss<float>(const LossInputs<float>&, const LossWeights&, std::span<float>,
                                            std::span<float>);
template LossBreakdown evaluate_loss<double>(const LossInputs<double>&, const LossWeights&, std::span<double>,
                                             std::span<double>);

namespace {

LossInputs<float> inputs_of(const Grid& g_hat, const Grid& g, const Grid* logits, const Mask* m_alpha, const Mask& m) {
  if (!g_hat.same_shape(g) || !m.matches(g)) throw InputError("loss operand shape mismatch");
  if (logits && (!logits->same_shape(g) || !m_alpha->matches(g))) throw InputError("loss operand shape mismatch");
  LossInputs<float> in;
  in.g_hat = g_hat.values();
  in.g = g.values();
  if (logits) {
    in.logits = logits->values();
    in.m_alpha = m_alpha->bits();
  }
  in.m = m.bits();
  in.width = g.width();
  in.height = g.height();
  in.spacing = g.pixel_size();
  return in;
}

// Pixels that are masked valid but hold nodata count as invalid.
Mask effective(const Mask& m, const Grid& a, const Grid& b) { return m & a.validity() & b.validity(); }

}  // namespace

std::pair<double, double> regression_losses(const Grid& g_hat, const Grid& g, const Mask& m) {
  const Mask mm = effective(m, g_hat, g);
  const LossBreakdown b = evaluate_loss(inputs_of(g_hat, g, nullptr, nullptr, mm), LossWeights{1, 0, 0, 0});
  return {b.l1, b.l2};
}

double grad_loss(const Grid& g_hat, const Grid& g, const Mask& m) {
  const Mask mm = effective(m, g_hat, g);
  return evaluate_loss(inputs_of(g_hat, g, nullptr, nullptr, mm), LossWeights{0, 0, 1, 0}).lgrad;
}

double confidence_loss(const Grid& logits, const Mask& m_alpha, const Mask& m) {
  const Mask mm = m & logits.validity();
  return evaluate_loss(inputs_of(logits, logits, &logits, &m_alpha, mm), LossWeights{0, 0, 0, 1}).lc;
}

LossBreakdown total_loss(const Grid& g_hat, const Grid& g, const Grid& logits, const Mask& m_alpha, const Mask& m,
                         const LossWeights& w) {
  const Mask mm = effective(m, g_hat, g) & logits.validity();
  return evaluate_loss(inputs_of(g_hat, g, &logits, &m_alpha, mm), w);
}

}  // namespace terraindiff
