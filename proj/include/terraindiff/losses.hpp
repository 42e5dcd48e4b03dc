#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "terraindiff/grid.hpp"

namespace terraindiff {

struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda_grad = 0.1;
  double lambda_c = 0.1;
};

struct LossBreakdown {
  double l1 = 0.0;
  double l2 = 0.0;
  double lgrad = 0.0;
  double lc = 0.0;
  double total = 0.0;
};

// Mean |d| and mean d^2 over valid pixels.
std::pair<double, double> regression_losses(const Grid& g_hat, const Grid& g, const Mask& m);
// Mean | |grad g_hat| - |grad g| | over pixels whose forward-difference stencil is valid.
double grad_loss(const Grid& g_hat, const Grid& g, const Mask& m);
// Mean binary cross-entropy of sigmoid(logits) against the ground labels, stable form.
double confidence_loss(const Grid& logits, const Mask& m_alpha, const Mask& m);
LossBreakdown total_loss(const Grid& g_hat, const Grid& g, const Grid& logits, const Mask& m_alpha, const Mask& m,
                         const LossWeights& w);

// Array form used by the trainer and by gradient checks.
template <class T>
struct LossInputs {
  std::span<const T> g_hat;
  std::span<const T> g;
  std::span<const T> logits;
  std::span<const std::uint8_t> m_alpha;
  std::span<const std::uint8_t> m;
  int width = 0;
  int height = 0;
  double spacing = 1.0;
};

// Evaluates every term; when the gradient spans are non-empty they receive d(total)/d(g_hat)
// and d(total)/d(logits) (overwritten).
template <class T>
LossBreakdown evaluate_loss(const LossInputs<T>& in, const LossWeights& w, std::span<T> d_ghat = {},
                            std::span<T> d_logits = {});

}  // namespace terraindiff
