#include "terraindiff/metrics.hpp"

#include <cmath>
#include <numbers>

#include "terraindiff/errors.hpp"
#include "terraindiff/resample.hpp"

namespace terraindiff {

void RegressionAccumulator::add(const Grid& pred, const Grid& truth, const Mask& m) {
  if (!pred.same_shape(truth) || !m.matches(pred)) throw InputError("metric operand shape mismatch");
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!m[i] || !std::isfinite(pred[i]) || !std::isfinite(truth[i])) continue;
    const double d = static_cast<double>(pred[i]) - static_cast<double>(truth[i]);
    sum_sq_ += d * d;
    sum_abs_ += std::abs(d);
    ++n_;
  }
}

RegressionMetrics RegressionAccumulator::result() const {
  if (n_ == 0) throw InputError("empty mask");
  const double n = static_cast<double>(n_);
  return {std::sqrt(sum_sq_ / n), sum_abs_ / n, n_};
}

void ClassificationAccumulator::add(const Grid& prob, const Mask& gt_ground, const Mask& m) {
  if (!gt_ground.matches(prob) || !m.matches(prob)) throw InputError("metric operand shape mismatch");
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (!m[i] || !std::isfinite(prob[i])) continue;
    const bool predicted = prob[i] >= threshold_;
    if (gt_ground[i]) {
      ++ground_;
      if (!predicted) ++ground_missed_;
    } else {
      ++nonground_;
      if (predicted) ++nonground_kept_;
    }
  }
}

ClassificationMetrics ClassificationAccumulator::result() const {
  ClassificationMetrics r;
  const std::size_t total = ground_ + nonground_;
  if (total == 0) throw InputError("empty mask");
  r.no_ground = ground_ == 0;
  r.no_nonground = nonground_ == 0;
  r.e_t1 = r.no_nonground ? 0.0 : 100.0 * static_cast<double>(nonground_kept_) / static_cast<double>(nonground_);
  r.e_t2 = r.no_ground ? 0.0 : 100.0 * static_cast<double>(ground_missed_) / static_cast<double>(ground_);
  r.e_tot = 100.0 * static_cast<double>(nonground_kept_ + ground_missed_) / static_cast<double>(total);
  r.e_sum = r.e_t1 + r.e_t2;
  return r;
}

RegressionMetrics regression_metrics(const Grid& pred, const Grid& truth, const Mask& m) {
  RegressionAccumulator acc;
  acc.add(pred, truth, m);
  return acc.result();
}

ClassificationMetrics classification_errors(const Grid& prob, const Mask& gt_ground, const Mask& m, double threshold) {
  ClassificationAccumulator acc(threshold);
  acc.add(prob, gt_ground, m);
  return acc.result();
}

MedResult med(const Grid& pred, const std::vector<GroundPoint>& points) {
  MedResult r;
  const GeoRef& geo = pred.geo();
  double sum = 0.0;
  for (const auto& p : points) {
    const double col = (p.x - geo.x0) / geo.pixel_size - 0.5;
    const double row = (p.y - geo.y0) / geo.pixel_size - 0.5;
    if (col < -0.5 || row < -0.5 || col > pred.width() - 0.5 || row > pred.height() - 0.5) {
      ++r.skipped;
      continue;
    }
    const double z = sample_bilinear(pred, col, row);
    if (!std::isfinite(z)) {
      ++r.skipped;
      continue;
    }
    sum += std::abs(p.z - z);
    ++r.used;
  }
  if (r.used > 0) r.med = sum / static_cast<double>(r.used);
  return r;
}

namespace {

// Derivative along one axis at index i: central inside, one-sided at the ends.
template <class Get>
bool axis_derivative(int i, int n, Get&& get, double spacing, double& out) {
  const int lo = i > 0 ? i - 1 : i;
  const int hi = i < n - 1 ? i + 1 : i;
  const double a = get(lo), b = get(hi);
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  out = (b - a) / ((hi - lo) * spacing);
  return true;
}

struct Normal {
  double x, y, z;
  bool ok;
};

double angle_between(const Normal& a, const Normal& b) {
  const double cx = a.y * b.z - a.z * b.y;
  const double cy = a.z * b.x - a.x * b.z;
  const double cz = a.x * b.y - a.y * b.x;
  const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  const double dot = a.x * b.x + a.y * b.y + a.z * b.z;
  return std::atan2(cross, dot) * 180.0 / std::numbers::pi;
}

}  // namespace

double mad(const Grid& pred) {
  const int w = pred.width(), h = pred.height();
  if (w < 3 || h < 3) throw InputError("grid too small for MAD");
  const double ps = pred.pixel_size();
  std::vector<Normal> normals(pred.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      Normal& n = normals[static_cast<std::size_t>(r) * w + c];
      double dx = 0.0, dy = 0.0;
      n.ok = std::isfinite(pred.at(r, c)) &&
             axis_derivative(c, w, [&](int k) { return static_cast<double>(pred.at(r, k)); }, ps, dx) &&
             axis_derivative(r, h, [&](int k) { return static_cast<double>(pred.at(k, c)); }, ps, dy);
      // Unnormalized (-dx, -dy, 1); the angle formula does not need unit length.
      n.x = -dx;
      n.y = -dy;
      n.z = 1.0;
    }
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Normal& a = normals[static_cast<std::size_t>(r) * w + c];
      if (!a.ok) continue;
      if (c + 1 < w && normals[static_cast<std::size_t>(r) * w + c + 1].ok) {
        sum += angle_between(a, normals[static_cast<std::size_t>(r) * w + c + 1]);
        ++pairs;
      }
      if (r + 1 < h && normals[static_cast<std::size_t>(r + 1) * w + c].ok) {
        sum += angle_between(a, normals[static_cast<std::size_t>(r + 1) * w + c]);
        ++pairs;
      }
    }
  }
  if (pairs == 0) throw InputError("no valid pixel pairs for MAD");
  return sum / static_cast<double>(pairs);
}

Grid laplacian_smooth(const Grid& x, int iterations, double factor, Boundary boundary) {
  if (!(factor > 0.0 && factor <= 1.0)) throw InputError("smoothing factor must be in (0, 1]");
  if (iterations < 0) throw InputError("iterations must be non-negative");
  const int w = x.width(), h = x.height();
  std::vector<double> cur(x.values().begin(), x.values().end()), next(cur.size());
  auto index = [&](int r, int c) { return static_cast<std::size_t>(r) * w + c; };
  auto wrap = [&](int v, int n) {
    if (boundary == Boundary::periodic) return (v + n) % n;
    return v < 0 ? 0 : (v >= n ? n - 1 : v);
  };
  for (int it = 0; it < iterations; ++it) {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const std::size_t i = index(r, c);
        next[i] = cur[i];
        if (!std::isfinite(cur[i])) continue;
        double sum = 0.0;
        int n = 0;
        auto take = [&](int rr, int cc) {
          const double v = cur[index(wrap(rr, h), wrap(cc, w))];
          if (!std::isfinite(v)) return;
          sum += v;
          ++n;
        };
        if (w > 1) {
          take(r, c - 1);
          take(r, c + 1);
        }
        if (h > 1) {
          take(r - 1, c);
          take(r + 1, c);
        }
        if (n > 0) next[i] = cur[i] + factor * (sum / n - cur[i]);
      }
    }
    cur.swap(next);
  }
  std::vector<float> out(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) out[i] = static_cast<float>(cur[i]);
  return x.with_values(std::move(out));
}

}  // namespace terraindiff
