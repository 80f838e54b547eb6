#include "pvt/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "pvt/error.hpp"
#include "pvt/resample.hpp"

namespace pvt {
namespace {

double forward_diff_x(const Image& f, int y, int x) {
  const int w = f.width();
  if (w < 2) return 0.0;
  if (x + 1 < w) return f.at(0, y, x + 1) - f.at(0, y, x);
  return f.at(0, y, x) - f.at(0, y, x - 1);
}

double forward_diff_y(const Image& f, int y, int x) {
  const int h = f.height();
  if (h < 2) return 0.0;
  if (y + 1 < h) return f.at(0, y + 1, x) - f.at(0, y, x);
  return f.at(0, y, x) - f.at(0, y - 1, x);
}

struct Accumulator {
  std::vector<double> num;
  std::vector<double> den;
};

// Deposits rows [row_begin, row_end) of `img` into `acc`.
void splat_rows(const Image& img, const FlowField& m, const Image* z, double z_shift,
                double scale, int row_begin, int row_end, Accumulator& acc) {
  const int h = img.height();
  const int w = img.width();
  const int channels = img.channels();
  const std::size_t plane = img.plane_size();
  for (int y = row_begin; y < row_end; ++y) {
    for (int x = 0; x < w; ++x) {
      const double weight = scale * (z ? std::exp(z->at(0, y, x) - z_shift) : 1.0);
      if (weight == 0.0) continue;
      const double tx = x + m.u.at(0, y, x);
      const double ty = y + m.v.at(0, y, x);
      const double fx0 = std::floor(tx);
      const double fy0 = std::floor(ty);
      const double fx = tx - fx0;
      const double fy = ty - fy0;
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);
      const double taps[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
      const int tx_[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ty_[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int k = 0; k < 4; ++k) {
        if (taps[k] == 0.0) continue;
        if (tx_[k] < 0 || tx_[k] >= w || ty_[k] < 0 || ty_[k] >= h) continue;
        const std::size_t idx = static_cast<std::size_t>(ty_[k]) * w + tx_[k];
        const double wk = weight * taps[k];
        acc.den[idx] += wk;
        for (int c = 0; c < channels; ++c) {
          acc.num[c * plane + idx] += wk * img.at(c, y, x);
        }
      }
    }
  }
}

// Splats into `total` using up to `threads` workers over contiguous row bands; partial
// buffers are added in band order so the result does not depend on scheduling.
void splat_into(const Image& img, const FlowField& m, const Image* z, double z_shift, double scale,
                int threads, Accumulator& total) {
  const int h = img.height();
  threads = std::clamp(threads, 1, std::max(1, h));
  if (threads == 1) {
    splat_rows(img, m, z, z_shift, scale, 0, h, total);
    return;
  }
  std::vector<Accumulator> partial(threads);
  std::vector<std::thread> workers;
  for (int t = 0; t < threads; ++t) {
    partial[t].num.assign(total.num.size(), 0.0);
    partial[t].den.assign(total.den.size(), 0.0);
    const int begin = static_cast<int>(static_cast<long long>(h) * t / threads);
    const int end = static_cast<int>(static_cast<long long>(h) * (t + 1) / threads);
    workers.emplace_back([&, t, begin, end] { splat_rows(img, m, z, z_shift, scale, begin, end, partial[t]); });
  }
  for (auto& worker : workers) worker.join();
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < total.num.size(); ++i) total.num[i] += p.num[i];
    for (std::size_t i = 0; i < total.den.size(); ++i) total.den[i] += p.den[i];
  }
}

SplatResult normalize(const Accumulator& acc, int channels, int h, int w) {
  SplatResult out{Image(channels, h, w), Image(1, h, w)};
  const std::size_t plane = out.coverage.plane_size();
  for (std::size_t i = 0; i < plane; ++i) {
    const double den = acc.den[i];
    out.coverage.values()[i] = den;
    if (den <= 0.0) continue;
    for (int c = 0; c < channels; ++c) out.image.values()[c * plane + i] = acc.num[c * plane + i] / den;
  }
  return out;
}

void require_flow_matches(const Image& img, const FlowField& m, const char* what) {
  m.validate();
  if (img.height() != m.height() || img.width() != m.width()) {
    throw DimensionError(std::string(what) + ": image " + img.shape_string() + " vs flow " +
                         m.u.shape_string());
  }
}

SplatResult splat_impl(const Image& img, const FlowField& m, const Image* z, int threads) {
  require_flow_matches(img, m, "softmax_splat");
  double z_shift = 0.0;
  if (z) {
    if (z->channels() != 1 || !z->same_extent(img)) {
      throw DimensionError("softmax_splat: importance must be 1x" + std::to_string(img.height()) +
                           "x" + std::to_string(img.width()));
    }
    if (!z->all_finite()) throw DomainError("softmax_splat: importance contains non-finite values");
    z_shift = z->max();
  }
  Accumulator acc{std::vector<double>(img.size(), 0.0), std::vector<double>(img.plane_size(), 0.0)};
  splat_into(img, m, z, z_shift, 1.0, threads, acc);
  return normalize(acc, img.channels(), img.height(), img.width());
}

}  // namespace

FlowField FlowField::zeros(int height, int width, double source, double target) {
  return {Image(1, height, width), Image(1, height, width), source, target};
}

FlowField FlowField::constant(int height, int width, double du, double dv) {
  return {Image(1, height, width, du), Image(1, height, width, dv), 0.0, 1.0};
}

void FlowField::validate() const {
  if (u.channels() != 1 || !u.same_shape(v)) {
    throw DimensionError("FlowField: u " + u.shape_string() + " and v " + v.shape_string() +
                         " must be matching single-channel planes");
  }
  if (!u.all_finite() || !v.all_finite()) throw DomainError("FlowField: non-finite vector");
}

FlowField FlowField::negated() const {
  return {u * -1.0, v * -1.0, target_time, source_time};
}

Image divergence(const FlowField& m) {
  m.validate();
  Image out = Image::like(m.u);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      out.at(0, y, x) = forward_diff_x(m.u, y, x) + forward_diff_y(m.v, y, x);
    }
  }
  return out;
}

Image curl(const FlowField& m) {
  m.validate();
  Image out = Image::like(m.u);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      out.at(0, y, x) = forward_diff_x(m.v, y, x) - forward_diff_y(m.u, y, x);
    }
  }
  return out;
}

double bilinear_sample(const Image& img, int c, double y, double x) {
  const int h = img.height();
  const int w = img.width();
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  const int y0 = static_cast<int>(std::floor(y));
  const int x0 = static_cast<int>(std::floor(x));
  const double fy = y - y0;
  const double fx = x - x0;
  const int y1 = std::min(y0 + 1, h - 1);
  const int x1 = std::min(x0 + 1, w - 1);
  const double a = img.at(c, y0, x0);
  const double top = a + fx * (img.at(c, y0, x1) - a);
  const double b = img.at(c, y1, x0);
  const double bottom = b + fx * (img.at(c, y1, x1) - b);
  return top + fy * (bottom - top);
}

Image backward_warp(const Image& img, const FlowField& m) {
  require_flow_matches(img, m, "backward_warp");
  Image out = Image::like(img);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        out.at(c, y, x) = bilinear_sample(img, c, y + m.v.at(0, y, x), x + m.u.at(0, y, x));
      }
    }
  }
  return out;
}

std::string_view to_string(SplatImportance mode) {
  return mode == SplatImportance::kUniform ? "uniform" : "brightness-residual";
}

SplatImportance splat_importance_from_string(std::string_view name) {
  if (name == "uniform") return SplatImportance::kUniform;
  if (name == "brightness-residual" || name == "residual") return SplatImportance::kBrightnessResidual;
  throw DomainError("unknown splat importance '" + std::string(name) + "'");
}

SplatResult softmax_splat(const Image& img, const FlowField& m, int threads) {
  return splat_impl(img, m, nullptr, threads);
}

SplatResult softmax_splat(const Image& img, const FlowField& m, const Image& z, int threads) {
  return splat_impl(img, m, &z, threads);
}

Image brightness_residual_importance(const Image& src, const Image& dst, const FlowField& m) {
  require_same_shape(src, dst, "brightness_residual_importance");
  const Image warped = backward_warp(dst, m);
  Image diff = src - warped;
  for (double& v : diff.values()) v = -std::abs(v);
  return diff.channel_mean();
}

Image blend_splat(const Image& f0, const Image& f1, const FlowField& m0t, const FlowField& m1t,
                  double t, SplatImportance mode, int threads) {
  require_same_shape(f0, f1, "blend_splat");
  require_flow_matches(f0, m0t, "blend_splat m0t");
  require_flow_matches(f1, m1t, "blend_splat m1t");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("blend_splat: t must lie in [0, 1]");

  Image z0;
  Image z1;
  double z_shift = 0.0;
  if (mode == SplatImportance::kBrightnessResidual) {
    // Each frame is scored against the other one sampled along its own flow.
    z0 = brightness_residual_importance(f0, f1, m0t);
    z1 = brightness_residual_importance(f1, f0, m1t);
    z_shift = std::max(z0.max(), z1.max());
  }
  Accumulator acc{std::vector<double>(f0.size(), 0.0), std::vector<double>(f0.plane_size(), 0.0)};
  if (t < 1.0) splat_into(f0, m0t, z0.empty() ? nullptr : &z0, z_shift, 1.0 - t, threads, acc);
  if (t > 0.0) splat_into(f1, m1t, z1.empty() ? nullptr : &z1, z_shift, t, threads, acc);
  SplatResult merged = normalize(acc, f0.channels(), f0.height(), f0.width());

  const bool near_first = t <= 0.5;
  Image fill;
  for (std::size_t i = 0; i < merged.coverage.size(); ++i) {
    if (merged.coverage.values()[i] > 0.0) continue;
    if (fill.empty()) {
      fill = near_first ? backward_warp(f0, m0t.negated()) : backward_warp(f1, m1t.negated());
    }
    for (int c = 0; c < f0.channels(); ++c) {
      merged.image.values()[c * f0.plane_size() + i] = fill.values()[c * f0.plane_size() + i];
    }
  }
  return merged.image;
}

FlowField scale_flow(const FlowField& m, double spatial, double temporal) {
  m.validate();
  if (!(spatial > 0.0)) throw DomainError("scale_flow: spatial factor must be > 0");
  if (!(temporal >= 0.0 && temporal <= 1.0)) throw DomainError("scale_flow: temporal factor must lie in [0, 1]");
  FlowField out;
  out.u = bicubic_resize(m.u, spatial) * (spatial * temporal);
  out.v = bicubic_resize(m.v, spatial) * (spatial * temporal);
  out.source_time = m.source_time;
  out.target_time = m.source_time + temporal * (m.target_time - m.source_time);
  return out;
}

}  // namespace pvt
