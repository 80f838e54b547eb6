#pragma once

#include <string_view>

#include "pvt/image.hpp"

namespace pvt {

/// Dense motion field in pixels per frame: u along +x (right), v along +y (down).
/// A field tagged source -> target gives, at each source pixel q, the displacement of q
/// in the target frame.
struct FlowField {
  Image u;
  Image v;
  double source_time = 0.0;
  double target_time = 1.0;

  static FlowField zeros(int height, int width, double source = 0.0, double target = 1.0);
  static FlowField constant(int height, int width, double du, double dv);

  int height() const { return u.height(); }
  int width() const { return u.width(); }
  void validate() const;
  FlowField negated() const;
};

/// du/dx + dv/dy with forward differences; the last row/column falls back to backward ones.
Image divergence(const FlowField& m);

/// dv/dx - du/dy, same differencing.
Image curl(const FlowField& m);

/// Bilinear sample of channel c at real coordinates (y, x) with replicate borders.
double bilinear_sample(const Image& img, int c, double y, double x);

/// out[q] = img(q + m(q)), bilinear, replicate borders.
Image backward_warp(const Image& img, const FlowField& m);

enum class SplatImportance { kUniform, kBrightnessResidual };

std::string_view to_string(SplatImportance mode);
SplatImportance splat_importance_from_string(std::string_view name);

struct SplatResult {
  Image image;
  /// Sum of deposited softmax weights per target pixel (shifted so the largest logit is 0).
  /// Zero marks a hole, whose image value is 0.
  Image coverage;
};

/// Forward softmax splatting: each source pixel deposits img * exp(z) bilinearly at
/// q + m(q) and the result is normalized by the deposited weights. Rows are split over
/// `threads` workers with private accumulators merged in a fixed order.
SplatResult softmax_splat(const Image& img, const FlowField& m, int threads = 1);
SplatResult softmax_splat(const Image& img, const FlowField& m, const Image& z, int threads = 1);

/// Importance z = -|I_src - I_dst(q + m)|, channel-averaged: pixels that agree with their
/// destination win collisions.
Image brightness_residual_importance(const Image& src, const Image& dst, const FlowField& m);

/// Splats f0 along m0t and f1 along m1t to time t, weighting deposits by (1 - t) and t and
/// normalizing jointly. Holes are filled by backward-warping the nearer frame along the
/// negated flow.
Image blend_splat(const Image& f0, const Image& f1, const FlowField& m0t, const FlowField& m1t,
                  double t, SplatImportance mode = SplatImportance::kUniform, int threads = 1);

/// Bicubic spatial resize of the field by `spatial`, with vectors multiplied by
/// spatial * temporal.
FlowField scale_flow(const FlowField& m, double spatial, double temporal);

struct HornSchunckConfig {
  double alpha = 0.05;
  int iterations = 200;
  int levels = 3;
};

/// Coarse-to-fine Horn-Schunck on intensity images (multi-channel inputs are averaged).
/// The field maps i0 pixels into i1: backward_warp(i1, flow) approximates i0.
FlowField estimate_flow_hs(const Image& i0, const Image& i1, const HornSchunckConfig& cfg = {});

}  // namespace pvt
