#pragma once

#include <cstdint>

#include "pvt/image.hpp"
#include "pvt/layout.hpp"
#include "pvt/polar.hpp"

namespace pvt {

/// Single-channel raw DoFP capture. Height and width are multiples of 4.
struct MosaicFrame {
  Image data;
  MosaicLayout layout = MosaicLayout::imx250myr();

  int height() const { return data.height(); }
  int width() const { return data.width(); }
  void validate() const;
};

struct DegradationConfig {
  /// Bicubic downscale factor applied before mosaicking, one of {1, 2, 4}.
  int m = 1;
  /// Standard deviation of additive zero-mean Gaussian noise, linear intensity units.
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Samples a 3-channel four-direction frame into a mosaic: each pixel keeps the value of the
/// (direction, color) plane the layout assigns to it, plus optional Gaussian noise; the result
/// is clipped at zero. `cfg.m` is ignored here (see make_training_pair).
MosaicFrame apply_forward(const PolarFrame& x, const MosaicLayout& layout,
                          const DegradationConfig& cfg = {});

/// Bicubic pseudo-inverse of the forward operator. Each (direction, color) lattice is
/// interpolated to full resolution with Catmull-Rom kernels. The two green lattices of a
/// direction are blended with distance weights that reach 1 on their own sample sites, so the
/// result reproduces every mosaic sample exactly and averages the two estimates in between.
/// Kernel overshoot below zero is clipped.
PolarFrame pseudo_inverse(const MosaicFrame& y);

/// X - pseudo_inverse(apply_forward(X)), resized by `upscale`. Values are signed; large
/// magnitudes mark structure the mosaic cannot represent.
PolarFrame difficulty_residual(const PolarFrame& x_lr, const MosaicLayout& layout,
                               double upscale = 1.0);

/// Collapses each 4x4 superpixel to one pixel per (direction, color): R and B copied, the two
/// G samples averaged. Output is 4 x 3 x H/4 x W/4.
PolarFrame reorganize_proxy_gt(const MosaicFrame& y);

struct TrainingPair {
  MosaicFrame mosaic_in;
  PolarFrame gt;
};

/// Bicubic downscale of the proxy ground truth by 1/m followed by the forward operator.
TrainingPair make_training_pair(const PolarFrame& proxy_gt, const DegradationConfig& cfg,
                                const MosaicLayout& layout);

/// Adds i.i.d. Gaussian noise to every direction plane and clips at zero.
PolarFrame add_gaussian_noise(const PolarFrame& x, double sigma, std::uint64_t seed);

}  // namespace pvt
