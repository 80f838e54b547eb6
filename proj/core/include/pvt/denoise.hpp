#pragma once

#include "pvt/image.hpp"
#include "pvt/polar.hpp"

namespace pvt {

struct GuidedFilterConfig {
  /// Half-width of the square box window, pixels.
  int radius = 8;
  /// Regularizer in squared guide units (guides normalized to [0, 1]).
  double eps = 1e-3;
  /// Guide each color channel with its own intensity channel instead of the shared luma.
  bool per_channel_guide = false;

  void validate() const;
};

/// Normalized Gaussian blur truncated at ceil(3 sigma), separable, replicate borders.
Image gaussian_blur(const Image& img, double sigma);

/// Mean over the (2r+1)^2 window clipped to the frame.
Image box_mean(const Image& img, int radius);

/// Single-channel guided filter of `src` steered by `guide`.
Image guided_filter(const Image& guide, const Image& src, int radius, double eps);

/// Gaussian smoothing of S1 and S2; S0 is passed through untouched.
StokesFrame gaussian_denoise_stokes(const StokesFrame& s, double sigma);

/// Guided filtering of S1 and S2 with the intensity image as guide; S0 untouched. A
/// multi-channel guide is reduced to its channel mean unless cfg.per_channel_guide is set.
StokesFrame guided_denoise_stokes(const StokesFrame& s, const Image& guide_i,
                                  const GuidedFilterConfig& cfg = {});

}  // namespace pvt
