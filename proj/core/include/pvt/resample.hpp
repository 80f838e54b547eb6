#pragma once

#include <array>

#include "pvt/image.hpp"
#include "pvt/polar.hpp"

namespace pvt {

/// Catmull-Rom (a = -0.5) weights for the four taps at offsets -1, 0, 1, 2 around a sample
/// at fractional position t in [0, 1). Interpolating: t = 0 yields {0, 1, 0, 0}.
std::array<double, 4> catmull_rom_weights(double t);

/// 1-D Catmull-Rom evaluation of `samples` at real coordinate x (sample k sits at x = k),
/// with indices clamped into range.
double catmull_rom_sample(const double* samples, int count, std::ptrdiff_t stride, double x);

/// Catmull-Rom resampling by a uniform factor. Output extent is round(extent * scale);
/// pixel centers map through (dst + 0.5) / s - 0.5 with s = out / in per axis; borders
/// replicate. Throws DimensionError when an output extent would be < 1.
Image bicubic_resize(const Image& img, double scale);

/// Same kernel and coordinate mapping, resampled to an explicit size.
Image resize_to(const Image& img, int height, int width);

/// Per-direction resize; kernel overshoot below zero is clipped since the planes are intensities.
PolarFrame bicubic_resize(const PolarFrame& frame, double scale);

}  // namespace pvt
