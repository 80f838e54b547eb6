#pragma once

#include <array>
#include <numbers>

#include "pvt/image.hpp"

namespace pvt {

inline constexpr int kNumDirections = 4;

/// Polarizer orientations of the four direction planes, in storage order.
inline constexpr std::array<double, kNumDirections> kDirectionAngles = {
    0.0, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4};
inline constexpr std::array<int, kNumDirections> kDirectionDegrees = {0, 45, 90, 135};

/// Denominator guard for DoLP; pixels with S0 below it are treated as unpolarized.
inline constexpr double kStokesZeroGuard = 1e-12;

/// Four linear-intensity images captured behind 0/45/90/135 degree polarizers.
/// Each plane is C x H x W with C in {1, 3}.
///
/// The struct itself does not enforce non-negativity so that signed quantities with the
/// same layout (residuals, differences) can reuse it; validate() checks the full invariant.
struct PolarFrame {
  std::array<Image, kNumDirections> dirs;

  static PolarFrame zeros(int channels, int height, int width);

  int channels() const { return dirs[0].channels(); }
  int height() const { return dirs[0].height(); }
  int width() const { return dirs[0].width(); }

  Image& operator[](int d) { return dirs[d]; }
  const Image& operator[](int d) const { return dirs[d]; }

  bool same_shape(const PolarFrame& other) const { return dirs[0].same_shape(other.dirs[0]); }

  /// Throws DimensionError on inconsistent planes, DomainError on negative or non-finite values.
  void validate() const;

  friend bool operator==(const PolarFrame&, const PolarFrame&) = default;
};

struct StokesFrame {
  Image s0;
  Image s1;
  Image s2;
  /// True when sqrt(s1^2 + s2^2) <= s0 holds everywhere.
  bool clamped = false;
};

/// Unpolarized intensity I, degree of linear polarization p and angle phi in [0, pi).
struct PolarParams {
  Image i;
  Image p;
  Image phi;
  bool clamped = false;

  void validate() const;
};

/// Channel triplets (cos 2phi, sin 2phi, p), 3C channels in total.
struct PolarFeatureStack {
  Image data;
};

PolarFrame render_directions(const PolarParams& params);

StokesFrame stokes_from_directions(const PolarFrame& frame);

/// Recovers (I, p, phi). phi uses the four-quadrant arctangent so it is single valued in
/// [0, pi). With `clamp`, p is clipped to [0, 1] and the result is marked clamped.
PolarParams params_from_stokes(const StokesFrame& stokes, bool clamp);

/// Scales (s1, s2) down wherever the polarized part exceeds s0.
StokesFrame clamp_physical(StokesFrame stokes);

/// Reduces an angle into [0, pi).
double wrap_aop(double angle);

/// pi-periodic angular distance in [0, pi/2].
double aop_distance(double a, double b);

PolarFeatureStack encode_polar_features(const PolarParams& params);

/// Joint visualization: hue from phi over the full circle, saturation from p, value from I
/// normalized by the frame maximum. Multi-channel params are reduced first (I and p averaged,
/// phi averaged on the doubled-angle circle). Returns a 3-channel RGB image in [0, 1].
Image hsv_visualize(const PolarParams& params);

/// Reduces C-channel params to one channel using the same rule as hsv_visualize.
PolarParams channel_average(const PolarParams& params);

/// Standard HSV to RGB, hue in degrees [0, 360), s and v in [0, 1].
std::array<double, 3> hsv_to_rgb(double hue_deg, double s, double v);

}  // namespace pvt
