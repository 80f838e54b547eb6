#include "pvt/polar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pvt/error.hpp"

namespace pvt {
namespace {

constexpr double kPi = std::numbers::pi;

void check_planes(const std::array<const Image*, 3>& planes, const char* names[3],
                  const char* what) {
  for (int k = 1; k < 3; ++k) {
    if (!planes[k]->same_shape(*planes[0])) {
      throw DimensionError(std::string(what) + ": field '" + names[k] + "' has shape " +
                           planes[k]->shape_string() + ", expected " +
                           planes[0]->shape_string());
    }
  }
}

}  // namespace

PolarFrame PolarFrame::zeros(int channels, int height, int width) {
  PolarFrame f;
  for (auto& d : f.dirs) d = Image(channels, height, width);
  return f;
}

void PolarFrame::validate() const {
  const int c = channels();
  if (c != 1 && c != 3) {
    throw DimensionError("PolarFrame: channel count must be 1 or 3, got " + std::to_string(c));
  }
  for (int d = 0; d < kNumDirections; ++d) {
    if (!dirs[d].same_shape(dirs[0])) {
      throw DimensionError("PolarFrame: direction " + std::to_string(kDirectionDegrees[d]) +
                           " has shape " + dirs[d].shape_string() + ", expected " +
                           dirs[0].shape_string());
    }
    for (double v : dirs[d].values()) {
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("PolarFrame: direction " + std::to_string(kDirectionDegrees[d]) +
                          " contains a negative or non-finite value");
      }
    }
  }
}

void PolarParams::validate() const {
  const char* names[3] = {"i", "p", "phi"};
  check_planes({&i, &p, &phi}, names, "PolarParams");
  for (double v : i.values()) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("PolarParams: field 'i' must be finite and >= 0");
  }
  for (double v : p.values()) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw DomainError("PolarParams: field 'p' must lie in [0, 1]");
    }
  }
  for (double v : phi.values()) {
    if (!std::isfinite(v)) throw DomainError("PolarParams: field 'phi' must be finite");
  }
}

PolarFrame render_directions(const PolarParams& params) {
  params.validate();
  PolarFrame out;
  const auto i = params.i.values();
  const auto p = params.p.values();
  const auto phi = params.phi.values();
  for (int d = 0; d < kNumDirections; ++d) {
    const double theta = kDirectionAngles[d];
    out[d] = Image::like(params.i);
    auto dst = out[d].values();
    for (std::size_t k = 0; k < dst.size(); ++k) {
      dst[k] = std::max(0.0, i[k] * (1.0 + p[k] * std::cos(2.0 * (theta - phi[k]))));
    }
  }
  return out;
}

StokesFrame stokes_from_directions(const PolarFrame& frame) {
  frame.validate();
  StokesFrame s;
  s.s0 = Image::like(frame[0]);
  s.s1 = Image::like(frame[0]);
  s.s2 = Image::like(frame[0]);
  const auto x0 = frame[0].values();
  const auto x45 = frame[1].values();
  const auto x90 = frame[2].values();
  const auto x135 = frame[3].values();
  auto s0 = s.s0.values();
  auto s1 = s.s1.values();
  auto s2 = s.s2.values();
  for (std::size_t k = 0; k < s0.size(); ++k) {
    s0[k] = 0.5 * (x0[k] + x45[k] + x90[k] + x135[k]);
    s1[k] = x0[k] - x90[k];
    s2[k] = x45[k] - x135[k];
  }
  return s;
}

double wrap_aop(double angle) {
  double r = std::fmod(angle, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

PolarParams params_from_stokes(const StokesFrame& stokes, bool clamp) {
  const char* names[3] = {"s0", "s1", "s2"};
  check_planes({&stokes.s0, &stokes.s1, &stokes.s2}, names, "StokesFrame");
  PolarParams out;
  out.i = Image::like(stokes.s0);
  out.p = Image::like(stokes.s0);
  out.phi = Image::like(stokes.s0);
  out.clamped = clamp;
  const auto s0 = stokes.s0.values();
  const auto s1 = stokes.s1.values();
  const auto s2 = stokes.s2.values();
  auto i = out.i.values();
  auto p = out.p.values();
  auto phi = out.phi.values();
  for (std::size_t k = 0; k < s0.size(); ++k) {
    i[k] = 0.5 * s0[k];
    if (s0[k] < kStokesZeroGuard) continue;
    double dolp = std::hypot(s1[k], s2[k]) / std::max(s0[k], kStokesZeroGuard);
    if (clamp) dolp = std::clamp(dolp, 0.0, 1.0);
    p[k] = dolp;
    phi[k] = wrap_aop(0.5 * std::atan2(s2[k], s1[k]));
  }
  return out;
}

StokesFrame clamp_physical(StokesFrame stokes) {
  auto s0 = stokes.s0.values();
  auto s1 = stokes.s1.values();
  auto s2 = stokes.s2.values();
  for (std::size_t k = 0; k < s0.size(); ++k) {
    s0[k] = std::max(0.0, s0[k]);
    const double pol = std::hypot(s1[k], s2[k]);
    if (pol > s0[k]) {
      const double scale = pol > 0.0 ? s0[k] / pol : 0.0;
      s1[k] *= scale;
      s2[k] *= scale;
    }
  }
  stokes.clamped = true;
  return stokes;
}

double aop_distance(double a, double b) {
  const double delta = std::fmod(std::abs(a - b), kPi);
  return std::min(delta, kPi - delta);
}

PolarFeatureStack encode_polar_features(const PolarParams& params) {
  params.validate();
  const int c = params.phi.channels();
  PolarFeatureStack out{Image(3 * c, params.phi.height(), params.phi.width())};
  for (int ch = 0; ch < c; ++ch) {
    const auto phi = params.phi.plane(ch);
    const auto p = params.p.plane(ch);
    auto cos_plane = out.data.plane(3 * ch);
    auto sin_plane = out.data.plane(3 * ch + 1);
    auto p_plane = out.data.plane(3 * ch + 2);
    for (std::size_t k = 0; k < phi.size(); ++k) {
      cos_plane[k] = std::cos(2.0 * phi[k]);
      sin_plane[k] = std::sin(2.0 * phi[k]);
      p_plane[k] = p[k];
    }
  }
  return out;
}

PolarParams channel_average(const PolarParams& params) {
  if (params.i.channels() == 1) return params;
  PolarParams out;
  out.i = params.i.channel_mean();
  out.p = params.p.channel_mean();
  out.phi = Image::like(out.i);
  out.clamped = params.clamped;
  const int c = params.phi.channels();
  auto phi = out.phi.values();
  for (std::size_t k = 0; k < phi.size(); ++k) {
    double cs = 0.0;
    double sn = 0.0;
    for (int ch = 0; ch < c; ++ch) {
      const double a = params.phi.plane(ch)[k];
      cs += std::cos(2.0 * a);
      sn += std::sin(2.0 * a);
    }
    phi[k] = (cs == 0.0 && sn == 0.0) ? 0.0 : wrap_aop(0.5 * std::atan2(sn, cs));
  }
  return out;
}

std::array<double, 3> hsv_to_rgb(double hue_deg, double s, double v) {
  hue_deg = std::fmod(hue_deg, 360.0);
  if (hue_deg < 0.0) hue_deg += 360.0;
  const double c = v * s;
  const double h = hue_deg / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
  const double m = v - c;
  double r = 0.0, g = 0.0, b = 0.0;
  switch (static_cast<int>(h)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return {r + m, g + m, b + m};
}

Image hsv_visualize(const PolarParams& params) {
  params.validate();
  const PolarParams mono = channel_average(params);
  double peak = mono.i.max();
  if (!(peak > 0.0)) peak = 1.0;
  Image rgb(3, mono.i.height(), mono.i.width());
  const auto i = mono.i.values();
  const auto p = mono.p.values();
  const auto phi = mono.phi.values();
  for (std::size_t k = 0; k < i.size(); ++k) {
    const double hue = wrap_aop(phi[k]) / kPi * 360.0;
    const auto px = hsv_to_rgb(hue, std::clamp(p[k], 0.0, 1.0), std::clamp(i[k] / peak, 0.0, 1.0));
    for (int ch = 0; ch < 3; ++ch) rgb.plane(ch)[k] = px[ch];
  }
  return rgb;
}

}  // namespace pvt
