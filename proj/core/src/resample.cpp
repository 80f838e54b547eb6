#include "pvt/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pvt/error.hpp"

namespace pvt {
namespace {

struct Tap {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

std::vector<Tap> build_taps(int in, int out) {
  std::vector<Tap> taps(out);
  const double s = static_cast<double>(out) / in;
  for (int k = 0; k < out; ++k) {
    const double x = (k + 0.5) / s - 0.5;
    const double base = std::floor(x);
    const int i0 = static_cast<int>(base);
    taps[k].weight = catmull_rom_weights(x - base);
    for (int j = 0; j < 4; ++j) taps[k].index[j] = std::clamp(i0 - 1 + j, 0, in - 1);
  }
  return taps;
}

}  // namespace

std::array<double, 4> catmull_rom_weights(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
          0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)};
}

double catmull_rom_sample(const double* samples, int count, std::ptrdiff_t stride, double x) {
  const double base = std::floor(x);
  const int i0 = static_cast<int>(base);
  const auto w = catmull_rom_weights(x - base);
  // Accumulating offsets from the centre tap keeps constants and knots bit-exact.
  const double centre = samples[std::clamp(i0, 0, count - 1) * stride];
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    const int idx = std::clamp(i0 - 1 + j, 0, count - 1);
    acc += w[j] * (samples[idx * stride] - centre);
  }
  return centre + acc;
}

Image resize_to(const Image& img, int height, int width) {
  if (height < 1 || width < 1) {
    throw DimensionError("bicubic resize: output extent " + std::to_string(height) + "x" +
                         std::to_string(width) + " is empty");
  }
  if (img.height() < 1 || img.width() < 1) throw DimensionError("bicubic resize: empty input");
  if (height == img.height() && width == img.width()) return img;

  const auto col_taps = build_taps(img.width(), width);
  const auto row_taps = build_taps(img.height(), height);
  Image out(img.channels(), height, width);
  std::vector<double> horiz(static_cast<std::size_t>(img.height()) * width);
  for (int c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    for (int y = 0; y < img.height(); ++y) {
      const double* row = src.data() + static_cast<std::size_t>(y) * img.width();
      for (int x = 0; x < width; ++x) {
        const Tap& t = col_taps[x];
        const double centre = row[t.index[1]];
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) acc += t.weight[j] * (row[t.index[j]] - centre);
        horiz[static_cast<std::size_t>(y) * width + x] = centre + acc;
      }
    }
    auto dst = out.plane(c);
    for (int y = 0; y < height; ++y) {
      const Tap& t = row_taps[y];
      for (int x = 0; x < width; ++x) {
        const double centre = horiz[static_cast<std::size_t>(t.index[1]) * width + x];
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
          acc += t.weight[j] * (horiz[static_cast<std::size_t>(t.index[j]) * width + x] - centre);
        }
        dst[static_cast<std::size_t>(y) * width + x] = centre + acc;
      }
    }
  }
  return out;
}

Image bicubic_resize(const Image& img, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("bicubic resize: scale must be positive and finite");
  }
  const int h = static_cast<int>(std::lround(img.height() * scale));
  const int w = static_cast<int>(std::lround(img.width() * scale));
  return resize_to(img, h, w);
}

PolarFrame bicubic_resize(const PolarFrame& frame, double scale) {
  PolarFrame out;
  for (int d = 0; d < kNumDirections; ++d) {
    out[d] = bicubic_resize(frame[d], scale);
    for (double& v : out[d].values()) v = std::max(0.0, v);
  }
  return out;
}

}  // namespace pvt
