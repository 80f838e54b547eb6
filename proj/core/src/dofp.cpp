#include "pvt/dofp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pvt/error.hpp"
#include "pvt/resample.hpp"

namespace pvt {
namespace {

void require_superpixel_dims(int h, int w, const char* what) {
  if (h <= 0 || w <= 0 || h % 4 != 0 || w % 4 != 0) {
    throw DimensionError(std::string(what) + ": height and width must be positive multiples of 4, got " +
                         std::to_string(h) + "x" + std::to_string(w));
  }
}

// Interpolates the stride-4 lattice whose first sample sits at (r0, c0) to the full mosaic
// extent. Sample (a, b) of the lattice lives at pixel (4a + r0, 4b + c0).
Image interpolate_lattice(const Image& mosaic, CellOffset origin) {
  const int h = mosaic.height();
  const int w = mosaic.width();
  const int rows = h / 4;
  const int cols = w / 4;
  std::vector<double> lattice(static_cast<std::size_t>(rows) * cols);
  for (int a = 0; a < rows; ++a) {
    for (int b = 0; b < cols; ++b) {
      lattice[static_cast<std::size_t>(a) * cols + b] = mosaic.at(0, 4 * a + origin.row, 4 * b + origin.col);
    }
  }
  std::vector<double> horiz(static_cast<std::size_t>(rows) * w);
  for (int a = 0; a < rows; ++a) {
    const double* row = lattice.data() + static_cast<std::size_t>(a) * cols;
    for (int x = 0; x < w; ++x) {
      horiz[static_cast<std::size_t>(a) * w + x] = catmull_rom_sample(row, cols, 1, (x - origin.col) / 4.0);
    }
  }
  Image out(1, h, w);
  for (int y = 0; y < h; ++y) {
    const double ly = (y - origin.row) / 4.0;
    for (int x = 0; x < w; ++x) {
      out.at(0, y, x) = catmull_rom_sample(horiz.data() + x, rows, w, ly);
    }
  }
  return out;
}

// Squared distance from (y, x) to the nearest point of the 4-periodic lattice through `site`.
int periodic_sq_distance(int y, int x, CellOffset site) {
  int dy = ((y - site.row) % 4 + 4) % 4;
  int dx = ((x - site.col) % 4 + 4) % 4;
  dy = std::min(dy, 4 - dy);
  dx = std::min(dx, 4 - dx);
  return dy * dy + dx * dx;
}

}  // namespace

void MosaicFrame::validate() const {
  if (data.channels() != 1) {
    throw DimensionError("MosaicFrame: expected a single channel, got " + data.shape_string());
  }
  require_superpixel_dims(data.height(), data.width(), "MosaicFrame");
  for (double v : data.values()) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("MosaicFrame: negative or non-finite sample");
  }
}

void DegradationConfig::validate() const {
  if (m != 1 && m != 2 && m != 4) {
    throw DomainError("DegradationConfig: m must be 1, 2 or 4 (got " + std::to_string(m) + ")");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw DomainError("DegradationConfig: noise_sigma must be finite and >= 0");
  }
}

MosaicFrame apply_forward(const PolarFrame& x, const MosaicLayout& layout,
                          const DegradationConfig& cfg) {
  if (x.channels() != 3) {
    throw DomainError("apply_forward: expected 3 color channels, got " + std::to_string(x.channels()));
  }
  x.validate();
  cfg.validate();
  require_superpixel_dims(x.height(), x.width(), "apply_forward");

  MosaicFrame y{Image(1, x.height(), x.width()), layout};
  for (int r = 0; r < x.height(); ++r) {
    for (int c = 0; c < x.width(); ++c) {
      const MosaicCell& cell = layout.at(r, c);
      y.data.at(0, r, c) = x[cell.direction].at(cell.color, r, c);
    }
  }
  if (cfg.noise_sigma > 0.0) {
    std::mt19937_64 rng(cfg.rng_seed);
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
    for (double& v : y.data.values()) v = std::max(0.0, v + noise(rng));
  }
  return y;
}

PolarFrame pseudo_inverse(const MosaicFrame& y) {
  y.validate();
  const int h = y.height();
  const int w = y.width();
  PolarFrame out = PolarFrame::zeros(3, h, w);
  for (int d = 0; d < kNumDirections; ++d) {
    for (int color = 0; color < kNumColors; ++color) {
      const auto sites = y.layout.sites(d, color);
      if (sites.size() == 1) {
        out[d].set_channel(color, interpolate_lattice(y.data, sites[0]));
        continue;
      }
      const Image first = interpolate_lattice(y.data, sites[0]);
      const Image second = interpolate_lattice(y.data, sites[1]);
      auto dst = out[d].plane(color);
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const double d1 = periodic_sq_distance(r, c, sites[0]);
          const double d2 = periodic_sq_distance(r, c, sites[1]);
          const double w1 = d2 / (d1 + d2);
          const double a = first.at(0, r, c);
          const double b = second.at(0, r, c);
          // Anchored on the nearer lattice so both sample sites come back bit-exact.
          dst[static_cast<std::size_t>(r) * w + c] =
              w1 >= 0.5 ? a + (1.0 - w1) * (b - a) : b + w1 * (a - b);
        }
      }
    }
  }
  // Kernel overshoot near edges can dip below zero; samples themselves are >= 0.
  for (auto& plane : out.dirs) {
    for (double& v : plane.values()) v = std::max(0.0, v);
  }
  return out;
}

PolarFrame difficulty_residual(const PolarFrame& x_lr, const MosaicLayout& layout, double upscale) {
  if (!(upscale >= 1.0)) throw DomainError("difficulty_residual: upscale must be >= 1");
  const PolarFrame recovered = pseudo_inverse(apply_forward(x_lr, layout));
  PolarFrame res;
  for (int d = 0; d < kNumDirections; ++d) {
    res[d] = x_lr[d] - recovered[d];
    if (upscale != 1.0) res[d] = bicubic_resize(res[d], upscale);
  }
  return res;
}

PolarFrame reorganize_proxy_gt(const MosaicFrame& y) {
  if (y.data.channels() != 1) throw DimensionError("reorganize_proxy_gt: mosaic must be single-channel");
  require_superpixel_dims(y.height(), y.width(), "reorganize_proxy_gt");
  const int rows = y.height() / 4;
  const int cols = y.width() / 4;
  PolarFrame out = PolarFrame::zeros(3, rows, cols);
  for (int d = 0; d < kNumDirections; ++d) {
    for (int color = 0; color < kNumColors; ++color) {
      const auto sites = y.layout.sites(d, color);
      for (int a = 0; a < rows; ++a) {
        for (int b = 0; b < cols; ++b) {
          double acc = 0.0;
          for (const auto& s : sites) acc += y.data.at(0, 4 * a + s.row, 4 * b + s.col);
          out[d].at(color, a, b) = acc / static_cast<double>(sites.size());
        }
      }
    }
  }
  return out;
}

TrainingPair make_training_pair(const PolarFrame& proxy_gt, const DegradationConfig& cfg,
                                const MosaicLayout& layout) {
  cfg.validate();
  if (proxy_gt.height() % (4 * cfg.m) != 0 || proxy_gt.width() % (4 * cfg.m) != 0) {
    throw DimensionError("make_training_pair: proxy GT " + proxy_gt[0].shape_string() +
                         " is not divisible by 4*m = " + std::to_string(4 * cfg.m));
  }
  PolarFrame low = cfg.m == 1 ? proxy_gt : bicubic_resize(proxy_gt, 1.0 / cfg.m);
  // Catmull-Rom lobes can undershoot below zero on sharp edges.
  for (auto& plane : low.dirs) {
    for (double& v : plane.values()) v = std::max(0.0, v);
  }
  return {apply_forward(low, layout, cfg), proxy_gt};
}

PolarFrame add_gaussian_noise(const PolarFrame& x, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw DomainError("add_gaussian_noise: sigma must be >= 0");
  PolarFrame out = x;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& plane : out.dirs) {
    for (double& v : plane.values()) v = std::max(0.0, v + noise(rng));
  }
  return out;
}

}  // namespace pvt
