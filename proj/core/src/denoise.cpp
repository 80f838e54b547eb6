#include "pvt/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pvt/error.hpp"

namespace pvt {
namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    total += k[i + radius];
  }
  for (double& v : k) v /= total;
  return k;
}

// Correlates one plane with a symmetric 1-D kernel along rows or columns.
void convolve_axis(std::span<const double> src, std::span<double> dst, int h, int w,
                   const std::vector<double>& kernel, bool along_rows) {
  const int radius = static_cast<int>(kernel.size() / 2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double centre = src[static_cast<std::size_t>(y) * w + x];
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int yy = along_rows ? y : std::clamp(y + k, 0, h - 1);
        const int xx = along_rows ? std::clamp(x + k, 0, w - 1) : x;
        acc += kernel[k + radius] * (src[static_cast<std::size_t>(yy) * w + xx] - centre);
      }
      dst[static_cast<std::size_t>(y) * w + x] = centre + acc;
    }
  }
}

Image guided_filter_unchecked(const Image& guide, const Image& src, int radius, double eps) {
  const Image mean_i = box_mean(guide, radius);
  const Image mean_p = box_mean(src, radius);
  Image ii = guide;
  Image ip = guide;
  {
    auto g = guide.values();
    auto p = src.values();
    auto a = ii.values();
    auto b = ip.values();
    for (std::size_t k = 0; k < g.size(); ++k) {
      a[k] = g[k] * g[k];
      b[k] = g[k] * p[k];
    }
  }
  const Image corr_ii = box_mean(ii, radius);
  const Image corr_ip = box_mean(ip, radius);
  Image a = Image::like(src);
  Image b = Image::like(src);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double mi = mean_i.values()[k];
    const double mp = mean_p.values()[k];
    const double var = std::max(0.0, corr_ii.values()[k] - mi * mi);
    const double cov = corr_ip.values()[k] - mi * mp;
    const double ak = cov / (var + eps);
    a.values()[k] = ak;
    b.values()[k] = mp - ak * mi;
  }
  const Image mean_a = box_mean(a, radius);
  const Image mean_b = box_mean(b, radius);
  Image out = Image::like(src);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.values()[k] = mean_a.values()[k] * guide.values()[k] + mean_b.values()[k];
  }
  return out;
}

}  // namespace

void GuidedFilterConfig::validate() const {
  if (radius < 1) throw DomainError("guided filter: radius must be >= 1");
  if (!(eps > 0.0)) throw DomainError("guided filter: eps must be > 0");
}

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("gaussian blur: sigma must be > 0");
  const auto kernel = gaussian_kernel(sigma);
  Image tmp = Image::like(img);
  Image out = Image::like(img);
  for (int c = 0; c < img.channels(); ++c) {
    convolve_axis(img.plane(c), tmp.plane(c), img.height(), img.width(), kernel, true);
    convolve_axis(tmp.plane(c), out.plane(c), img.height(), img.width(), kernel, false);
  }
  return out;
}

Image box_mean(const Image& img, int radius) {
  const int h = img.height();
  const int w = img.width();
  Image sums = Image::like(img);
  Image out = Image::like(img);
  for (int c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    auto horiz = sums.plane(c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int xx = std::max(0, x - radius); xx <= std::min(w - 1, x + radius); ++xx) {
          acc += src[static_cast<std::size_t>(y) * w + xx];
        }
        horiz[static_cast<std::size_t>(y) * w + x] = acc;
      }
    }
    auto dst = out.plane(c);
    for (int y = 0; y < h; ++y) {
      const int y0 = std::max(0, y - radius);
      const int y1 = std::min(h - 1, y + radius);
      for (int x = 0; x < w; ++x) {
        const int count_x = std::min(w - 1, x + radius) - std::max(0, x - radius) + 1;
        double acc = 0.0;
        for (int yy = y0; yy <= y1; ++yy) acc += horiz[static_cast<std::size_t>(yy) * w + x];
        dst[static_cast<std::size_t>(y) * w + x] = acc / static_cast<double>(count_x * (y1 - y0 + 1));
      }
    }
  }
  return out;
}

Image guided_filter(const Image& guide, const Image& src, int radius, double eps) {
  if (guide.channels() != 1 || src.channels() != 1) {
    throw DimensionError("guided_filter: guide and source must be single-channel");
  }
  require_same_shape(guide, src, "guided_filter");
  GuidedFilterConfig{radius, eps}.validate();
  return guided_filter_unchecked(guide, src, radius, eps);
}

StokesFrame gaussian_denoise_stokes(const StokesFrame& s, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_denoise_stokes: sigma must be > 0");
  require_same_shape(s.s0, s.s1, "gaussian_denoise_stokes");
  require_same_shape(s.s0, s.s2, "gaussian_denoise_stokes");
  StokesFrame out;
  out.s0 = s.s0;
  out.s1 = gaussian_blur(s.s1, sigma);
  out.s2 = gaussian_blur(s.s2, sigma);
  return out;
}

StokesFrame guided_denoise_stokes(const StokesFrame& s, const Image& guide_i,
                                  const GuidedFilterConfig& cfg) {
  cfg.validate();
  require_same_shape(s.s0, s.s1, "guided_denoise_stokes");
  require_same_shape(s.s0, s.s2, "guided_denoise_stokes");
  require_same_extent(s.s1, guide_i, "guided_denoise_stokes guide");
  const bool per_channel = cfg.per_channel_guide && guide_i.channels() == s.s1.channels();
  if (cfg.per_channel_guide && !per_channel) {
    throw DimensionError("guided_denoise_stokes: per-channel guidance needs a guide with " +
                         std::to_string(s.s1.channels()) + " channels");
  }
  const Image luma = guide_i.channels() == 1 ? guide_i : guide_i.channel_mean();

  StokesFrame out;
  out.s0 = s.s0;
  out.s1 = Image::like(s.s1);
  out.s2 = Image::like(s.s2);
  for (int c = 0; c < s.s1.channels(); ++c) {
    const Image guide = per_channel ? guide_i.channel(c) : luma;
    out.s1.set_channel(c, guided_filter_unchecked(guide, s.s1.channel(c), cfg.radius, cfg.eps));
    out.s2.set_channel(c, guided_filter_unchecked(guide, s.s2.channel(c), cfg.radius, cfg.eps));
  }
  return out;
}

}  // namespace pvt
