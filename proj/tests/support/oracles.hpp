#pragma once

// Straightforward reference implementations used to check the library. They favor the most
// literal formulation (direct sums, explicit tables) over speed or shared code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "pvt/flow.hpp"
#include "pvt/image.hpp"
#include "pvt/polar.hpp"

namespace oracle {

using pvt::Image;
using pvt::PolarFrame;

inline constexpr double kPi = std::numbers::pi;

/// Random image with values in [lo, hi).
inline Image random_image(int c, int h, int w, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Image img(c, h, w);
  for (double& v : img.values()) v = u(rng);
  return img;
}

inline PolarFrame random_frame(int c, int h, int w, std::uint64_t seed) {
  PolarFrame f;
  for (int d = 0; d < 4; ++d) f.dirs[d] = random_image(c, h, w, seed * 7 + d, 0.0, 1.0);
  return f;
}

/// Sensor table written out by hand: polarizer cell [[90, 45], [135, 0]] (direction indices
/// {{2, 1}, {3, 0}}), colors RGGB over the 2x2 cells of the 4x4 superpixel.
inline int direction_at(int r, int c) {
  static const int cell[2][2] = {{2, 1}, {3, 0}};
  return cell[r % 2][c % 2];
}
inline int color_at(int r, int c) {
  static const int bayer[2][2] = {{0, 1}, {1, 2}};
  return bayer[(r / 2) % 2][(c / 2) % 2];
}

/// Per-pixel selection loop.
inline Image forward(const PolarFrame& x) {
  Image y(1, x.height(), x.width());
  for (int r = 0; r < x.height(); ++r) {
    for (int c = 0; c < x.width(); ++c) y.at(0, r, c) = x[direction_at(r, c)].at(color_at(r, c), r, c);
  }
  return y;
}

/// Stokes from the textbook definitions.
inline std::array<double, 3> stokes(double x0, double x45, double x90, double x135) {
  return {0.5 * (x0 + x45 + x90 + x135), x0 - x90, x45 - x135};
}

/// Malus-law intensity behind a polarizer at angle theta.
inline double malus(double i, double p, double phi, double theta) {
  return i * (1.0 + p * std::cos(2.0 * (theta - phi)));
}

/// Catmull-Rom (a = -0.5) kernel, piecewise cubic, evaluated in extended precision.
inline double cubic_kernel(double xd) {
  const long double a = -0.5L;
  const long double x = std::abs(static_cast<long double>(xd));
  if (x <= 1.0L) return static_cast<double>((a + 2.0L) * x * x * x - (a + 3.0L) * x * x + 1.0L);
  if (x < 2.0L) return static_cast<double>(a * x * x * x - 5.0L * a * x * x + 8.0L * a * x - 4.0L * a);
  return 0.0;
}

/// Direct separable-free resize: out(y, x) = sum_ij k(sy - i) k(sx - j) in(clamp(i), clamp(j)).
inline Image resize(const Image& img, int oh, int ow) {
  Image out(img.channels(), oh, ow);
  const double fy = static_cast<double>(oh) / img.height();
  const double fx = static_cast<double>(ow) / img.width();
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const double sy = (y + 0.5) / fy - 0.5;
        const double sx = (x + 0.5) / fx - 0.5;
        double acc = 0.0;
        for (int i = static_cast<int>(std::floor(sy)) - 1; i <= static_cast<int>(std::floor(sy)) + 2; ++i) {
          for (int j = static_cast<int>(std::floor(sx)) - 1; j <= static_cast<int>(std::floor(sx)) + 2; ++j) {
            acc += cubic_kernel(sy - i) * cubic_kernel(sx - j) * img.clamped(c, i, j);
          }
        }
        out.at(c, y, x) = acc;
      }
    }
  }
  return out;
}

/// Direct 2D Gaussian convolution, truncated at ceil(3 sigma), replicate borders.
inline Image gaussian_blur(const Image& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  Image out = Image::like(img);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        double acc = 0.0;
        double norm = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            acc += w * img.clamped(c, y + dy, x + dx);
            norm += w;
          }
        }
        out.at(c, y, x) = acc / norm;
      }
    }
  }
  return out;
}

/// Window mean over the part of the (2r+1)^2 box that lies inside the frame.
inline Image box_mean(const Image& img, int r) {
  Image out = Image::like(img);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        double acc = 0.0;
        int n = 0;
        for (int yy = std::max(0, y - r); yy <= std::min(img.height() - 1, y + r); ++yy) {
          for (int xx = std::max(0, x - r); xx <= std::min(img.width() - 1, x + r); ++xx) {
            acc += img.at(c, yy, xx);
            ++n;
          }
        }
        out.at(c, y, x) = acc / n;
      }
    }
  }
  return out;
}

/// Guided filter written from its defining formulas: per window a = cov(I, p) / (var(I) + eps),
/// b = mean(p) - a mean(I); output = mean(a) I + mean(b).
inline Image guided_filter(const Image& guide, const Image& src, int r, double eps) {
  const int h = guide.height();
  const int w = guide.width();
  Image a(1, h, w);
  Image b(1, h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double si = 0, sp = 0, sii = 0, sip = 0;
      int n = 0;
      for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy) {
        for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
          const double gi = guide.at(0, yy, xx);
          const double pi = src.at(0, yy, xx);
          si += gi;
          sp += pi;
          sii += gi * gi;
          sip += gi * pi;
          ++n;
        }
      }
      const double mi = si / n;
      const double mp = sp / n;
      const double var = sii / n - mi * mi;
      const double cov = sip / n - mi * mp;
      a.at(0, y, x) = cov / (var + eps);
      b.at(0, y, x) = mp - a.at(0, y, x) * mi;
    }
  }
  const Image ma = box_mean(a, r);
  const Image mb = box_mean(b, r);
  Image out(1, h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(0, y, x) = ma.at(0, y, x) * guide.at(0, y, x) + mb.at(0, y, x);
  }
  return out;
}

inline double mse(const Image& a, const Image& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a.values()[k] - b.values()[k];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

/// SSIM with an 11x11 Gaussian window (sigma 1.5) evaluated only where the window fits,
/// computed by direct window sums.
inline double ssim(const Image& x, const Image& y, double peak) {
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  double win[11][11];
  double norm = 0.0;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      win[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2.0 * 1.5 * 1.5));
      norm += win[i][j];
    }
  }
  double total = 0.0;
  int count = 0;
  for (int c = 0; c < x.channels(); ++c) {
    double chan = 0.0;
    int n = 0;
    for (int y0 = 0; y0 + 11 <= x.height(); ++y0) {
      for (int x0 = 0; x0 + 11 <= x.width(); ++x0) {
        double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
        for (int i = 0; i < 11; ++i) {
          for (int j = 0; j < 11; ++j) {
            const double w = win[i][j] / norm;
            const double a = x.at(c, y0 + i, x0 + j);
            const double b = y.at(c, y0 + i, x0 + j);
            mx += w * a;
            my += w * b;
            sxx += w * a * a;
            syy += w * b * b;
            sxy += w * a * b;
          }
        }
        const double vx = sxx - mx * mx;
        const double vy = syy - my * my;
        const double cxy = sxy - mx * my;
        chan += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++n;
      }
    }
    total += chan / n;
    ++count;
  }
  return total / count;
}

/// Forward differences; the last row/column steps backward.
inline double forward_diff_x(const Image& f, int y, int x) {
  if (x + 1 < f.width()) return f.at(0, y, x + 1) - f.at(0, y, x);
  return f.at(0, y, x) - f.at(0, y, x - 1);
}
inline double forward_diff_y(const Image& f, int y, int x) {
  if (y + 1 < f.height()) return f.at(0, y + 1, x) - f.at(0, y, x);
  return f.at(0, y, x) - f.at(0, y - 1, x);
}

}  // namespace oracle
