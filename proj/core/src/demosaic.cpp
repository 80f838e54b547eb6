#include "pvt/demosaic.hpp"

#include <string>

#include "pvt/error.hpp"

namespace pvt {
namespace {

// 3x3 bilinear kernels: the cross suits the quincunx green lattice, the full tent suits the
// rectangular red/blue lattices.
constexpr double kCross[3][3] = {{0, 1, 0}, {1, 4, 1}, {0, 1, 0}};
constexpr double kTent[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};

}  // namespace

PolarFrame initialize_lr(const MosaicFrame& y) {
  y.validate();
  const int h = y.height() / 2;
  const int w = y.width() / 2;
  PolarFrame out = PolarFrame::zeros(3, h, w);

  for (int d = 0; d < kNumDirections; ++d) {
    const auto parity = y.layout.direction_parity(d);
    if (!parity) {
      throw DomainError("initialize_lr: layout '" + y.layout.name() + "' does not place direction " +
                        std::to_string(kDirectionDegrees[d]) + " on a stride-2 lattice");
    }
    Image sub(1, h, w);
    std::vector<int> color_of(static_cast<std::size_t>(h) * w);
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        const int r = 2 * i + parity->row;
        const int c = 2 * j + parity->col;
        sub.at(0, i, j) = y.data.at(0, r, c);
        color_of[static_cast<std::size_t>(i) * w + j] = y.layout.at(r, c).color;
      }
    }

    for (int color = 0; color < kNumColors; ++color) {
      const auto& kernel = y.layout.sites(d, color).size() == 2 ? kCross : kTent;
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          if (color_of[static_cast<std::size_t>(i) * w + j] == color) {
            out[d].at(color, i, j) = sub.at(0, i, j);
            continue;
          }
          // Weighted mean taken relative to the first neighbour found, so flat input stays exact.
          double anchor = 0.0;
          bool anchored = false;
          double num = 0.0;
          double den = 0.0;
          for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
              const int ii = i + di;
              const int jj = j + dj;
              if (ii < 0 || ii >= h || jj < 0 || jj >= w) continue;
              if (color_of[static_cast<std::size_t>(ii) * w + jj] != color) continue;
              const double k = kernel[di + 1][dj + 1];
              const double v = sub.at(0, ii, jj);
              if (!anchored) {
                anchor = v;
                anchored = true;
              }
              num += k * (v - anchor);
              den += k;
            }
          }
          out[d].at(color, i, j) = den > 0.0 ? anchor + num / den : 0.0;
        }
      }
    }
  }
  return out;
}

PolarFrame demosaic_full(const MosaicFrame& y) { return pseudo_inverse(y); }

}  // namespace pvt
