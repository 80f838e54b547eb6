#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pvt/dofp.hpp"
#include "pvt/error.hpp"

namespace {

using pvt::DegradationConfig;
using pvt::Image;
using pvt::MosaicFrame;
using pvt::MosaicLayout;
using pvt::PolarFrame;

const MosaicLayout kLayout = MosaicLayout::imx250myr();

PolarFrame constant_frame(int h, int w, double v) {
  PolarFrame f;
  for (auto& d : f.dirs) d = Image(3, h, w, v);
  return f;
}

/// Each (direction, color) plane is its own affine function of (x, y).
PolarFrame ramp_frame(int h, int w) {
  PolarFrame f = PolarFrame::zeros(3, h, w);
  for (int d = 0; d < 4; ++d) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[d].at(c, y, x) = 0.2 + 0.003 * (d + 1) * x + 0.002 * (c + 1) * y;
      }
    }
  }
  return f;
}

TEST(ApplyForward, ConstantStaysConstant) {
  const MosaicFrame y = pvt::apply_forward(constant_frame(8, 8, 0.3), kLayout);
  for (double v : y.data.values()) EXPECT_EQ(v, 0.3);
}

TEST(ApplyForward, OneHotSelection) {
  for (int d = 0; d < 4; ++d) {
    for (int c = 0; c < 3; ++c) {
      PolarFrame x = PolarFrame::zeros(3, 8, 8);
      x[d].at(c, 5, 6) = 0.9;
      const MosaicFrame y = pvt::apply_forward(x, kLayout);
      const bool selected = oracle::direction_at(5, 6) == d && oracle::color_at(5, 6) == c;
      EXPECT_EQ(y.data.at(0, 5, 6), selected ? 0.9 : 0.0);
    }
  }
}

TEST(ApplyForward, MatchesPerPixelOracle) {
  const PolarFrame x = oracle::random_frame(3, 16, 24, 21);
  EXPECT_EQ(pvt::apply_forward(x, kLayout).data, oracle::forward(x));
}

TEST(ApplyForward, NoiseIsSeededAndClipped) {
  const PolarFrame x = constant_frame(16, 16, 0.01);
  const DegradationConfig cfg{1, 0.05, 42};
  const MosaicFrame a = pvt::apply_forward(x, kLayout, cfg);
  const MosaicFrame b = pvt::apply_forward(x, kLayout, cfg);
  EXPECT_EQ(a.data, b.data);
  EXPECT_GE(a.data.min(), 0.0);
  EXPECT_NE(a.data, pvt::apply_forward(x, kLayout, {1, 0.05, 43}).data);
}

TEST(ApplyForward, RejectsBadInputs) {
  PolarFrame mono = PolarFrame::zeros(1, 8, 8);
  EXPECT_THROW(pvt::apply_forward(mono, kLayout), pvt::DomainError);
  EXPECT_THROW(pvt::apply_forward(PolarFrame::zeros(3, 8, 10), kLayout), pvt::DimensionError);
  EXPECT_THROW(pvt::apply_forward(constant_frame(8, 8, 0.1), kLayout, {1, -1.0, 0}), pvt::DomainError);
  EXPECT_THROW(pvt::apply_forward(constant_frame(8, 8, 0.1), kLayout, {3, 0.0, 0}), pvt::DomainError);
}

TEST(PseudoInverse, ReproducesConstants) {
  const PolarFrame back = pvt::pseudo_inverse(pvt::apply_forward(constant_frame(16, 16, 0.6), kLayout));
  for (const auto& d : back.dirs) {
    for (double v : d.values()) EXPECT_EQ(v, 0.6);
  }
}

TEST(PseudoInverse, ForwardOfInverseIsIdentity) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    MosaicFrame y{oracle::random_image(1, 32, 40, seed), kLayout};
    const MosaicFrame again = pvt::apply_forward(pvt::pseudo_inverse(y), kLayout);
    for (std::size_t k = 0; k < y.data.size(); ++k) {
      EXPECT_NEAR(again.data.values()[k], y.data.values()[k], 1e-5);
    }
  }
}

TEST(PseudoInverse, RecoversLinearRampsInInterior) {
  const PolarFrame x = ramp_frame(48, 48);
  const PolarFrame back = pvt::pseudo_inverse(pvt::apply_forward(x, kLayout));
  for (int d = 0; d < 4; ++d) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 8; y < 40; ++y) {
        for (int xx = 8; xx < 40; ++xx) EXPECT_NEAR(back[d].at(c, y, xx), x[d].at(c, y, xx), 1e-4);
      }
    }
  }
}

TEST(DifficultyResidual, ZeroOnConstants) {
  const PolarFrame r = pvt::difficulty_residual(constant_frame(16, 16, 0.25), kLayout);
  for (const auto& d : r.dirs) {
    for (double v : d.values()) EXPECT_LE(std::abs(v), 1e-10);
  }
}

TEST(DifficultyResidual, SmallOnAffineInterior) {
  const PolarFrame r = pvt::difficulty_residual(ramp_frame(48, 48), kLayout);
  for (const auto& d : r.dirs) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 8; y < 40; ++y) {
        for (int x = 8; x < 40; ++x) EXPECT_LE(std::abs(d.at(c, y, x)), 1e-4);
      }
    }
  }
}

TEST(DifficultyResidual, StepEdgeResidualStaysNearTheEdge) {
  // Vertical step between columns 31 and 32.
  PolarFrame x = constant_frame(64, 64, 0.2);
  for (auto& d : x.dirs) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 64; ++y) {
        for (int xx = 32; xx < 64; ++xx) d.at(c, y, xx) = 0.8;
      }
    }
  }
  const PolarFrame r = pvt::difficulty_residual(x, kLayout);
  double near = 0.0, total = 0.0, far_max = 0.0;
  for (const auto& d : r.dirs) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 64; ++y) {
        for (int xx = 0; xx < 64; ++xx) {
          const double e = d.at(c, y, xx) * d.at(c, y, xx);
          const double dist = xx < 32 ? 31.5 - xx : xx - 31.5;
          total += e;
          if (dist <= 4.0) near += e;
          if (dist > 8.0) far_max = std::max(far_max, std::abs(d.at(c, y, xx)));
        }
      }
    }
  }
  EXPECT_GT(total, 0.0);
  EXPECT_GE(near / total, 0.9);
  EXPECT_LE(far_max, 1e-12);
}

TEST(DifficultyResidual, UpscaleResizes) {
  const PolarFrame r = pvt::difficulty_residual(constant_frame(16, 16, 0.25), kLayout, 2.0);
  EXPECT_EQ(r.height(), 32);
  EXPECT_THROW(pvt::difficulty_residual(constant_frame(16, 16, 0.25), kLayout, 0.5), pvt::DomainError);
}

TEST(ReorganizeProxyGt, ConstantMosaic) {
  const PolarFrame g = pvt::reorganize_proxy_gt({Image(1, 8, 8, 0.7), kLayout});
  EXPECT_EQ(g.height(), 2);
  EXPECT_EQ(g.channels(), 3);
  for (const auto& d : g.dirs) {
    for (double v : d.values()) EXPECT_EQ(v, 0.7);
  }
}

TEST(ReorganizeProxyGt, HandTracedIntegerMosaic) {
  Image y(1, 8, 8);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) y.at(0, r, c) = 8 * r + c;
  }
  const PolarFrame g = pvt::reorganize_proxy_gt({y, kLayout});
  // Superpixel (0, 0), traced from the layout table: [direction][R, G, B].
  const double top_left[4][3] = {{9, 18, 27}, {1, 10, 19}, {0, 9, 18}, {8, 17, 26}};
  for (int d = 0; d < 4; ++d) {
    for (int c = 0; c < 3; ++c) {
      for (int bi = 0; bi < 2; ++bi) {
        for (int bj = 0; bj < 2; ++bj) {
          EXPECT_EQ(g[d].at(c, bi, bj), top_left[d][c] + 32 * bi + 4 * bj) << d << c << bi << bj;
        }
      }
    }
  }
}

TEST(ReorganizeProxyGt, InvertsForwardOnBlockConstantFrames) {
  PolarFrame x = PolarFrame::zeros(3, 16, 16);
  const PolarFrame blocks = oracle::random_frame(3, 4, 4, 8);
  for (int d = 0; d < 4; ++d) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 16; ++y) {
        for (int xx = 0; xx < 16; ++xx) x[d].at(c, y, xx) = blocks[d].at(c, y / 4, xx / 4);
      }
    }
  }
  EXPECT_EQ(pvt::reorganize_proxy_gt(pvt::apply_forward(x, kLayout)), blocks);
}

TEST(ReorganizeProxyGt, RejectsIndivisibleDims) {
  EXPECT_THROW(pvt::reorganize_proxy_gt({Image(1, 6, 8), kLayout}), pvt::DimensionError);
}

TEST(MakeTrainingPair, NoResizeAtUnitFactor) {
  const PolarFrame gt = oracle::random_frame(3, 16, 16, 5);
  const auto pair = pvt::make_training_pair(gt, {1, 0.0, 0}, kLayout);
  EXPECT_EQ(pair.gt, gt);
  EXPECT_EQ(pair.mosaic_in.data, pvt::apply_forward(gt, kLayout).data);
}

TEST(MakeTrainingPair, ShapeAndConstants) {
  const auto pair = pvt::make_training_pair(constant_frame(64, 64, 0.35), {2, 0.0, 0}, kLayout);
  EXPECT_EQ(pair.mosaic_in.height(), 32);
  EXPECT_EQ(pair.mosaic_in.width(), 32);
  for (double v : pair.mosaic_in.data.values()) EXPECT_EQ(v, 0.35);
  const auto quarter = pvt::make_training_pair(constant_frame(64, 64, 0.35), {4, 0.0, 0}, kLayout);
  EXPECT_EQ(quarter.mosaic_in.height(), 16);
  for (double v : quarter.mosaic_in.data.values()) EXPECT_EQ(v, 0.35);
  EXPECT_THROW(pvt::make_training_pair(constant_frame(24, 24, 0.35), {4, 0.0, 0}, kLayout), pvt::DimensionError);
}

TEST(AddGaussianNoise, SeededAndNonNegative) {
  const PolarFrame x = constant_frame(8, 8, 0.02);
  const PolarFrame a = pvt::add_gaussian_noise(x, 0.05, 9);
  EXPECT_EQ(a, pvt::add_gaussian_noise(x, 0.05, 9));
  for (const auto& d : a.dirs) EXPECT_GE(d.min(), 0.0);
}

}  // namespace
