#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pvt/error.hpp"
#include "pvt/polar.hpp"

namespace {

using pvt::Image;
using pvt::PolarFrame;
using pvt::PolarParams;
using pvt::StokesFrame;
constexpr double kPi = oracle::kPi;

PolarParams single(double i, double p, double phi) {
  return {Image(1, 1, 1, i), Image(1, 1, 1, p), Image(1, 1, 1, phi), true};
}

PolarParams random_params(int c, int h, int w, std::uint64_t seed) {
  return {oracle::random_image(c, h, w, seed, 0.05, 2.0), oracle::random_image(c, h, w, seed + 1, 0.01, 1.0),
          oracle::random_image(c, h, w, seed + 2, 0.0, kPi), true};
}

TEST(RenderDirections, FullyPolarizedAtZeroDegrees) {
  const PolarFrame f = pvt::render_directions(single(1.0, 1.0, 0.0));
  EXPECT_DOUBLE_EQ(f[0].at(0, 0, 0), 2.0);
  EXPECT_NEAR(f[1].at(0, 0, 0), 1.0, 1e-15);
  EXPECT_NEAR(f[2].at(0, 0, 0), 0.0, 1e-15);
  EXPECT_NEAR(f[3].at(0, 0, 0), 1.0, 1e-15);
}

TEST(RenderDirections, UnpolarizedLightIsIsotropic) {
  const PolarFrame f = pvt::render_directions(single(0.7, 0.0, 1.1));
  for (int d = 0; d < 4; ++d) EXPECT_DOUBLE_EQ(f[d].at(0, 0, 0), 0.7);
}

TEST(RenderDirections, HalfPolarizedAtFortyFiveDegrees) {
  const PolarFrame f = pvt::render_directions(single(1.0, 0.5, kPi / 4));
  EXPECT_NEAR(f[0].at(0, 0, 0), 1.0, 1e-12);
  EXPECT_NEAR(f[1].at(0, 0, 0), 1.5, 1e-12);
  EXPECT_NEAR(f[2].at(0, 0, 0), 1.0, 1e-12);
  EXPECT_NEAR(f[3].at(0, 0, 0), 0.5, 1e-12);
}

TEST(RenderDirections, MatchesMalusLawOracle) {
  const PolarParams p = random_params(3, 9, 7, 11);
  const PolarFrame f = pvt::render_directions(p);
  for (int d = 0; d < 4; ++d) {
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 7; ++x) {
          const double expect = oracle::malus(p.i.at(c, y, x), p.p.at(c, y, x), p.phi.at(c, y, x), d * kPi / 4);
          EXPECT_NEAR(f[d].at(c, y, x), expect, 1e-14);
        }
      }
    }
  }
}

TEST(RenderDirections, RejectsUnphysicalParams) {
  EXPECT_THROW(pvt::render_directions(single(1.0, 1.5, 0.0)), pvt::DomainError);
  EXPECT_THROW(pvt::render_directions(single(NAN, 0.5, 0.0)), pvt::DomainError);
  EXPECT_THROW(pvt::render_directions(single(-1.0, 0.5, 0.0)), pvt::DomainError);
}

TEST(StokesFromDirections, ConstantFrame) {
  PolarFrame f;
  for (auto& d : f.dirs) d = Image(3, 2, 2, 0.25);
  const StokesFrame s = pvt::stokes_from_directions(f);
  for (double v : s.s0.values()) EXPECT_DOUBLE_EQ(v, 0.5);
  for (double v : s.s1.values()) EXPECT_DOUBLE_EQ(v, 0.0);
  for (double v : s.s2.values()) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(StokesFromDirections, HandValues) {
  PolarFrame f;
  const double xs[4] = {2, 1, 0, 1};
  for (int d = 0; d < 4; ++d) f.dirs[d] = Image(1, 1, 1, xs[d]);
  const StokesFrame s = pvt::stokes_from_directions(f);
  EXPECT_DOUBLE_EQ(s.s0.at(0, 0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.s1.at(0, 0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.s2.at(0, 0, 0), 0.0);
}

TEST(StokesFromDirections, MatchesPerPixelOracle) {
  const PolarFrame f = oracle::random_frame(3, 8, 5, 4);
  const StokesFrame s = pvt::stokes_from_directions(f);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 5; ++x) {
        const auto e = oracle::stokes(f[0].at(c, y, x), f[1].at(c, y, x), f[2].at(c, y, x), f[3].at(c, y, x));
        EXPECT_EQ(s.s0.at(c, y, x), e[0]);
        EXPECT_EQ(s.s1.at(c, y, x), e[1]);
        EXPECT_EQ(s.s2.at(c, y, x), e[2]);
      }
    }
  }
}

TEST(StokesFromDirections, IsLinear) {
  const PolarFrame a = oracle::random_frame(1, 6, 6, 1);
  const PolarFrame b = oracle::random_frame(1, 6, 6, 2);
  PolarFrame mix;
  for (int d = 0; d < 4; ++d) mix.dirs[d] = a[d] * 0.5 + b[d] * 2.0;
  const StokesFrame sa = pvt::stokes_from_directions(a);
  const StokesFrame sb = pvt::stokes_from_directions(b);
  const StokesFrame sm = pvt::stokes_from_directions(mix);
  for (std::size_t k = 0; k < sm.s0.size(); ++k) {
    EXPECT_NEAR(sm.s0.values()[k], 0.5 * sa.s0.values()[k] + 2.0 * sb.s0.values()[k], 1e-14);
    EXPECT_NEAR(sm.s1.values()[k], 0.5 * sa.s1.values()[k] + 2.0 * sb.s1.values()[k], 1e-14);
    EXPECT_NEAR(sm.s2.values()[k], 0.5 * sa.s2.values()[k] + 2.0 * sb.s2.values()[k], 1e-14);
  }
}

TEST(StokesFromDirections, RejectsNegativeIntensity) {
  PolarFrame f = PolarFrame::zeros(1, 2, 2);
  f[2].at(0, 1, 1) = -0.1;
  EXPECT_THROW(pvt::stokes_from_directions(f), pvt::DomainError);
}

TEST(ParamsFromStokes, HandValues) {
  StokesFrame s{Image(1, 1, 1, 2.0), Image(1, 1, 1, 2.0), Image(1, 1, 1, 0.0), false};
  PolarParams p = pvt::params_from_stokes(s, false);
  EXPECT_DOUBLE_EQ(p.i.at(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(p.p.at(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(p.phi.at(0, 0, 0), 0.0);

  s = {Image(1, 1, 1, 2.0), Image(1, 1, 1, 0.0), Image(1, 1, 1, 2.0), false};
  p = pvt::params_from_stokes(s, false);
  EXPECT_DOUBLE_EQ(p.i.at(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(p.p.at(0, 0, 0), 1.0);
  EXPECT_NEAR(p.phi.at(0, 0, 0), kPi / 4, 1e-15);
}

TEST(ParamsFromStokes, ZeroIntensityHasNoPolarization) {
  StokesFrame s{Image(1, 1, 1, 0.0), Image(1, 1, 1, 0.0), Image(1, 1, 1, 0.0), false};
  const PolarParams p = pvt::params_from_stokes(s, true);
  EXPECT_EQ(p.p.at(0, 0, 0), 0.0);
  EXPECT_EQ(p.phi.at(0, 0, 0), 0.0);
}

TEST(ParamsFromStokes, ClampIsOptIn) {
  StokesFrame s{Image(1, 1, 1, 1.0), Image(1, 1, 1, 1.5), Image(1, 1, 1, 0.0), false};
  EXPECT_DOUBLE_EQ(pvt::params_from_stokes(s, false).p.at(0, 0, 0), 1.5);
  const PolarParams c = pvt::params_from_stokes(s, true);
  EXPECT_DOUBLE_EQ(c.p.at(0, 0, 0), 1.0);
  EXPECT_TRUE(c.clamped);
}

TEST(ParamsFromStokes, AngleCoversEveryQuadrant) {
  for (double phi : {0.0, 0.3, kPi / 2 - 0.01, kPi / 2, 2.0, kPi - 1e-3}) {
    const PolarFrame f = pvt::render_directions(single(1.0, 0.8, phi));
    const PolarParams p = pvt::params_from_stokes(pvt::stokes_from_directions(f), true);
    EXPECT_LT(pvt::aop_distance(p.phi.at(0, 0, 0), phi), 1e-12) << phi;
    EXPECT_GE(p.phi.at(0, 0, 0), 0.0);
    EXPECT_LT(p.phi.at(0, 0, 0), kPi);
  }
}

TEST(PolarRoundTrip, RecoversRandomFields) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PolarParams truth = random_params(3, 16, 16, 100 + seed * 3);
    const PolarParams back =
        pvt::params_from_stokes(pvt::stokes_from_directions(pvt::render_directions(truth)), true);
    for (std::size_t k = 0; k < truth.i.size(); ++k) {
      EXPECT_NEAR(back.i.values()[k], truth.i.values()[k], 1e-9 * truth.i.values()[k]);
      EXPECT_NEAR(back.p.values()[k], truth.p.values()[k], 1e-9 * truth.p.values()[k]);
      EXPECT_LT(pvt::aop_distance(back.phi.values()[k], truth.phi.values()[k]), 1e-9);
    }
  }
}

TEST(PolarRoundTrip, ScaleEquivariance) {
  const PolarFrame f = oracle::random_frame(3, 6, 6, 9);
  PolarFrame g;
  for (int d = 0; d < 4; ++d) g.dirs[d] = f[d] * 3.5;
  const PolarParams a = pvt::params_from_stokes(pvt::stokes_from_directions(f), false);
  const PolarParams b = pvt::params_from_stokes(pvt::stokes_from_directions(g), false);
  for (std::size_t k = 0; k < a.i.size(); ++k) {
    EXPECT_NEAR(b.i.values()[k], 3.5 * a.i.values()[k], 1e-12);
    EXPECT_NEAR(b.p.values()[k], a.p.values()[k], 1e-9);
    EXPECT_LT(pvt::aop_distance(b.phi.values()[k], a.phi.values()[k]), 1e-9);
  }
}

TEST(ClampPhysical, ScalesPolarizedPartDown) {
  StokesFrame s{Image(1, 1, 1, 1.0), Image(1, 1, 1, 3.0), Image(1, 1, 1, 4.0), false};
  const StokesFrame c = pvt::clamp_physical(s);
  EXPECT_NEAR(std::hypot(c.s1.at(0, 0, 0), c.s2.at(0, 0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(c.s1.at(0, 0, 0) / c.s2.at(0, 0, 0), 0.75, 1e-15);
  EXPECT_TRUE(c.clamped);
}

TEST(AopDistance, Examples) {
  EXPECT_EQ(pvt::aop_distance(0.3, 0.3), 0.0);
  EXPECT_NEAR(pvt::aop_distance(0.1, 0.1 + kPi), 0.0, 1e-15);
  EXPECT_NEAR(pvt::aop_distance(0.0, kPi / 2), kPi / 2, 1e-15);
}

TEST(AopDistance, IsAMetricOnRandomTriples) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, kPi);
  for (int k = 0; k < 2000; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng);
    EXPECT_DOUBLE_EQ(pvt::aop_distance(a, b), pvt::aop_distance(b, a));
    EXPECT_LE(pvt::aop_distance(a, c), pvt::aop_distance(a, b) + pvt::aop_distance(b, c) + 1e-12);
    EXPECT_LE(pvt::aop_distance(a, b), kPi / 2);
    EXPECT_GE(pvt::aop_distance(a, b), 0.0);
  }
}

TEST(WrapAop, MapsIntoHalfOpenRange) {
  EXPECT_DOUBLE_EQ(pvt::wrap_aop(-0.5), kPi - 0.5);
  EXPECT_DOUBLE_EQ(pvt::wrap_aop(kPi), 0.0);
  EXPECT_NEAR(pvt::wrap_aop(3 * kPi + 0.25), 0.25, 1e-12);
}

TEST(EncodePolarFeatures, Examples) {
  PolarParams p{Image(2, 1, 1, 1.0), Image(2, 1, 1), Image(2, 1, 1), true};
  p.p.at(0, 0, 0) = 0.5;
  p.phi.at(0, 0, 0) = 0.0;
  p.p.at(1, 0, 0) = 1.0;
  p.phi.at(1, 0, 0) = kPi / 2;
  const Image f = pvt::encode_polar_features(p).data;
  ASSERT_EQ(f.channels(), 6);
  EXPECT_DOUBLE_EQ(f.at(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(f.at(1, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(f.at(2, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(f.at(3, 0, 0), -1.0);
  EXPECT_NEAR(f.at(4, 0, 0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(f.at(5, 0, 0), 1.0);
}

TEST(EncodePolarFeatures, UnitCircle) {
  const Image f = pvt::encode_polar_features(random_params(3, 10, 10, 77)).data;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 10; ++y) {
      for (int x = 0; x < 10; ++x) {
        const double cs = f.at(3 * c, y, x), sn = f.at(3 * c + 1, y, x);
        EXPECT_NEAR(cs * cs + sn * sn, 1.0, 1e-12);
      }
    }
  }
}

TEST(HsvVisualize, UnpolarizedIsGray) {
  const Image rgb = pvt::hsv_visualize({oracle::random_image(1, 4, 4, 3), Image(1, 4, 4, 0.0),
                                        oracle::random_image(1, 4, 4, 4, 0.0, kPi), true});
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      EXPECT_DOUBLE_EQ(rgb.at(0, y, x), rgb.at(1, y, x));
      EXPECT_DOUBLE_EQ(rgb.at(1, y, x), rgb.at(2, y, x));
    }
  }
}

TEST(HsvVisualize, HueWrapsAtPi) {
  const Image a = pvt::hsv_visualize(single(1.0, 0.7, 0.0));
  const Image b = pvt::hsv_visualize(single(1.0, 0.7, kPi - 1e-9));
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(a.at(c, 0, 0), b.at(c, 0, 0), 1e-7);
}

TEST(HsvVisualize, OneThirdPiIsGreen) {
  // phi = pi/3 sits at 120 degrees of the hue circle: pure green at full saturation.
  const Image rgb = pvt::hsv_visualize(single(1.0, 1.0, kPi / 3));
  EXPECT_NEAR(rgb.at(0, 0, 0), 0.0, 1e-12);
  EXPECT_NEAR(rgb.at(1, 0, 0), 1.0, 1e-12);
  EXPECT_NEAR(rgb.at(2, 0, 0), 0.0, 1e-12);
}

TEST(HsvVisualize, BlackFrameStaysBlack) {
  const Image rgb = pvt::hsv_visualize(single(0.0, 0.5, 1.0));
  for (double v : rgb.values()) EXPECT_EQ(v, 0.0);
}

TEST(ChannelAverage, AveragesAngleOnDoubledCircle) {
  PolarParams p{Image(3, 1, 1, 1.0), Image(3, 1, 1, 0.5), Image(3, 1, 1), true};
  p.phi.at(0, 0, 0) = 0.05;
  p.phi.at(1, 0, 0) = kPi - 0.05;
  p.phi.at(2, 0, 0) = 0.0;
  const PolarParams a = pvt::channel_average(p);
  EXPECT_LT(pvt::aop_distance(a.phi.at(0, 0, 0), 0.0), 1e-12);
}

}  // namespace
