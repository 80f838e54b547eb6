#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pvt/error.hpp"
#include "pvt/flow.hpp"

namespace {

using pvt::FlowField;
using pvt::Image;

FlowField field_from(int h, int w, double (*fu)(double, double), double (*fv)(double, double)) {
  FlowField m = FlowField::zeros(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      m.u.at(0, y, x) = fu(x, y);
      m.v.at(0, y, x) = fv(x, y);
    }
  }
  return m;
}

// Centre (w0, h0) = (10, 8).
double expand_u(double x, double) { return x - 10.0; }
double expand_v(double, double y) { return y - 8.0; }
double rotate_u(double, double y) { return -(y - 8.0); }
double rotate_v(double x, double) { return x - 10.0; }

void expect_interior(const Image& f, double value, double tol) {
  for (int y = 1; y + 1 < f.height(); ++y) {
    for (int x = 1; x + 1 < f.width(); ++x) EXPECT_NEAR(f.at(0, y, x), value, tol);
  }
}

Image smooth_texture(int h, int w, double shift_x) {
  Image img(1, h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double xs = x - shift_x;
      img.at(0, y, x) = 0.5 + 0.2 * std::sin(2.0 * oracle::kPi * xs / 16.0) * std::cos(2.0 * oracle::kPi * y / 20.0) +
                        0.003 * xs;
    }
  }
  return img;
}

TEST(Divergence, AnalyticFields) {
  expect_interior(pvt::divergence(FlowField::constant(12, 14, 0.4, -1.3)), 0.0, 1e-12);
  expect_interior(pvt::divergence(field_from(16, 20, expand_u, expand_v)), 2.0, 1e-6);
  expect_interior(pvt::divergence(field_from(16, 20, rotate_u, rotate_v)), 0.0, 1e-6);
}

TEST(Curl, AnalyticFields) {
  expect_interior(pvt::curl(FlowField::constant(12, 14, 0.4, -1.3)), 0.0, 1e-12);
  expect_interior(pvt::curl(field_from(16, 20, rotate_u, rotate_v)), 2.0, 1e-6);
  expect_interior(pvt::curl(field_from(16, 20, expand_u, expand_v)), 0.0, 1e-6);
}

TEST(Divergence, MatchesForwardDifferenceOracleEverywhere) {
  FlowField m{oracle::random_image(1, 9, 11, 1), oracle::random_image(1, 9, 11, 2)};
  const Image div = pvt::divergence(m);
  const Image rot = pvt::curl(m);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 11; ++x) {
      EXPECT_NEAR(div.at(0, y, x), oracle::forward_diff_x(m.u, y, x) + oracle::forward_diff_y(m.v, y, x), 1e-15);
      EXPECT_NEAR(rot.at(0, y, x), oracle::forward_diff_x(m.v, y, x) - oracle::forward_diff_y(m.u, y, x), 1e-15);
    }
  }
}

TEST(BilinearSample, InterpolatesAndClamps) {
  Image img(1, 2, 2);
  img.at(0, 0, 0) = 0.0;
  img.at(0, 0, 1) = 1.0;
  img.at(0, 1, 0) = 2.0;
  img.at(0, 1, 1) = 3.0;
  EXPECT_DOUBLE_EQ(pvt::bilinear_sample(img, 0, 0.5, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(pvt::bilinear_sample(img, 0, 0.0, 0.25), 0.25);
  EXPECT_DOUBLE_EQ(pvt::bilinear_sample(img, 0, -4.0, 9.0), 1.0);
}

TEST(BackwardWarp, ZeroFlowIsBitExact) {
  const Image img = oracle::random_image(3, 10, 12, 3);
  EXPECT_EQ(pvt::backward_warp(img, FlowField::zeros(10, 12)), img);
}

TEST(BackwardWarp, IntegerShift) {
  const Image img = oracle::random_image(1, 10, 12, 4);
  const Image out = pvt::backward_warp(img, FlowField::constant(10, 12, 1.0, 0.0));
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x + 1 < 12; ++x) EXPECT_EQ(out.at(0, y, x), img.at(0, y, x + 1));
  }
}

TEST(BackwardWarp, ForthAndBackOnSmoothContent) {
  // Low-frequency content: periods of 32 and 40 pixels.
  Image img(1, 40, 40);
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 40; ++x) {
      img.at(0, y, x) = 0.5 + 0.2 * std::sin(2.0 * oracle::kPi * x / 32.0) * std::cos(2.0 * oracle::kPi * y / 40.0);
    }
  }
  const FlowField m = FlowField::constant(40, 40, 0.6, -0.3);
  const Image back = pvt::backward_warp(pvt::backward_warp(img, m), m.negated());
  for (int y = 4; y < 36; ++y) {
    for (int x = 4; x < 36; ++x) EXPECT_NEAR(back.at(0, y, x), img.at(0, y, x), 1e-2);
  }
}

TEST(BackwardWarp, RejectsMismatch) {
  EXPECT_THROW(pvt::backward_warp(Image(1, 4, 4), FlowField::zeros(4, 5)), pvt::DimensionError);
}

TEST(SoftmaxSplat, ZeroFlowIsIdentityWithUnitCoverage) {
  const Image img = oracle::random_image(3, 9, 7, 5);
  const pvt::SplatResult r = pvt::softmax_splat(img, FlowField::zeros(9, 7));
  EXPECT_EQ(r.image, img);
  for (double c : r.coverage.values()) EXPECT_EQ(c, 1.0);
}

// Pixel (0, 0) moves onto (0, 1), which itself stays; (0, 0) becomes a hole.
struct Collision {
  Image img{1, 1, 3};
  FlowField m = FlowField::zeros(1, 3);
  double a = 0.8;
  double b = 0.2;
  Collision() {
    img.at(0, 0, 0) = a;
    img.at(0, 0, 1) = b;
    img.at(0, 0, 2) = 0.5;
    m.u.at(0, 0, 0) = 1.0;
  }
};

TEST(SoftmaxSplat, UniformCollisionAverages) {
  const Collision c;
  const pvt::SplatResult r = pvt::softmax_splat(c.img, c.m);
  EXPECT_NEAR(r.image.at(0, 0, 1), (c.a + c.b) / 2.0, 1e-12);
  EXPECT_EQ(r.coverage.at(0, 0, 0), 0.0);
  EXPECT_EQ(r.image.at(0, 0, 0), 0.0);
}

TEST(SoftmaxSplat, ImportanceCollisionWeightsThreeToOne) {
  const Collision c;
  Image z(1, 1, 3);
  z.at(0, 0, 0) = std::log(3.0);
  const pvt::SplatResult r = pvt::softmax_splat(c.img, c.m, z);
  EXPECT_NEAR(r.image.at(0, 0, 1), (3.0 * c.a + c.b) / 4.0, 1e-9);
  Image shifted = z;
  for (double& v : shifted.values()) v += 17.0;
  const pvt::SplatResult s = pvt::softmax_splat(c.img, c.m, shifted);
  for (std::size_t k = 0; k < r.image.size(); ++k) EXPECT_NEAR(s.image.values()[k], r.image.values()[k], 1e-9);
}

TEST(SoftmaxSplat, ConservesMassForNonCollidingIntegerFlow) {
  const Image img = oracle::random_image(1, 8, 8, 6);
  const pvt::SplatResult r = pvt::softmax_splat(img, FlowField::constant(8, 8, 2.0, -1.0));
  double landed = 0.0;
  for (int y = 1; y < 8; ++y) {
    for (int x = 0; x < 6; ++x) landed += img.at(0, y, x);
  }
  double out = 0.0;
  for (std::size_t k = 0; k < r.image.size(); ++k) {
    if (r.coverage.values()[k] > 0.0) out += r.image.values()[k];
  }
  EXPECT_DOUBLE_EQ(out, landed);
}

TEST(SoftmaxSplat, ThreadCountInvariance) {
  const Image img = oracle::random_image(3, 37, 29, 7);
  FlowField m{oracle::random_image(1, 37, 29, 8, -3.0, 3.0), oracle::random_image(1, 37, 29, 9, -3.0, 3.0)};
  const Image z = oracle::random_image(1, 37, 29, 10, -2.0, 0.0);
  const pvt::SplatResult one = pvt::softmax_splat(img, m, z, 1);
  for (int threads : {2, 3, 8}) {
    const pvt::SplatResult many = pvt::softmax_splat(img, m, z, threads);
    for (std::size_t k = 0; k < one.image.size(); ++k) EXPECT_NEAR(many.image.values()[k], one.image.values()[k], 1e-6);
  }
}

TEST(SoftmaxSplat, RejectsBadImportance) {
  const Image img(1, 4, 4, 0.5);
  Image z(1, 4, 4);
  z.at(0, 1, 1) = std::nan("");
  EXPECT_THROW(pvt::softmax_splat(img, FlowField::zeros(4, 4), z), pvt::DomainError);
  EXPECT_THROW(pvt::softmax_splat(img, FlowField::zeros(4, 4), Image(1, 4, 3)), pvt::DimensionError);
}

TEST(BrightnessResidualImportance, ZeroWhenAligned) {
  const Image a = smooth_texture(12, 12, 0.0);
  const Image z = pvt::brightness_residual_importance(a, a, FlowField::zeros(12, 12));
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(BlendSplat, EndpointsWithZeroFlowAreExact) {
  const Image f0 = oracle::random_image(3, 8, 9, 11);
  const Image f1 = oracle::random_image(3, 8, 9, 12);
  const FlowField zero = FlowField::zeros(8, 9);
  EXPECT_EQ(pvt::blend_splat(f0, f1, zero, zero, 0.0), f0);
  EXPECT_EQ(pvt::blend_splat(f0, f1, zero, zero, 1.0), f1);
}

TEST(BlendSplat, ConstantFramesStayConstant) {
  const Image f(1, 12, 12, 0.37);
  FlowField m0{oracle::random_image(1, 12, 12, 13, -2.0, 2.0), oracle::random_image(1, 12, 12, 14, -2.0, 2.0)};
  FlowField m1{oracle::random_image(1, 12, 12, 15, -2.0, 2.0), oracle::random_image(1, 12, 12, 16, -2.0, 2.0)};
  for (auto mode : {pvt::SplatImportance::kUniform, pvt::SplatImportance::kBrightnessResidual}) {
    const Image out = pvt::blend_splat(f, f, m0, m1, 0.4, mode);
    for (double v : out.values()) EXPECT_NEAR(v, 0.37, 1e-12);
  }
}

TEST(BlendSplat, HolesFallBackToNearerFrame) {
  const Image f0(1, 4, 6, 0.2);
  const Image f1(1, 4, 6, 0.9);
  // Everything leaves to the right, so column 0 and 1 receive nothing.
  const FlowField away = FlowField::constant(4, 6, 2.0, 0.0);
  const Image out = pvt::blend_splat(f0, f1, away, away, 0.25);
  EXPECT_EQ(out.at(0, 0, 0), 0.2);
  EXPECT_THROW(pvt::blend_splat(f0, f1, away, away, 1.5), pvt::DomainError);
}

TEST(ScaleFlow, Contracts) {
  const FlowField m = FlowField::constant(8, 8, 1.0, 0.0);
  const FlowField same = pvt::scale_flow(m, 1.0, 1.0);
  EXPECT_EQ(same.u, m.u);
  const FlowField up = pvt::scale_flow(m, 2.0, 1.0);
  EXPECT_EQ(up.height(), 16);
  for (double v : up.u.values()) EXPECT_NEAR(v, 2.0, 1e-12);
  for (double v : up.v.values()) EXPECT_EQ(v, 0.0);
  const FlowField zero = pvt::scale_flow(m, 1.0, 0.0);
  for (double v : zero.u.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(pvt::scale_flow(m, 0.0, 1.0), pvt::DomainError);
  EXPECT_THROW(pvt::scale_flow(m, 1.0, 1.5), pvt::DomainError);
}

TEST(HornSchunck, IdenticalAndConstantInputsGiveZeroFlow) {
  const Image a = smooth_texture(48, 48, 0.0);
  const FlowField same = pvt::estimate_flow_hs(a, a);
  for (double v : same.u.values()) EXPECT_LE(std::abs(v), 1e-6);
  for (double v : same.v.values()) EXPECT_LE(std::abs(v), 1e-6);
  const FlowField flat = pvt::estimate_flow_hs(Image(1, 32, 32, 0.5), Image(1, 32, 32, 0.5));
  for (double v : flat.u.values()) EXPECT_EQ(v, 0.0);
}

TEST(HornSchunck, RecoversUnitShift) {
  const Image i0 = smooth_texture(64, 64, 0.0);
  const Image i1 = smooth_texture(64, 64, 1.0);
  const FlowField m = pvt::estimate_flow_hs(i0, i1);
  double su = 0.0, sv = 0.0;
  int n = 0;
  for (int y = 8; y < 56; ++y) {
    for (int x = 8; x < 56; ++x) {
      su += m.u.at(0, y, x);
      sv += std::abs(m.v.at(0, y, x));
      ++n;
    }
  }
  EXPECT_GE(su / n, 0.7);
  EXPECT_LE(su / n, 1.1);
  EXPECT_LT(sv / n, 0.15);
}

TEST(HornSchunck, Deterministic) {
  const Image i0 = smooth_texture(32, 32, 0.0);
  const Image i1 = smooth_texture(32, 32, 0.5);
  const FlowField a = pvt::estimate_flow_hs(i0, i1);
  const FlowField b = pvt::estimate_flow_hs(i0, i1);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.v, b.v);
}

}  // namespace
