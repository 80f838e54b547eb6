#include <algorithm>
#include <cmath>
#include <vector>

#include "pvt/denoise.hpp"
#include "pvt/error.hpp"
#include "pvt/flow.hpp"
#include "pvt/resample.hpp"

namespace pvt {
namespace {

// Horn-Schunck neighbourhood average: 1/6 for edge neighbours, 1/12 for diagonals.
Image hs_average(const Image& f) {
  Image out = Image::like(f);
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      const double edge = f.clamped(0, y - 1, x) + f.clamped(0, y + 1, x) + f.clamped(0, y, x - 1) +
                          f.clamped(0, y, x + 1);
      const double diag = f.clamped(0, y - 1, x - 1) + f.clamped(0, y - 1, x + 1) +
                          f.clamped(0, y + 1, x - 1) + f.clamped(0, y + 1, x + 1);
      out.at(0, y, x) = edge / 6.0 + diag / 12.0;
    }
  }
  return out;
}

Image central_dx(const Image& f) {
  Image out = Image::like(f);
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      out.at(0, y, x) = 0.5 * (f.clamped(0, y, x + 1) - f.clamped(0, y, x - 1));
    }
  }
  return out;
}

Image central_dy(const Image& f) {
  Image out = Image::like(f);
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      out.at(0, y, x) = 0.5 * (f.clamped(0, y + 1, x) - f.clamped(0, y - 1, x));
    }
  }
  return out;
}

void refine_level(const Image& i0, const Image& i1, FlowField& flow, double alpha, int iterations) {
  const Image warped = backward_warp(i1, flow);
  Image ix = central_dx(i0) + central_dx(warped);
  ix *= 0.5;
  Image iy = central_dy(i0) + central_dy(warped);
  iy *= 0.5;
  const Image it = warped - i0;

  const Image u0 = flow.u;
  const Image v0 = flow.v;
  const double alpha2 = alpha * alpha;
  Image du = Image::like(u0);
  Image dv = Image::like(v0);
  for (int iter = 0; iter < iterations; ++iter) {
    const Image u_bar = hs_average(u0 + du);
    const Image v_bar = hs_average(v0 + dv);
    for (std::size_t k = 0; k < du.size(); ++k) {
      const double du_bar = u_bar.values()[k] - u0.values()[k];
      const double dv_bar = v_bar.values()[k] - v0.values()[k];
      const double gx = ix.values()[k];
      const double gy = iy.values()[k];
      const double residual = (gx * du_bar + gy * dv_bar + it.values()[k]) / (alpha2 + gx * gx + gy * gy);
      du.values()[k] = du_bar - gx * residual;
      dv.values()[k] = dv_bar - gy * residual;
    }
  }
  flow.u = u0 + du;
  flow.v = v0 + dv;
}

}  // namespace

FlowField estimate_flow_hs(const Image& i0, const Image& i1, const HornSchunckConfig& cfg) {
  require_same_extent(i0, i1, "estimate_flow_hs");
  if (!(cfg.alpha > 0.0)) throw DomainError("estimate_flow_hs: alpha must be > 0");
  if (cfg.iterations < 0 || cfg.levels < 1) throw DomainError("estimate_flow_hs: bad iteration/level count");

  std::vector<Image> pyr0{i0.channels() == 1 ? i0 : i0.channel_mean()};
  std::vector<Image> pyr1{i1.channels() == 1 ? i1 : i1.channel_mean()};
  while (static_cast<int>(pyr0.size()) < cfg.levels && pyr0.back().height() >= 16 &&
         pyr0.back().width() >= 16) {
    pyr0.push_back(bicubic_resize(gaussian_blur(pyr0.back(), 1.0), 0.5));
    pyr1.push_back(bicubic_resize(gaussian_blur(pyr1.back(), 1.0), 0.5));
  }

  FlowField flow = FlowField::zeros(pyr0.back().height(), pyr0.back().width());
  for (int level = static_cast<int>(pyr0.size()) - 1; level >= 0; --level) {
    const Image& a = pyr0[level];
    const Image& b = pyr1[level];
    if (flow.height() != a.height() || flow.width() != a.width()) {
      const double sy = static_cast<double>(a.height()) / flow.height();
      const double sx = static_cast<double>(a.width()) / flow.width();
      flow.u = resize_to(flow.u, a.height(), a.width()) * sx;
      flow.v = resize_to(flow.v, a.height(), a.width()) * sy;
    }
    refine_level(a, b, flow, cfg.alpha, cfg.iterations);
  }
  flow.source_time = 0.0;
  flow.target_time = 1.0;
  return flow;
}

}  // namespace pvt
