#include "pvt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pvt/error.hpp"

namespace pvt {
namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

std::vector<double> ssim_kernel() {
  std::vector<double> k(kSsimWindow);
  const int r = kSsimWindow / 2;
  double total = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - r;
    k[i] = std::exp(-0.5 * d * d / (kSsimSigma * kSsimSigma));
    total += k[i];
  }
  for (double& v : k) v /= total;
  return k;
}

// Valid-region separable filtering of one plane: output is (h - 10) x (w - 10).
std::vector<double> filter_valid(std::span<const double> src, int h, int w, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += k[j] * src[static_cast<std::size_t>(y) * w + x + j];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += k[j] * tmp[static_cast<std::size_t>(y + j) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

double ssim_plane(std::span<const double> a, std::span<const double> b, int h, int w, double peak) {
  static const std::vector<double> kernel = ssim_kernel();
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, h, w, kernel);
  const auto mu_b = filter_valid(b, h, w, kernel);
  const auto e_aa = filter_valid(aa, h, w, kernel);
  const auto e_bb = filter_valid(bb, h, w, kernel);
  const auto e_ab = filter_valid(ab, h, w, kernel);
  double acc = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    acc += ((2 * mu_a[i] * mu_b[i] + c1) * (2 * cov + c2)) /
           ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2));
  }
  return acc / static_cast<double>(mu_a.size());
}

}  // namespace

double mean_squared_error(const Image& img, const Image& ref) {
  require_same_shape(img, ref, "mean_squared_error");
  if (img.empty()) throw DimensionError("mean_squared_error: empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double d = img.values()[i] - ref.values()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(img.size());
}

double psnr(const Image& img, const Image& ref, double peak) {
  if (!(peak > 0.0)) throw DomainError("psnr: peak must be > 0");
  const double mse = mean_squared_error(img, ref);
  if (mse == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / mse));
}

double ssim(const Image& img, const Image& ref, double peak) {
  require_same_shape(img, ref, "ssim");
  if (!(peak > 0.0)) throw DomainError("ssim: peak must be > 0");
  if (img.height() < kSsimWindow || img.width() < kSsimWindow) {
    throw DimensionError("ssim: image " + img.shape_string() + " is smaller than the 11x11 window");
  }
  double acc = 0.0;
  for (int c = 0; c < img.channels(); ++c) {
    acc += ssim_plane(img.plane(c), ref.plane(c), img.height(), img.width(), peak);
  }
  return acc / img.channels();
}

double mae_aop(const Image& phi_hat, const Image& phi_gt) {
  require_same_shape(phi_hat, phi_gt, "mae_aop");
  if (phi_hat.empty()) throw DimensionError("mae_aop: empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < phi_hat.size(); ++i) {
    acc += aop_distance(phi_hat.values()[i], phi_gt.values()[i]);
  }
  return acc / static_cast<double>(phi_hat.size()) * 180.0 / std::numbers::pi;
}

MetricsReport evaluate_reconstruction(const PolarFrame& pred, const PolarFrame& gt,
                                      const EvalOptions& options) {
  if (!pred.same_shape(gt)) {
    throw DimensionError("evaluate_reconstruction: pred " + pred[0].shape_string() + " vs gt " +
                         gt[0].shape_string());
  }
  const PolarParams p_hat = params_from_stokes(stokes_from_directions(pred), options.clamp_dolp);
  const PolarParams p_gt = params_from_stokes(stokes_from_directions(gt), options.clamp_dolp);
  const double norm = p_gt.i.max();
  if (!(norm > 0.0)) throw DomainError("evaluate_reconstruction: ground-truth intensity is all zero");

  const Image i_hat = p_hat.i * (1.0 / norm);
  const Image i_gt = p_gt.i * (1.0 / norm);
  MetricsReport r;
  r.psnr_i_capped = mean_squared_error(i_hat, i_gt) == 0.0;
  r.psnr_i = psnr(i_hat, i_gt, 1.0);
  r.ssim_i = ssim(i_hat, i_gt, 1.0);
  r.psnr_p_capped = mean_squared_error(p_hat.p, p_gt.p) == 0.0;
  r.psnr_p = psnr(p_hat.p, p_gt.p, 1.0);
  r.ssim_p = ssim(p_hat.p, p_gt.p, 1.0);
  r.mae_deg = mae_aop(p_hat.phi, p_gt.phi);
  r.dolp_clamped = options.clamp_dolp;
  r.method_tag = options.method_tag;
  r.normalization = "gt-max";
  return r;
}

MetricsReport aggregate_reports(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw DomainError("aggregate_reports: no reports");
  MetricsReport out = reports.front();
  out.psnr_i = out.psnr_p = out.ssim_i = out.ssim_p = out.mae_deg = 0.0;
  out.frames = 0;
  for (const auto& r : reports) {
    out.psnr_i += r.psnr_i;
    out.psnr_p += r.psnr_p;
    out.ssim_i += r.ssim_i;
    out.ssim_p += r.ssim_p;
    out.mae_deg += r.mae_deg;
    out.psnr_i_capped = out.psnr_i_capped && r.psnr_i_capped;
    out.psnr_p_capped = out.psnr_p_capped && r.psnr_p_capped;
    out.frames += r.frames;
  }
  const double n = static_cast<double>(reports.size());
  out.psnr_i /= n;
  out.psnr_p /= n;
  out.ssim_i /= n;
  out.ssim_p /= n;
  out.mae_deg /= n;
  return out;
}

}  // namespace pvt
