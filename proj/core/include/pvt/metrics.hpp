#pragma once

#include <span>
#include <string>

#include "pvt/image.hpp"
#include "pvt/polar.hpp"

namespace pvt {

/// Reported PSNR when the two images are identical.
inline constexpr double kPsnrCapDb = 99.0;

double mean_squared_error(const Image& img, const Image& ref);

/// 10 log10(peak^2 / MSE), or kPsnrCapDb when MSE is zero.
double psnr(const Image& img, const Image& ref, double peak);

/// Mean SSIM over the valid region of an 11x11 Gaussian window (sigma 1.5) with
/// C1 = (0.01 peak)^2 and C2 = (0.03 peak)^2, averaged over channels.
/// Throws DimensionError when either side is smaller than the window.
double ssim(const Image& img, const Image& ref, double peak);

/// Mean pi-periodic angular error in degrees, in [0, 90].
double mae_aop(const Image& phi_hat, const Image& phi_gt);

struct MetricsReport {
  double psnr_i = 0.0;
  double psnr_p = 0.0;
  double ssim_i = 0.0;
  double ssim_p = 0.0;
  double mae_deg = 0.0;
  bool psnr_i_capped = false;
  bool psnr_p_capped = false;
  bool dolp_clamped = true;
  std::string method_tag = "unspecified";
  std::string normalization = "gt-max";
  int frames = 1;
};

struct EvalOptions {
  bool clamp_dolp = true;
  std::string method_tag = "unspecified";
};

/// PSNR/SSIM on intensity (both sides divided by the ground-truth intensity maximum, peak 1)
/// and DoLP (peak 1), plus AoP MAE. Throws DomainError when the ground truth is black.
MetricsReport evaluate_reconstruction(const PolarFrame& pred, const PolarFrame& gt,
                                      const EvalOptions& options = {});

/// Mean over frames; capped flags are true only when every frame was capped.
MetricsReport aggregate_reports(std::span<const MetricsReport> reports);

}  // namespace pvt
