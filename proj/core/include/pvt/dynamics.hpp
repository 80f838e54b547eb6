#pragma once

#include <span>
#include <string_view>

#include "pvt/flow.hpp"
#include "pvt/image.hpp"
#include "pvt/polar.hpp"

namespace pvt {

/// Charbonnier epsilon, mask decay rate and loss balance weights.
struct LossConstants {
  double epsilon = 1e-5;
  double tau = 10.0;
  double lambda1 = 0.1;
  double lambda2 = 0.2;

  void validate() const;
};

enum class VariationKind { kIntensity, kDolp, kAop };

/// How the previous frame is brought to the current time before comparison.
/// kBackward samples V_{t-1} along a flow defined on frame t pointing into t-1.
/// kForwardSplat splats V_{t-1} along a flow defined on t-1 pointing into t; holes compare
/// against the current frame and so contribute zero distance.
enum class WarpMode { kBackward, kForwardSplat };

std::string_view to_string(WarpMode mode);
WarpMode warp_mode_from_string(std::string_view name);

/// Mean over elements of sqrt((a - b)^2 + eps^2).
double charbonnier(const Image& a, const Image& b, double eps);
Image charbonnier_map(const Image& a, const Image& b, double eps);

/// Per-pixel (1 - cos 2(a - b)) / 2, in [0, 1] and pi-periodic.
Image aop_cosine_distance_map(const Image& phi_a, const Image& phi_b);

/// Per-pixel distance for the given kind, averaged over channels into one plane.
Image variation_distance(const Image& a, const Image& b, VariationKind kind, double eps);

/// Spread below which a distance map counts as constant (rounding residue only).
inline constexpr double kFlatRangeTolerance = 1e-12;

/// Min-max normalization into [0, 1]; a constant map normalizes to all zeros.
Image min_max_normalize(const Image& img);

/// Brings V_{t-1} to time t. AoP fields are warped on the doubled-angle circle so that
/// values near 0 and near pi do not average to pi/2.
Image warp_previous(const Image& v_prev, const Image& v_curr, const FlowField& m,
                    VariationKind kind, WarpMode mode = WarpMode::kBackward);

/// Flow-guided variation mask: warp, distance, normalize. Output is 1 x H x W in [0, 1].
Image variation_mask(const Image& v_prev, const Image& v_curr, const FlowField& m,
                     VariationKind kind, double eps = 1e-5, WarpMode mode = WarpMode::kBackward);

struct VariationMasks {
  Image chi_i;
  Image chi_p;
  Image chi_phi;
  Image chi_dolp;
  Image chi_aop;
  double tau = 10.0;
};

/// chi_dolp = exp(-tau chi_i) chi_p and chi_aop = exp(-tau chi_i) chi_phi.
VariationMasks gate_masks(const Image& chi_i, const Image& chi_p, const Image& chi_phi, double tau);

/// mean(chi_dolp * charbonnier_map(p_hat, p) + chi_aop * cosine_map(phi_hat, phi)). Masks are
/// single-channel and broadcast over the channels of the parameter planes.
double loss_var(const Image& p_hat, const Image& p_gt, const Image& phi_hat, const Image& phi_gt,
                const VariationMasks& masks, double eps);

/// mean(exp(-tau chi_p) * charbonnier_map(p_hat, p_warp) +
///      exp(-tau chi_phi) * cosine_map(phi_hat, phi_warp)).
double loss_smooth(const Image& p_hat, const Image& phi_hat, const Image& p_warp,
                   const Image& phi_warp, const Image& chi_p, const Image& chi_phi, double tau,
                   double eps);

struct LossComponents {
  double l_int = 0.0;
  double l_flow = 0.0;
  double l_var = 0.0;
  double l_sm = 0.0;
};

struct LossReport {
  double l_int = 0.0;
  double l_flow = 0.0;
  double l_var = 0.0;
  double l_sm = 0.0;
  double l_pix = 0.0;
  double l_polar = 0.0;
  double l_total = 0.0;
  double lambda1 = 0.1;
  double lambda2 = 0.2;
  double epsilon = 1e-5;
  double tau = 10.0;
};

/// l_pix = l_int + lambda1 l_flow, l_polar = l_var + l_sm, l_total = l_pix + lambda2 l_polar.
/// Throws DomainError on non-finite components.
LossReport loss_total(const LossComponents& c, const LossConstants& k = {});

struct FlowPair {
  FlowField predicted;
  FlowField reference;
};

struct PolarLossResult {
  VariationMasks masks;
  LossReport report;
  WarpMode warp_mode = WarpMode::kBackward;
};

/// Evaluates the complete loss for a predicted frame. Masks come from the ground-truth pair
/// (gt_prev, gt) aligned with `alignment_flow`; l_int is the joint mean over all direction
/// and color planes; l_flow sums the Charbonnier penalty over every flow pair.
PolarLossResult evaluate_polar_losses(const PolarFrame& pred, const PolarFrame& gt,
                                      const PolarFrame& gt_prev, const FlowField& alignment_flow,
                                      std::span<const FlowPair> flows,
                                      const LossConstants& k = {},
                                      WarpMode mode = WarpMode::kBackward);

}  // namespace pvt
