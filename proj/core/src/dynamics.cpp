#include "pvt/dynamics.hpp"

#include <cmath>
#include <string>

#include "pvt/error.hpp"

namespace pvt {
namespace {

void require_mask(const Image& mask, const Image& field, const char* what) {
  if (mask.channels() != 1 || !mask.same_extent(field)) {
    throw DimensionError(std::string(what) + ": mask " + mask.shape_string() +
                         " does not broadcast over " + field.shape_string());
  }
}

Image bring_forward(const Image& prev, const Image& curr, const FlowField& m, WarpMode mode) {
  if (mode == WarpMode::kBackward) return backward_warp(prev, m);
  SplatResult splat = softmax_splat(prev, m);
  const std::size_t plane = splat.coverage.plane_size();
  for (std::size_t i = 0; i < plane; ++i) {
    if (splat.coverage.values()[i] > 0.0) continue;
    for (int c = 0; c < prev.channels(); ++c) {
      splat.image.values()[c * plane + i] = curr.values()[c * plane + i];
    }
  }
  return splat.image;
}

}  // namespace

void LossConstants::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("loss constants: epsilon must be > 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("loss constants: tau must be >= 0");
  if (!(lambda1 >= 0.0) || !std::isfinite(lambda1)) throw DomainError("loss constants: lambda1 must be >= 0");
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) throw DomainError("loss constants: lambda2 must be >= 0");
}

std::string_view to_string(WarpMode mode) {
  return mode == WarpMode::kBackward ? "backward" : "forward-splat";
}

WarpMode warp_mode_from_string(std::string_view name) {
  if (name == "backward") return WarpMode::kBackward;
  if (name == "forward-splat" || name == "splat" || name == "forward") return WarpMode::kForwardSplat;
  throw DomainError("unknown warp mode '" + std::string(name) + "'");
}

Image charbonnier_map(const Image& a, const Image& b, double eps) {
  require_same_shape(a, b, "charbonnier");
  Image out = Image::like(a);
  const double eps2 = eps * eps;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double d = a.values()[k] - b.values()[k];
    out.values()[k] = std::sqrt(d * d + eps2);
  }
  return out;
}

double charbonnier(const Image& a, const Image& b, double eps) {
  return charbonnier_map(a, b, eps).mean();
}

Image aop_cosine_distance_map(const Image& phi_a, const Image& phi_b) {
  require_same_shape(phi_a, phi_b, "aop_cosine_distance_map");
  Image out = Image::like(phi_a);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.values()[k] = 0.5 * (1.0 - std::cos(2.0 * (phi_a.values()[k] - phi_b.values()[k])));
  }
  return out;
}

Image variation_distance(const Image& a, const Image& b, VariationKind kind, double eps) {
  const Image per_channel =
      kind == VariationKind::kAop ? aop_cosine_distance_map(a, b) : charbonnier_map(a, b, eps);
  return per_channel.channels() == 1 ? per_channel : per_channel.channel_mean();
}

Image min_max_normalize(const Image& img) {
  Image out = Image::like(img);
  const double lo = img.min();
  const double hi = img.max();
  if (!(hi - lo > kFlatRangeTolerance)) return out;
  const double range = hi - lo;
  for (std::size_t k = 0; k < out.size(); ++k) out.values()[k] = (img.values()[k] - lo) / range;
  return out;
}

Image warp_previous(const Image& v_prev, const Image& v_curr, const FlowField& m,
                    VariationKind kind, WarpMode mode) {
  require_same_shape(v_prev, v_curr, "warp_previous");
  if (kind != VariationKind::kAop) return bring_forward(v_prev, v_curr, m, mode);

  const int c = v_prev.channels();
  Image prev_vec(2 * c, v_prev.height(), v_prev.width());
  Image curr_vec(2 * c, v_prev.height(), v_prev.width());
  for (int ch = 0; ch < c; ++ch) {
    for (std::size_t k = 0; k < v_prev.plane_size(); ++k) {
      prev_vec.plane(2 * ch)[k] = std::cos(2.0 * v_prev.plane(ch)[k]);
      prev_vec.plane(2 * ch + 1)[k] = std::sin(2.0 * v_prev.plane(ch)[k]);
      curr_vec.plane(2 * ch)[k] = std::cos(2.0 * v_curr.plane(ch)[k]);
      curr_vec.plane(2 * ch + 1)[k] = std::sin(2.0 * v_curr.plane(ch)[k]);
    }
  }
  const Image warped = bring_forward(prev_vec, curr_vec, m, mode);
  Image out = Image::like(v_prev);
  for (int ch = 0; ch < c; ++ch) {
    for (std::size_t k = 0; k < out.plane_size(); ++k) {
      const double cs = warped.plane(2 * ch)[k];
      const double sn = warped.plane(2 * ch + 1)[k];
      out.plane(ch)[k] = (cs == 0.0 && sn == 0.0) ? 0.0 : wrap_aop(0.5 * std::atan2(sn, cs));
    }
  }
  return out;
}

Image variation_mask(const Image& v_prev, const Image& v_curr, const FlowField& m,
                     VariationKind kind, double eps, WarpMode mode) {
  const Image warped = warp_previous(v_prev, v_curr, m, kind, mode);
  return min_max_normalize(variation_distance(v_curr, warped, kind, eps));
}

VariationMasks gate_masks(const Image& chi_i, const Image& chi_p, const Image& chi_phi, double tau) {
  require_same_shape(chi_i, chi_p, "gate_masks");
  require_same_shape(chi_i, chi_phi, "gate_masks");
  VariationMasks out{chi_i, chi_p, chi_phi, Image::like(chi_i), Image::like(chi_i), tau};
  for (std::size_t k = 0; k < chi_i.size(); ++k) {
    const double gate = std::exp(-tau * chi_i.values()[k]);
    out.chi_dolp.values()[k] = gate * chi_p.values()[k];
    out.chi_aop.values()[k] = gate * chi_phi.values()[k];
  }
  return out;
}

double loss_var(const Image& p_hat, const Image& p_gt, const Image& phi_hat, const Image& phi_gt,
                const VariationMasks& masks, double eps) {
  const Image dp = charbonnier_map(p_hat, p_gt, eps);
  const Image dphi = aop_cosine_distance_map(phi_hat, phi_gt);
  require_same_shape(dp, dphi, "loss_var");
  require_mask(masks.chi_dolp, dp, "loss_var");
  require_mask(masks.chi_aop, dp, "loss_var");
  const std::size_t plane = dp.plane_size();
  double acc = 0.0;
  for (int c = 0; c < dp.channels(); ++c) {
    for (std::size_t k = 0; k < plane; ++k) {
      acc += masks.chi_dolp.values()[k] * dp.plane(c)[k] + masks.chi_aop.values()[k] * dphi.plane(c)[k];
    }
  }
  return acc / static_cast<double>(dp.size());
}

double loss_smooth(const Image& p_hat, const Image& phi_hat, const Image& p_warp,
                   const Image& phi_warp, const Image& chi_p, const Image& chi_phi, double tau,
                   double eps) {
  const Image dp = charbonnier_map(p_hat, p_warp, eps);
  const Image dphi = aop_cosine_distance_map(phi_hat, phi_warp);
  require_same_shape(dp, dphi, "loss_smooth");
  require_mask(chi_p, dp, "loss_smooth");
  require_mask(chi_phi, dp, "loss_smooth");
  const std::size_t plane = dp.plane_size();
  double acc = 0.0;
  for (int c = 0; c < dp.channels(); ++c) {
    for (std::size_t k = 0; k < plane; ++k) {
      acc += std::exp(-tau * chi_p.values()[k]) * dp.plane(c)[k] +
             std::exp(-tau * chi_phi.values()[k]) * dphi.plane(c)[k];
    }
  }
  return acc / static_cast<double>(dp.size());
}

LossReport loss_total(const LossComponents& c, const LossConstants& k) {
  k.validate();
  for (double v : {c.l_int, c.l_flow, c.l_var, c.l_sm}) {
    if (!std::isfinite(v)) throw DomainError("loss_total: non-finite loss component");
  }
  LossReport r;
  r.l_int = c.l_int;
  r.l_flow = c.l_flow;
  r.l_var = c.l_var;
  r.l_sm = c.l_sm;
  r.l_pix = c.l_int + k.lambda1 * c.l_flow;
  r.l_polar = c.l_var + c.l_sm;
  r.l_total = r.l_pix + k.lambda2 * r.l_polar;
  r.lambda1 = k.lambda1;
  r.lambda2 = k.lambda2;
  r.epsilon = k.epsilon;
  r.tau = k.tau;
  return r;
}

PolarLossResult evaluate_polar_losses(const PolarFrame& pred, const PolarFrame& gt,
                                      const PolarFrame& gt_prev, const FlowField& alignment_flow,
                                      std::span<const FlowPair> flows, const LossConstants& k,
                                      WarpMode mode) {
  k.validate();
  if (!pred.same_shape(gt) || !gt.same_shape(gt_prev)) {
    throw DimensionError("evaluate_polar_losses: pred " + pred[0].shape_string() + ", gt " +
                         gt[0].shape_string() + ", gt_prev " + gt_prev[0].shape_string());
  }
  const PolarParams hat = params_from_stokes(stokes_from_directions(pred), true);
  const PolarParams cur = params_from_stokes(stokes_from_directions(gt), true);
  const PolarParams prev = params_from_stokes(stokes_from_directions(gt_prev), true);

  const Image chi_i = variation_mask(prev.i, cur.i, alignment_flow, VariationKind::kIntensity, k.epsilon, mode);
  const Image p_warp = warp_previous(prev.p, cur.p, alignment_flow, VariationKind::kDolp, mode);
  const Image phi_warp = warp_previous(prev.phi, cur.phi, alignment_flow, VariationKind::kAop, mode);
  const Image chi_p = min_max_normalize(variation_distance(cur.p, p_warp, VariationKind::kDolp, k.epsilon));
  const Image chi_phi = min_max_normalize(variation_distance(cur.phi, phi_warp, VariationKind::kAop, k.epsilon));

  PolarLossResult result;
  result.warp_mode = mode;
  result.masks = gate_masks(chi_i, chi_p, chi_phi, k.tau);

  LossComponents c;
  double int_acc = 0.0;
  std::size_t int_count = 0;
  for (int d = 0; d < kNumDirections; ++d) {
    int_acc += charbonnier_map(pred[d], gt[d], k.epsilon).sum();
    int_count += pred[d].size();
  }
  c.l_int = int_acc / static_cast<double>(int_count);
  for (const auto& pair : flows) {
    const double su = charbonnier_map(pair.predicted.u, pair.reference.u, k.epsilon).sum();
    const double sv = charbonnier_map(pair.predicted.v, pair.reference.v, k.epsilon).sum();
    c.l_flow += (su + sv) / static_cast<double>(2 * pair.predicted.u.size());
  }
  c.l_var = loss_var(hat.p, cur.p, hat.phi, cur.phi, result.masks, k.epsilon);
  c.l_sm = loss_smooth(hat.p, hat.phi, p_warp, phi_warp, chi_p, chi_phi, k.tau, k.epsilon);
  result.report = loss_total(c, k);
  return result;
}

}  // namespace pvt
