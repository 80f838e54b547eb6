#include <iostream>

#include <json.hpp>

#include "commands.hpp"
#include "pvt/dynamics.hpp"
#include "pvt/error.hpp"
#include "pvt/io.hpp"

namespace pvt::cli {
namespace {

/// Flow aligning frame t-1 with frame t for the given warp mode: defined on t and pointing
/// into t-1 for backward warping, defined on t-1 and pointing into t for splatting.
FlowField alignment_flow(const PipelineConfig& cfg, WarpMode mode, int t, const Image& i_prev,
                         const Image& i_curr) {
  const bool forward = mode == WarpMode::kForwardSplat;
  if (cfg.flow.source == "file") return read_flow_for(cfg.flow.dir, forward, forward ? t - 1 : t);
  FlowField m = forward ? estimate_flow_hs(i_prev, i_curr, cfg.horn_schunck())
                        : estimate_flow_hs(i_curr, i_prev, cfg.horn_schunck());
  m.source_time = forward ? t - 1 : t;
  m.target_time = forward ? t : t - 1;
  return m;
}

PolarParams params_of(const PolarFrame& x) { return params_from_stokes(stokes_from_directions(x), true); }

void register_flow(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto input = std::make_shared<std::string>();
  auto* sub = app.add_subcommand("flow", "Coarse-to-fine Horn-Schunck flow between consecutive frames");
  sub->add_option("-i,--in", *input, "Directions (or params) .pvt directory")->required();
  add_common_flags(sub, *state);
  override_option(sub, "--hs-alpha", state->overrides.flow_alpha, "Smoothness weight (intensity units)");
  override_option(sub, "--hs-iterations", state->overrides.flow_iterations, "Iterations per pyramid level");
  override_option(sub, "--hs-levels", state->overrides.flow_levels, "Pyramid levels");

  actions[sub] = [state, input] {
    const PipelineConfig cfg = state->config();
    const auto frames = list_frames(*input);
    const int n = static_cast<int>(frames.size());
    if (n < 2) throw UsageError("flow needs at least two frames");
    const fs::path out = cfg.out_dir;
    ensure_directory(out);
    std::vector<Image> intensity(n);
    parallel_for(n, cfg.threads, [&](int k) { intensity[k] = intensity_of(read_directions_any(frames[k])); });
    // Task 2k writes fwd_k (k -> k+1), task 2k+1 writes bwd_{k+1} (k+1 -> k).
    parallel_for(2 * (n - 1), cfg.threads, [&](int task) {
      const int k = task / 2;
      const bool forward = task % 2 == 0;
      FlowField m = forward ? estimate_flow_hs(intensity[k], intensity[k + 1], cfg.horn_schunck())
                            : estimate_flow_hs(intensity[k + 1], intensity[k], cfg.horn_schunck());
      write_flo(m, out / flow_name(forward, forward ? k : k + 1));
    });
    echo_config(cfg, out);
    std::cout << "flow: " << 2 * (n - 1) << " fields -> " << out.string() << "\n";
  };
}

void register_warp(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto input = std::make_shared<std::string>();
  auto flow = std::make_shared<std::string>();
  auto target = std::make_shared<std::string>();
  auto* sub = app.add_subcommand("warp", "Warp a frame along a flow (backward sampling or softmax splatting)");
  sub->add_option("-i,--in", *input, "Any .pvt file")->required()->check(CLI::ExistingFile);
  sub->add_option("--flow", *flow, ".flo file, pixels")->required()->check(CLI::ExistingFile);
  sub->add_option("--target", *target, "Destination frame .pvt for brightness-residual importance");
  add_common_flags(sub, *state);
  add_warp_flags(sub, *state);

  actions[sub] = [state, input, flow, target] {
    const PipelineConfig cfg = state->config();
    const WarpMode mode = warp_mode_from_string(cfg.warp_mode);
    const SplatImportance importance = splat_importance_from_string(cfg.splat_importance);
    if (importance == SplatImportance::kBrightnessResidual && target->empty()) {
      throw UsageError("warp: brightness-residual importance needs --target");
    }
    const PvtTensor src = read_pvt(*input);
    const FlowField m = read_flo(*flow);
    std::vector<Image> dst_slices;
    if (!target->empty()) {
      dst_slices = read_pvt(*target).slices;
      if (dst_slices.size() != src.slices.size()) throw UsageError("warp: --target has a different slice count");
    }
    std::vector<Image> warped(src.slices.size());
    std::vector<Image> coverage(src.slices.size());
    parallel_for(static_cast<int>(src.slices.size()), cfg.threads, [&](int d) {
      if (mode == WarpMode::kBackward) {
        warped[d] = backward_warp(src.slices[d], m);
        return;
      }
      SplatResult r = importance == SplatImportance::kUniform
                          ? softmax_splat(src.slices[d], m)
                          : softmax_splat(src.slices[d], m,
                                          brightness_residual_importance(src.slices[d], dst_slices[d], m));
      warped[d] = std::move(r.image);
      coverage[d] = std::move(r.coverage);
    });
    const fs::path out = cfg.out_dir;
    ensure_directory(out);
    write_file_bytes(out / fs::path(*input).filename(), encode_pvt(warped, src.header.tag, src.header.dtype));
    if (mode == WarpMode::kForwardSplat) write_pvt(coverage[0], out / "coverage.pvt");
    echo_config(cfg, out);
    std::cout << "warp (" << to_string(mode) << "): -> " << out.string() << "\n";
  };
}

void register_masks(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto gt = std::make_shared<std::string>();
  auto png = std::make_shared<bool>(false);
  auto* sub = app.add_subcommand("masks", "Flow-guided variation masks chi_I, chi_p, chi_phi and their gated forms");
  sub->add_option("--gt", *gt, "Ground-truth directions (or params) .pvt directory")->required();
  sub->add_flag("--png", *png, "Also write grayscale PNGs of every mask");
  add_common_flags(sub, *state);
  add_flow_flags(sub, *state);
  add_warp_flags(sub, *state);
  override_option(sub, "--epsilon", state->overrides.epsilon, "Charbonnier epsilon (default 1e-5)");
  override_option(sub, "--tau", state->overrides.tau, "Mask decay rate (default 10)");

  actions[sub] = [state, gt, png] {
    const PipelineConfig cfg = state->config();
    const WarpMode mode = warp_mode_from_string(cfg.warp_mode);
    const auto frames = list_frames(*gt);
    const int n = static_cast<int>(frames.size());
    if (n < 2) throw UsageError("masks needs at least two frames");
    const fs::path out = cfg.out_dir;
    const char* names[] = {"chi_i", "chi_p", "chi_phi", "chi_dolp", "chi_aop"};
    for (const char* d : names) ensure_directory(out / d);
    parallel_for(n - 1, cfg.threads, [&](int task) {
      const int t = task + 1;
      const PolarParams prev = params_of(read_directions_any(frames[t - 1]));
      const PolarParams curr = params_of(read_directions_any(frames[t]));
      const FlowField m = alignment_flow(cfg, mode, t, prev.i, curr.i);
      const double eps = cfg.loss.epsilon;
      const Image chi_i = variation_mask(prev.i, curr.i, m, VariationKind::kIntensity, eps, mode);
      const Image chi_p = variation_mask(prev.p, curr.p, m, VariationKind::kDolp, eps, mode);
      const Image chi_phi = variation_mask(prev.phi, curr.phi, m, VariationKind::kAop, eps, mode);
      const VariationMasks v = gate_masks(chi_i, chi_p, chi_phi, cfg.loss.tau);
      const Image* maps[] = {&v.chi_i, &v.chi_p, &v.chi_phi, &v.chi_dolp, &v.chi_aop};
      for (int k = 0; k < 5; ++k) {
        const fs::path file = out / names[k] / frames[t].filename();
        write_pvt(*maps[k], file);
        if (*png) write_png8(*maps[k], fs::path(file).replace_extension(".png"), 1.0);
      }
    });
    echo_config(cfg, out);
    std::cout << "masks: " << n - 1 << " frames -> " << out.string() << "\n";
  };
}

nlohmann::ordered_json report_json(const LossReport& r) {
  return nlohmann::ordered_json::parse(loss_report_to_json(r));
}

void register_loss(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto pred = std::make_shared<std::string>();
  auto gt = std::make_shared<std::string>();
  auto pred_flow = std::make_shared<std::string>();
  auto* sub = app.add_subcommand("loss", "Complete training loss of predicted frames against ground truth");
  sub->add_option("--pred", *pred, "Predicted directions .pvt directory")->required();
  sub->add_option("--gt", *gt, "Ground-truth directions .pvt directory")->required();
  sub->add_option("--pred-flow-dir", *pred_flow,
                  "Predicted fwd/bwd .flo files scored against the alignment flow (flow term)");
  add_common_flags(sub, *state);
  add_flow_flags(sub, *state);
  add_warp_flags(sub, *state);
  add_loss_flags(sub, *state);

  actions[sub] = [state, pred, gt, pred_flow] {
    const PipelineConfig cfg = state->config();
    const WarpMode mode = warp_mode_from_string(cfg.warp_mode);
    const auto pred_frames = list_frames(*pred);
    const auto gt_frames = list_frames(*gt);
    if (pred_frames.size() != gt_frames.size()) throw UsageError("loss: frame counts of --pred and --gt differ");
    const int n = static_cast<int>(gt_frames.size());
    if (n < 2) throw UsageError("loss needs at least two frames");
    std::vector<LossReport> reports(n - 1);
    parallel_for(n - 1, cfg.threads, [&](int task) {
      const int t = task + 1;
      const PolarFrame gt_prev = read_directions_any(gt_frames[t - 1]);
      const PolarFrame gt_curr = read_directions_any(gt_frames[t]);
      const FlowField m = alignment_flow(cfg, mode, t, intensity_of(gt_prev), intensity_of(gt_curr));
      std::vector<FlowPair> pairs;
      if (!pred_flow->empty()) {
        const bool forward = mode == WarpMode::kForwardSplat;
        pairs.push_back({read_flow_for(*pred_flow, forward, forward ? t - 1 : t), m});
      }
      reports[task] =
          evaluate_polar_losses(read_directions_any(pred_frames[t]), gt_curr, gt_prev, m, pairs, cfg.loss, mode).report;
    });
    LossComponents mean;
    for (const auto& r : reports) {
      mean.l_int += r.l_int / reports.size();
      mean.l_flow += r.l_flow / reports.size();
      mean.l_var += r.l_var / reports.size();
      mean.l_sm += r.l_sm / reports.size();
    }
    nlohmann::ordered_json j;
    j["warp_mode"] = std::string(to_string(mode));
    j["mean"] = report_json(loss_total(mean, cfg.loss));
    j["per_frame"] = nlohmann::ordered_json::array();
    for (int k = 0; k < n - 1; ++k) {
      j["per_frame"].push_back({{"frame", gt_frames[k + 1].filename().string()}, {"loss", report_json(reports[k])}});
    }
    const fs::path out = cfg.out_dir;
    ensure_directory(out);
    write_text_file(out / "loss.json", j.dump(2) + "\n");
    echo_config(cfg, out);
    std::cout << "loss: l_total " << j["mean"]["l_total"].get<double>() << " over " << n - 1 << " frames -> "
              << out.string() << "\n";
  };
}

}  // namespace

void register_motion_commands(CLI::App& app, ActionTable& actions) {
  register_flow(app, actions);
  register_warp(app, actions);
  register_masks(app, actions);
  register_loss(app, actions);
}

}  // namespace pvt::cli
