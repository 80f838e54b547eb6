#pragma once

#include <functional>
#include <map>
#include <memory>

#include <CLI11.hpp>

#include "config.hpp"
#include "sequence.hpp"

namespace pvt::cli {

/// Work to run for each registered subcommand once parsing succeeded.
using ActionTable = std::map<const CLI::App*, std::function<void()>>;

/// Holds one subcommand's explicit flags; the action resolves them into a PipelineConfig.
struct CommandState {
  ConfigOverrides overrides;
  PipelineConfig config() const { return resolve_config(overrides); }
};

template <typename T>
void override_option(CLI::App* sub, const std::string& name, std::optional<T>& slot, const std::string& help) {
  sub->add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

inline void add_common_flags(CLI::App* sub, CommandState& s, bool out_required = true) {
  override_option(sub, "--config", s.overrides.config_path, "JSON config file; explicit flags take precedence");
  auto* out = sub->add_option_function<std::string>(
      "-o,--out", [&s](const std::string& v) { s.overrides.out_dir = v; }, "Output directory");
  if (out_required) out->required();
  override_option(sub, "--threads", s.overrides.threads, "Worker count (frames in parallel); default $PVT_NUM_THREADS or 1");
}

inline void add_layout_flags(CLI::App* sub, CommandState& s) {
  override_option(sub, "--layout", s.overrides.layout, "Mosaic layout preset name or table file (default imx250myr)");
}

inline void add_degradation_flags(CLI::App* sub, CommandState& s) {
  override_option(sub, "--m", s.overrides.m, "Bicubic downscale factor before mosaicking: 1, 2 or 4");
  override_option(sub, "--noise-sigma", s.overrides.noise_sigma, "Additive Gaussian noise std, linear intensity units");
  override_option(sub, "--seed", s.overrides.seed, "RNG seed (integer)");
}

inline void add_denoise_flags(CLI::App* sub, CommandState& s) {
  override_option(sub, "--method", s.overrides.denoise_method, "Denoiser for S1/S2: none, gaussian or guided");
  override_option(sub, "--sigma", s.overrides.denoise_sigma, "Gaussian std, pixels");
  override_option(sub, "--radius", s.overrides.denoise_radius, "Guided filter window half-width, pixels");
  override_option(sub, "--eps", s.overrides.denoise_eps, "Guided filter regularizer, squared normalized intensity");
  sub->add_flag_callback("--per-channel-guide", [&s] { s.overrides.per_channel_guide = true; },
                         "Guide each color channel with its own intensity instead of the luma");
}

inline void add_flow_flags(CLI::App* sub, CommandState& s) {
  override_option(sub, "--flow-source", s.overrides.flow_source, "Alignment flow: file or horn-schunck");
  override_option(sub, "--flow-dir", s.overrides.flow_dir, "Directory of fwd_NNNN.flo / bwd_NNNN.flo files, pixels/frame");
  override_option(sub, "--hs-alpha", s.overrides.flow_alpha, "Horn-Schunck smoothness weight (intensity units)");
  override_option(sub, "--hs-iterations", s.overrides.flow_iterations, "Horn-Schunck iterations per pyramid level");
  override_option(sub, "--hs-levels", s.overrides.flow_levels, "Horn-Schunck pyramid levels");
}

inline void add_loss_flags(CLI::App* sub, CommandState& s) {
  override_option(sub, "--epsilon", s.overrides.epsilon, "Charbonnier epsilon (default 1e-5)");
  override_option(sub, "--tau", s.overrides.tau, "Mask decay rate (default 10)");
  override_option(sub, "--lambda1", s.overrides.lambda1, "Flow loss weight (default 0.1)");
  override_option(sub, "--lambda2", s.overrides.lambda2, "Polarization loss weight (default 0.2)");
}

inline void add_warp_flags(CLI::App* sub, CommandState& s) {
  override_option(sub, "--warp-mode", s.overrides.warp_mode, "backward or forward-splat");
  override_option(sub, "--importance", s.overrides.splat_importance,
                  "Splat importance: uniform or brightness-residual");
}

void register_capture_commands(CLI::App& app, ActionTable& actions);
void register_polar_commands(CLI::App& app, ActionTable& actions);
void register_motion_commands(CLI::App& app, ActionTable& actions);

/// Entry point used by main(); returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pvt::cli
