#include <cmath>
#include <iostream>

#include "commands.hpp"
#include "pvt/demosaic.hpp"
#include "pvt/dofp.hpp"
#include "pvt/error.hpp"
#include "pvt/io.hpp"
#include "pvt/resample.hpp"
#include "pvt/synth.hpp"

namespace pvt::cli {
namespace {

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Largest sample, so 16-bit exports use the full code range.
double png_scale_for(const MosaicFrame& y) {
  const double peak = y.data.max();
  return peak > 0.0 ? peak : 1.0;
}

void register_simulate(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto preset = std::make_shared<std::string>();
  auto scene_file = std::make_shared<std::string>();
  auto frames = std::make_shared<int>(0);
  auto* sub = app.add_subcommand("simulate", "Render a synthetic polarization sequence with exact flow");
  auto* p = sub->add_option("--preset", *preset, "Scene preset: turntable, translating-patches, static-noise");
  auto* f = sub->add_option("--scene", *scene_file, "Scene description JSON file");
  p->excludes(f);
  sub->add_option("--frames", *frames, "Override the number of frames (>= 2)");
  add_common_flags(sub, *state);
  add_layout_flags(sub, *state);
  override_option(sub, "--noise-sigma", state->overrides.noise_sigma, "Mosaic noise std, linear intensity units");
  override_option(sub, "--seed", state->overrides.seed, "Noise RNG seed (integer)");

  actions[sub] = [state, preset, scene_file, frames] {
    PipelineConfig cfg = state->config();
    SceneSpec spec;
    if (!scene_file->empty()) {
      spec = scene_from_json(read_text_file(*scene_file));
    } else if (!preset->empty()) {
      try {
        spec = preset_scene(*preset);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
    } else {
      throw UsageError("simulate needs --preset or --scene");
    }
    if (*frames != 0) spec.n_frames = *frames;
    if (state->overrides.noise_sigma) spec.noise_sigma = cfg.noise_sigma;
    if (state->overrides.seed) spec.seed = cfg.seed;
    cfg.noise_sigma = spec.noise_sigma;
    cfg.seed = spec.seed;
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const MosaicLayout layout = MosaicLayout::resolve(cfg.layout);

    const fs::path out = cfg.out_dir;
    for (const char* d : {"gt", "params", "mosaic", "mosaic_png", "flow"}) ensure_directory(out / d);
    parallel_for(spec.n_frames, cfg.threads, [&](int k) {
      const SceneFrameBundle b = render_frame(spec, k, layout);
      write_pvt(b.directions_gt, out / "gt" / frame_name(k));
      write_pvt(b.params_gt, out / "params" / frame_name(k));
      write_mosaic(b.mosaic, out / "mosaic" / frame_name(k));
      write_png16(b.mosaic, out / "mosaic_png" / frame_name(k, ".png"), png_scale_for(b.mosaic));
      if (k + 1 < spec.n_frames) write_flo(b.flow_to_next, out / "flow" / flow_name(true, k));
      if (k > 0) write_flo(exact_flow(spec, k, k - 1), out / "flow" / flow_name(false, k));
    });
    write_text_file(out / "scene.json", scene_to_json(spec) + "\n");
    echo_config(cfg, out);
    std::cout << "simulate: " << spec.n_frames << " frames of " << spec.width << "x" << spec.height << " -> "
              << out.string() << "\n";
  };
}

void register_mosaic(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto input = std::make_shared<std::string>();
  auto png = std::make_shared<bool>(false);
  auto* sub = app.add_subcommand("mosaic", "Apply the DoFP forward operator to four-direction frames");
  sub->add_option("-i,--in", *input, "Directions (or params) .pvt file or directory")->required();
  sub->add_flag("--png", *png, "Also write 16-bit PNG mosaics with JSON sidecars");
  add_common_flags(sub, *state);
  add_layout_flags(sub, *state);
  add_degradation_flags(sub, *state);

  actions[sub] = [state, input, png] {
    const PipelineConfig cfg = state->config();
    const MosaicLayout layout = MosaicLayout::resolve(cfg.layout);
    const auto frames = list_frames(*input);
    const fs::path out = cfg.out_dir;
    ensure_directory(out);
    parallel_for(static_cast<int>(frames.size()), cfg.threads, [&](int k) {
      DegradationConfig dc{cfg.m, cfg.noise_sigma, frame_seed(cfg.seed, k)};
      const TrainingPair pair = make_training_pair(read_directions_any(frames[k]), dc, layout);
      const auto name = frames[k].filename();
      write_mosaic(pair.mosaic_in, out / name);
      if (*png) {
        write_png16(pair.mosaic_in, (out / name).replace_extension(".png"), png_scale_for(pair.mosaic_in));
      }
    });
    echo_config(cfg, out);
    std::cout << "mosaic: " << frames.size() << " frames -> " << out.string() << "\n";
  };
}

/// Shared shape of init/demosaic: mosaic files in, directions files out.
void register_mosaic_to_directions(CLI::App& app, ActionTable& actions, const char* name, const char* help,
                                   bool with_upsample, PolarFrame (*op)(const MosaicFrame&)) {
  auto state = std::make_shared<CommandState>();
  auto input = std::make_shared<std::string>();
  auto upsample = std::make_shared<bool>(false);
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("-i,--in", *input, "Mosaic .pvt/.png file or directory")->required();
  if (with_upsample) {
    sub->add_flag("--upsample", *upsample, "Bicubically upsample the half-resolution result to mosaic resolution");
  }
  add_common_flags(sub, *state);

  actions[sub] = [state, input, upsample, op, name] {
    const PipelineConfig cfg = state->config();
    const auto frames = list_mosaic_frames(*input);
    const fs::path out = cfg.out_dir;
    ensure_directory(out);
    parallel_for(static_cast<int>(frames.size()), cfg.threads, [&](int k) {
      const Png16ReadResult in = read_mosaic(frames[k]);
      print_warnings(in.warnings);
      PolarFrame x = op(in.mosaic);
      if (*upsample) {
        x = bicubic_resize(x, static_cast<double>(in.mosaic.height()) / x.height());
      }
      write_pvt(x, (out / frames[k].filename()).replace_extension(".pvt"));
    });
    echo_config(cfg, out);
    std::cout << name << ": " << frames.size() << " frames -> " << out.string() << "\n";
  };
}

void register_degrade(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto input = std::make_shared<std::string>();
  auto upscale = std::make_shared<double>(1.0);
  auto png = std::make_shared<bool>(false);
  auto* sub = app.add_subcommand("degrade", "Degradation-difficulty residual X - A+(A(X)), optionally upscaled");
  sub->add_option("-i,--in", *input, "Directions (or params) .pvt file or directory")->required();
  sub->add_option("--upscale", *upscale, "Bicubic upscale of the residual (>= 1)")->check(CLI::Range(1.0, 64.0));
  sub->add_flag("--png", *png, "Also write a heatmap of the mean absolute residual");
  add_common_flags(sub, *state);
  add_layout_flags(sub, *state);

  actions[sub] = [state, input, upscale, png] {
    const PipelineConfig cfg = state->config();
    const MosaicLayout layout = MosaicLayout::resolve(cfg.layout);
    const auto frames = list_frames(*input);
    const fs::path out = cfg.out_dir;
    ensure_directory(out);
    parallel_for(static_cast<int>(frames.size()), cfg.threads, [&](int k) {
      const PolarFrame r = difficulty_residual(read_directions_any(frames[k]), layout, *upscale);
      write_pvt(r, out / frames[k].filename());
      if (*png) {
        Image mag(1, r[0].height(), r[0].width());
        for (const auto& d : r.dirs) {
          for (int c = 0; c < d.channels(); ++c) {
            for (int y = 0; y < d.height(); ++y) {
              for (int x = 0; x < d.width(); ++x) mag.at(0, y, x) += std::abs(d.at(c, y, x));
            }
          }
        }
        const double peak = mag.max();
        if (peak > 0.0) mag *= 1.0 / peak;
        write_png8(mag, (out / frames[k].filename()).replace_extension(".png"), 1.0);
      }
    });
    echo_config(cfg, out);
    std::cout << "degrade: " << frames.size() << " frames -> " << out.string() << "\n";
  };
}

void register_pair(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto input = std::make_shared<std::string>();
  auto* sub = app.add_subcommand("pair", "Build (mosaic_in, proxy GT) training pairs from raw mosaics");
  sub->add_option("-i,--in", *input, "Raw mosaic .pvt file or directory")->required();
  add_common_flags(sub, *state);
  add_layout_flags(sub, *state);
  add_degradation_flags(sub, *state);

  actions[sub] = [state, input] {
    const PipelineConfig cfg = state->config();
    const MosaicLayout layout = MosaicLayout::resolve(cfg.layout);
    const auto frames = list_mosaic_frames(*input);
    const fs::path out = cfg.out_dir;
    ensure_directory(out / "gt");
    ensure_directory(out / "mosaic");
    parallel_for(static_cast<int>(frames.size()), cfg.threads, [&](int k) {
      const Png16ReadResult raw = read_mosaic(frames[k]);
      print_warnings(raw.warnings);
      const PolarFrame proxy = reorganize_proxy_gt(raw.mosaic);
      DegradationConfig dc{cfg.m, cfg.noise_sigma, frame_seed(cfg.seed, k)};
      const TrainingPair pair = make_training_pair(proxy, dc, layout);
      write_pvt(pair.gt, out / "gt" / frames[k].filename());
      write_mosaic(pair.mosaic_in, out / "mosaic" / frames[k].filename());
    });
    echo_config(cfg, out);
    std::cout << "pair: " << frames.size() << " pairs -> " << out.string() << "\n";
  };
}

}  // namespace

void register_capture_commands(CLI::App& app, ActionTable& actions) {
  register_simulate(app, actions);
  register_mosaic(app, actions);
  register_mosaic_to_directions(app, actions, "init", "Half-resolution stride-2 bilinear initialization", true,
                                &initialize_lr);
  register_mosaic_to_directions(app, actions, "demosaic", "Full-resolution bicubic pseudo-inverse demosaicking",
                                false, &demosaic_full);
  register_degrade(app, actions);
  register_pair(app, actions);
}

}  // namespace pvt::cli
