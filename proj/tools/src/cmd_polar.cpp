#include <iostream>

#include <json.hpp>

#include "commands.hpp"
#include "pvt/denoise.hpp"
#include "pvt/error.hpp"
#include "pvt/io.hpp"
#include "pvt/metrics.hpp"

namespace pvt::cli {
namespace {

void register_denoise(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto input = std::make_shared<std::string>();
  auto* sub = app.add_subcommand("denoise", "Denoise S1/S2 with a Gaussian or an intensity-guided filter");
  sub->add_option("-i,--in", *input, "Directions (or params) .pvt file or directory")->required();
  add_common_flags(sub, *state);
  add_denoise_flags(sub, *state);

  actions[sub] = [state, input] {
    const PipelineConfig cfg = state->config();
    const auto frames = list_frames(*input);
    const fs::path out = cfg.out_dir;
    ensure_directory(out / "stokes");
    parallel_for(static_cast<int>(frames.size()), cfg.threads, [&](int k) {
      const PolarFrame x = read_directions_any(frames[k]);
      StokesFrame s = stokes_from_directions(x);
      if (cfg.denoise.method == "gaussian") {
        s = gaussian_denoise_stokes(s, cfg.denoise.sigma);
      } else if (cfg.denoise.method == "guided") {
        GuidedFilterConfig gf{cfg.denoise.radius, cfg.denoise.eps, cfg.denoise.per_channel_guide};
        s = guided_denoise_stokes(s, s.s0 * 0.5, gf);
      }
      write_pvt(s, out / "stokes" / frames[k].filename());
      write_pvt(render_directions(params_from_stokes(clamp_physical(s), true)), out / frames[k].filename());
    });
    echo_config(cfg, out);
    std::cout << "denoise (" << cfg.denoise.method << "): " << frames.size() << " frames -> " << out.string()
              << "\n";
  };
}

void register_eval(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto pred = std::make_shared<std::string>();
  auto gt = std::make_shared<std::string>();
  auto tag = std::make_shared<std::string>("unspecified");
  auto* sub = app.add_subcommand("eval", "PSNR/SSIM on intensity and DoLP plus AoP MAE against ground truth");
  sub->add_option("--pred", *pred, "Predicted directions .pvt file or directory")->required();
  sub->add_option("--gt", *gt, "Ground-truth directions .pvt file or directory")->required();
  sub->add_option("--method-tag", *tag, "Label stored in the report");
  sub->add_flag_callback("--no-clamp-dolp", [state] { state->overrides.clamp_dolp = false; },
                         "Keep unclamped DoLP (may exceed 1) in PSNR_p/SSIM_p");
  add_common_flags(sub, *state, false);

  actions[sub] = [state, pred, gt, tag] {
    const PipelineConfig cfg = state->config();
    const auto pred_frames = list_frames(*pred);
    const auto gt_frames = list_frames(*gt);
    if (pred_frames.size() != gt_frames.size()) {
      throw UsageError("eval: " + std::to_string(pred_frames.size()) + " predicted frames vs " +
                       std::to_string(gt_frames.size()) + " ground-truth frames");
    }
    const int n = static_cast<int>(pred_frames.size());
    std::vector<MetricsReport> reports(n);
    const EvalOptions options{cfg.clamp_dolp, *tag};
    parallel_for(n, cfg.threads, [&](int k) {
      reports[k] = evaluate_reconstruction(read_directions_any(pred_frames[k]), read_directions_any(gt_frames[k]),
                                           options);
    });
    const MetricsReport total = aggregate_reports(reports);

    nlohmann::ordered_json j = nlohmann::ordered_json::parse(metrics_to_json(total));
    j["per_frame"] = nlohmann::ordered_json::array();
    for (int k = 0; k < n; ++k) {
      auto fj = nlohmann::ordered_json::parse(metrics_to_json(reports[k]));
      fj.erase("method");
      fj.erase("frames");
      fj.erase("dolp_clamped");
      fj.erase("intensity_normalization");
      j["per_frame"].push_back({{"pred", pred_frames[k].filename().string()},
                                {"gt", gt_frames[k].filename().string()},
                                {"metrics", fj}});
    }
    const std::string text = j.dump(2) + "\n";
    if (!cfg.out_dir.empty()) {
      const fs::path out = cfg.out_dir;
      ensure_directory(out);
      write_text_file(out / "metrics.json", text);
      echo_config(cfg, out);
    }
    std::cout << metrics_table(total);
    if (cfg.out_dir.empty()) std::cout << text;
  };
}

void register_viz(CLI::App& app, ActionTable& actions) {
  auto state = std::make_shared<CommandState>();
  auto input = std::make_shared<std::string>();
  auto flow = std::make_shared<std::string>();
  auto limit = std::make_shared<double>(0.0);
  auto* sub = app.add_subcommand("viz", "Joint HSV polarization image and divergence/curl heatmaps");
  sub->add_option("-i,--in", *input, "Directions or params .pvt file or directory");
  sub->add_option("--flow", *flow, ".flo file or directory for divergence/curl heatmaps");
  sub->add_option("--limit", *limit, "Heatmap saturation magnitude, 1/frame (0 = per-image maximum)");
  add_common_flags(sub, *state);

  actions[sub] = [state, input, flow, limit] {
    const PipelineConfig cfg = state->config();
    if (input->empty() && flow->empty()) throw UsageError("viz needs --in and/or --flow");
    const fs::path out = cfg.out_dir;
    ensure_directory(out);
    int count = 0;
    if (!input->empty()) {
      const auto frames = list_frames(*input);
      parallel_for(static_cast<int>(frames.size()), cfg.threads, [&](int k) {
        const PolarFrame x = read_directions_any(frames[k]);
        const PolarParams p = params_from_stokes(stokes_from_directions(x), true);
        write_png8(hsv_visualize(p), (out / frames[k].filename()).replace_extension(".hsv.png"), 1.0);
      });
      count += static_cast<int>(frames.size());
    }
    if (!flow->empty()) {
      const auto fields = list_frames(*flow, ".flo");
      parallel_for(static_cast<int>(fields.size()), cfg.threads, [&](int k) {
        const FlowField m = read_flo(fields[k]);
        const fs::path stem = out / fields[k].stem();
        write_png8(diverging_colormap(divergence(m), *limit), stem.string() + ".div.png", 1.0);
        write_png8(diverging_colormap(curl(m), *limit), stem.string() + ".curl.png", 1.0);
      });
      count += static_cast<int>(fields.size());
    }
    echo_config(cfg, out);
    std::cout << "viz: " << count << " images -> " << out.string() << "\n";
  };
}

}  // namespace

void register_polar_commands(CLI::App& app, ActionTable& actions) {
  register_denoise(app, actions);
  register_eval(app, actions);
  register_viz(app, actions);
}

}  // namespace pvt::cli
