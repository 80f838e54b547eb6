#include "config.hpp"

#include <cstdlib>
#include <set>

#include <json.hpp>

#include "pvt/error.hpp"
#include "pvt/io.hpp"
#include "pvt/layout.hpp"

namespace pvt::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw UsageError("config: unknown key '" + where + key + "'");
  }
}

template <typename T>
void take(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("config: key '" + where + key + "' has the wrong type");
  }
}

const json& section(const json& root, const char* key) {
  const json& s = root.at(key);
  if (!s.is_object()) throw UsageError(std::string("config: '") + key + "' must be an object");
  return s;
}

template <typename T>
void over(const std::optional<T>& flag, T& dst) {
  if (flag) dst = *flag;
}

}  // namespace

void PipelineConfig::validate() const {
  try {
    (void)MosaicLayout::resolve(layout);
  } catch (const std::exception& e) {
    throw UsageError(std::string("layout: ") + e.what());
  }
  if (m != 1 && m != 2 && m != 4) throw UsageError("m must be 1, 2 or 4");
  if (!(noise_sigma >= 0.0)) throw UsageError("noise_sigma must be >= 0");
  if (denoise.method != "none" && denoise.method != "gaussian" && denoise.method != "guided") {
    throw UsageError("denoise.method must be none, gaussian or guided");
  }
  if (!(denoise.sigma > 0.0)) throw UsageError("denoise.sigma must be > 0");
  if (denoise.radius < 1) throw UsageError("denoise.radius must be >= 1");
  if (!(denoise.eps > 0.0)) throw UsageError("denoise.eps must be > 0");
  if (flow.source != "file" && flow.source != "horn-schunck") {
    throw UsageError("flow.source must be file or horn-schunck");
  }
  if (flow.source == "file" && flow.dir.empty()) throw UsageError("flow.source=file needs flow.dir");
  if (!(flow.alpha > 0.0)) throw UsageError("flow.alpha must be > 0");
  if (flow.iterations < 1) throw UsageError("flow.iterations must be >= 1");
  if (flow.levels < 1) throw UsageError("flow.levels must be >= 1");
  try {
    (void)splat_importance_from_string(splat_importance);
    (void)warp_mode_from_string(warp_mode);
    loss.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (threads < 1) throw UsageError("threads must be >= 1");
}

int default_threads() {
  const char* env = std::getenv("PVT_NUM_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) return 1;
  return static_cast<int>(n);
}

void apply_json(PipelineConfig& cfg, const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw UsageError("config: top level must be an object");
  reject_unknown(root,
                 {"layout", "m", "noise_sigma", "seed", "denoise", "flow", "splat_importance", "warp_mode", "loss",
                  "clamp_dolp", "out", "threads"},
                 "");
  take(root, "layout", cfg.layout, "");
  take(root, "m", cfg.m, "");
  take(root, "noise_sigma", cfg.noise_sigma, "");
  take(root, "seed", cfg.seed, "");
  take(root, "splat_importance", cfg.splat_importance, "");
  take(root, "warp_mode", cfg.warp_mode, "");
  take(root, "clamp_dolp", cfg.clamp_dolp, "");
  take(root, "out", cfg.out_dir, "");
  take(root, "threads", cfg.threads, "");
  if (root.contains("denoise")) {
    const json& d = section(root, "denoise");
    reject_unknown(d, {"method", "sigma", "radius", "eps", "per_channel_guide"}, "denoise.");
    take(d, "method", cfg.denoise.method, "denoise.");
    take(d, "sigma", cfg.denoise.sigma, "denoise.");
    take(d, "radius", cfg.denoise.radius, "denoise.");
    take(d, "eps", cfg.denoise.eps, "denoise.");
    take(d, "per_channel_guide", cfg.denoise.per_channel_guide, "denoise.");
  }
  if (root.contains("flow")) {
    const json& f = section(root, "flow");
    reject_unknown(f, {"source", "dir", "alpha", "iterations", "levels"}, "flow.");
    take(f, "source", cfg.flow.source, "flow.");
    take(f, "dir", cfg.flow.dir, "flow.");
    take(f, "alpha", cfg.flow.alpha, "flow.");
    take(f, "iterations", cfg.flow.iterations, "flow.");
    take(f, "levels", cfg.flow.levels, "flow.");
  }
  if (root.contains("loss")) {
    const json& l = section(root, "loss");
    reject_unknown(l, {"epsilon", "tau", "lambda1", "lambda2"}, "loss.");
    take(l, "epsilon", cfg.loss.epsilon, "loss.");
    take(l, "tau", cfg.loss.tau, "loss.");
    take(l, "lambda1", cfg.loss.lambda1, "loss.");
    take(l, "lambda2", cfg.loss.lambda2, "loss.");
  }
}

PipelineConfig resolve_config(const ConfigOverrides& o) {
  PipelineConfig cfg;
  cfg.threads = default_threads();
  if (o.config_path) {
    std::string text;
    try {
      text = read_text_file(*o.config_path);
    } catch (const IoError& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
    apply_json(cfg, text);
  }
  over(o.layout, cfg.layout);
  over(o.m, cfg.m);
  over(o.noise_sigma, cfg.noise_sigma);
  over(o.seed, cfg.seed);
  over(o.denoise_method, cfg.denoise.method);
  over(o.denoise_sigma, cfg.denoise.sigma);
  over(o.denoise_radius, cfg.denoise.radius);
  over(o.denoise_eps, cfg.denoise.eps);
  over(o.per_channel_guide, cfg.denoise.per_channel_guide);
  over(o.flow_source, cfg.flow.source);
  over(o.flow_dir, cfg.flow.dir);
  over(o.flow_alpha, cfg.flow.alpha);
  over(o.flow_iterations, cfg.flow.iterations);
  over(o.flow_levels, cfg.flow.levels);
  over(o.splat_importance, cfg.splat_importance);
  over(o.warp_mode, cfg.warp_mode);
  over(o.epsilon, cfg.loss.epsilon);
  over(o.tau, cfg.loss.tau);
  over(o.lambda1, cfg.loss.lambda1);
  over(o.lambda2, cfg.loss.lambda2);
  over(o.clamp_dolp, cfg.clamp_dolp);
  over(o.out_dir, cfg.out_dir);
  over(o.threads, cfg.threads);
  cfg.validate();
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["layout"] = cfg.layout;
  j["m"] = cfg.m;
  j["noise_sigma"] = cfg.noise_sigma;
  j["seed"] = cfg.seed;
  j["denoise"] = {{"method", cfg.denoise.method},
                  {"sigma", cfg.denoise.sigma},
                  {"radius", cfg.denoise.radius},
                  {"eps", cfg.denoise.eps},
                  {"per_channel_guide", cfg.denoise.per_channel_guide}};
  j["flow"] = {{"source", cfg.flow.source},
               {"dir", cfg.flow.dir},
               {"alpha", cfg.flow.alpha},
               {"iterations", cfg.flow.iterations},
               {"levels", cfg.flow.levels}};
  j["splat_importance"] = cfg.splat_importance;
  j["warp_mode"] = cfg.warp_mode;
  j["loss"] = {{"epsilon", cfg.loss.epsilon},
               {"tau", cfg.loss.tau},
               {"lambda1", cfg.loss.lambda1},
               {"lambda2", cfg.loss.lambda2}};
  j["clamp_dolp"] = cfg.clamp_dolp;
  j["out"] = cfg.out_dir;
  return j.dump(2) + "\n";
}

void echo_config(const PipelineConfig& cfg, const std::filesystem::path& dir) {
  write_text_file(dir / "config.json", config_to_json(cfg));
}

}  // namespace pvt::cli
