#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "pvt/dynamics.hpp"
#include "pvt/flow.hpp"

namespace pvt::cli {

/// Bad flag values or config contents; reported with usage and exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DenoiseSettings {
  /// none | gaussian | guided
  std::string method = "guided";
  /// Gaussian standard deviation, pixels.
  double sigma = 1.0;
  /// Guided filter window half-width, pixels.
  int radius = 8;
  /// Guided filter regularizer, squared normalized intensity.
  double eps = 1e-3;
  bool per_channel_guide = false;
};

struct FlowSettings {
  /// file | horn-schunck
  std::string source = "horn-schunck";
  /// Directory holding fwd_NNNN.flo / bwd_NNNN.flo when source is "file".
  std::string dir;
  double alpha = 0.05;
  int iterations = 200;
  int levels = 3;
};

struct PipelineConfig {
  std::string layout = "imx250myr";
  int m = 1;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  DenoiseSettings denoise;
  FlowSettings flow;
  std::string splat_importance = "uniform";
  std::string warp_mode = "backward";
  LossConstants loss;
  bool clamp_dolp = true;
  std::string out_dir;
  /// Worker count; not part of the echoed config since results do not depend on it.
  int threads = 1;

  /// Throws UsageError naming the offending key.
  void validate() const;

  HornSchunckConfig horn_schunck() const { return {flow.alpha, flow.iterations, flow.levels}; }
};

/// Flag values that were given explicitly. Unset members keep the JSON / default value.
struct ConfigOverrides {
  std::optional<std::string> config_path;
  std::optional<std::string> layout;
  std::optional<int> m;
  std::optional<double> noise_sigma;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> denoise_method;
  std::optional<double> denoise_sigma;
  std::optional<int> denoise_radius;
  std::optional<double> denoise_eps;
  std::optional<bool> per_channel_guide;
  std::optional<std::string> flow_source;
  std::optional<std::string> flow_dir;
  std::optional<double> flow_alpha;
  std::optional<int> flow_iterations;
  std::optional<int> flow_levels;
  std::optional<std::string> splat_importance;
  std::optional<std::string> warp_mode;
  std::optional<double> epsilon;
  std::optional<double> tau;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<bool> clamp_dolp;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

/// Worker count from PVT_NUM_THREADS, or 1 when unset or invalid.
int default_threads();

/// Applies a JSON document on top of `cfg`. Unknown keys raise UsageError.
void apply_json(PipelineConfig& cfg, const std::string& json_text);

/// defaults, then the JSON file named by overrides.config_path, then explicit flags.
PipelineConfig resolve_config(const ConfigOverrides& overrides);

/// Stable-order JSON of every setting except the worker count.
std::string config_to_json(const PipelineConfig& cfg);

/// Writes config.json into `dir`.
void echo_config(const PipelineConfig& cfg, const std::filesystem::path& dir);

}  // namespace pvt::cli
