#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pvt/dofp.hpp"
#include "pvt/flow.hpp"
#include "pvt/polar.hpp"

namespace pvt {

/// Polarization state of a surface plus a per-color intensity tint.
struct SurfaceValue {
  double i = 0.5;
  double p = 0.0;
  double phi = 0.0;
  std::array<double, 3> tint = {1.0, 1.0, 1.0};
};

/// Multiplicative intensity texture 1 + amplitude * sin(2 pi x / period) * sin(2 pi y / period)
/// evaluated in object coordinates, so it moves with the object.
struct Texture {
  double amplitude = 0.0;
  double period = 32.0;
};

struct MotionLaw {
  enum class Kind { kStatic, kRotation, kTranslation };
  Kind kind = Kind::kStatic;
  /// Rotation center (pixels) and angular speed (rad/frame).
  double cx = 0.0;
  double cy = 0.0;
  double omega = 0.0;
  /// The AoP advances by omega per frame together with the geometry (a polarizer on a turntable).
  bool aop_corotates = false;
  /// Translation speed, pixels/frame.
  double dx = 0.0;
  double dy = 0.0;
};

struct ScenePrimitive {
  enum class Shape { kDisc, kRectangle, kRampPatch };
  Shape shape = Shape::kDisc;
  /// Center at frame 0.
  double cx = 0.0;
  double cy = 0.0;
  /// Disc radius.
  double radius = 10.0;
  /// Rectangle / ramp patch half extents.
  double half_width = 10.0;
  double half_height = 10.0;
  /// Ramp patches add ramp_slope * (x - cx) to the intensity (object coordinates).
  double ramp_slope = 0.0;
  SurfaceValue value;
  Texture texture;
  MotionLaw motion;
};

struct SceneSpec {
  int width = 256;
  int height = 256;
  int n_frames = 8;
  SurfaceValue background;
  Texture background_texture;
  std::vector<ScenePrimitive> objects;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SceneFrameBundle {
  PolarParams params_gt;
  PolarFrame directions_gt;
  MosaicFrame mosaic;
  /// Exact motion into the next frame; empty planes for the last frame.
  FlowField flow_to_next;
  int timestamp = 0;
};

/// Rasterizes every frame: 4x4 supersampled coverage per primitive, painter's order;
/// I and p blend linearly with coverage while phi takes the foreground value once coverage
/// exceeds 1/2. Directions follow from the params, the mosaic from the forward operator with
/// the scene's noise settings.
std::vector<SceneFrameBundle> render_sequence(const SceneSpec& spec,
                                              const MosaicLayout& layout = MosaicLayout::imx250myr());

/// One frame of render_sequence; frames are independent of each other.
SceneFrameBundle render_frame(const SceneSpec& spec, int frame,
                              const MosaicLayout& layout = MosaicLayout::imx250myr());

/// Ground-truth params of one frame.
PolarParams render_params(const SceneSpec& spec, int frame);

/// Exact displacement field defined on the pixels of frame `from`, pointing to where each
/// surface point sits at frame `to`. Background pixels are static.
FlowField exact_flow(const SceneSpec& spec, int from, int to);

/// Documented presets: "turntable", "translating-patches", "static-noise".
SceneSpec preset_scene(std::string_view name);
std::vector<std::string> preset_scene_names();

std::string scene_to_json(const SceneSpec& spec);
SceneSpec scene_from_json(std::string_view text);

}  // namespace pvt
