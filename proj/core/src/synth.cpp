#include "pvt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "pvt/error.hpp"

namespace pvt {
namespace {

constexpr int kSupersample = 4;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point {
  double x;
  double y;
};

Point rotate_about(Point p, double cx, double cy, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double dx = p.x - cx;
  const double dy = p.y - cy;
  return {cx + c * dx - s * dy, cy + s * dx + c * dy};
}

// Maps a point observed at `frame` back to the object's frame-0 coordinates.
Point to_object(const ScenePrimitive& obj, Point p, double frame) {
  switch (obj.motion.kind) {
    case MotionLaw::Kind::kRotation:
      return rotate_about(p, obj.motion.cx, obj.motion.cy, -obj.motion.omega * frame);
    case MotionLaw::Kind::kTranslation:
      return {p.x - obj.motion.dx * frame, p.y - obj.motion.dy * frame};
    case MotionLaw::Kind::kStatic:
      break;
  }
  return p;
}

// Position at frame `to` of the surface point seen at `p` in frame `from`.
Point advance(const ScenePrimitive& obj, Point p, double from, double to) {
  switch (obj.motion.kind) {
    case MotionLaw::Kind::kRotation:
      return rotate_about(p, obj.motion.cx, obj.motion.cy, obj.motion.omega * (to - from));
    case MotionLaw::Kind::kTranslation:
      return {p.x + obj.motion.dx * (to - from), p.y + obj.motion.dy * (to - from)};
    case MotionLaw::Kind::kStatic:
      break;
  }
  return p;
}

bool inside(const ScenePrimitive& obj, Point q) {
  const double dx = q.x - obj.cx;
  const double dy = q.y - obj.cy;
  if (obj.shape == ScenePrimitive::Shape::kDisc) return dx * dx + dy * dy <= obj.radius * obj.radius;
  return std::abs(dx) <= obj.half_width && std::abs(dy) <= obj.half_height;
}

double coverage(const ScenePrimitive& obj, int y, int x, double frame) {
  int hits = 0;
  for (int sy = 0; sy < kSupersample; ++sy) {
    for (int sx = 0; sx < kSupersample; ++sx) {
      const Point p{x + (sx + 0.5) / kSupersample - 0.5, y + (sy + 0.5) / kSupersample - 0.5};
      if (inside(obj, to_object(obj, p, frame))) ++hits;
    }
  }
  return static_cast<double>(hits) / (kSupersample * kSupersample);
}

double texture_factor(const Texture& t, Point q) {
  if (t.amplitude == 0.0) return 1.0;
  return 1.0 + t.amplitude * std::sin(kTwoPi * q.x / t.period) * std::sin(kTwoPi * q.y / t.period);
}

void validate_surface(const SurfaceValue& v, const std::string& where) {
  if (!(v.i >= 0.0) || !std::isfinite(v.i)) throw DomainError(where + ": intensity must be >= 0");
  if (!(v.p >= 0.0 && v.p <= 1.0)) throw DomainError(where + ": p must lie in [0, 1]");
  if (!std::isfinite(v.phi)) throw DomainError(where + ": phi must be finite");
  for (double g : v.tint) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError(where + ": tint must be >= 0");
  }
}

void validate_texture(const Texture& t, const std::string& where) {
  if (!(t.amplitude >= 0.0 && t.amplitude <= 1.0)) throw DomainError(where + ": texture amplitude must lie in [0, 1]");
  if (!(t.period > 0.0)) throw DomainError(where + ": texture period must be > 0");
}

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0 || width % 4 != 0 || height % 4 != 0) {
    throw DimensionError("scene: width and height must be positive multiples of 4");
  }
  if (n_frames < 2) throw DomainError("scene: n_frames must be >= 2");
  if (!(noise_sigma >= 0.0)) throw DomainError("scene: noise_sigma must be >= 0");
  validate_surface(background, "scene background");
  validate_texture(background_texture, "scene background");
  for (std::size_t k = 0; k < objects.size(); ++k) {
    const auto& o = objects[k];
    const std::string where = "scene object " + std::to_string(k);
    validate_surface(o.value, where);
    validate_texture(o.texture, where);
    if (o.shape == ScenePrimitive::Shape::kDisc && !(o.radius > 0.0)) throw DomainError(where + ": radius must be > 0");
    if (o.shape != ScenePrimitive::Shape::kDisc && !(o.half_width > 0.0 && o.half_height > 0.0)) {
      throw DomainError(where + ": half extents must be > 0");
    }
  }
}

PolarParams render_params(const SceneSpec& spec, int frame) {
  spec.validate();
  const int h = spec.height;
  const int w = spec.width;
  PolarParams out{Image(3, h, w), Image(3, h, w), Image(3, h, w), true};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Point centre{static_cast<double>(x), static_cast<double>(y)};
      const double bg_tex = texture_factor(spec.background_texture, centre);
      std::array<double, 3> inten{};
      for (int c = 0; c < 3; ++c) inten[c] = spec.background.i * spec.background.tint[c] * bg_tex;
      double p = spec.background.p;
      double phi = wrap_aop(spec.background.phi);

      for (const auto& obj : spec.objects) {
        const double cov = coverage(obj, y, x, frame);
        if (cov == 0.0) continue;
        const Point q = to_object(obj, centre, frame);
        const double tex = texture_factor(obj.texture, q);
        const double ramp = obj.shape == ScenePrimitive::Shape::kRampPatch ? obj.ramp_slope * (q.x - obj.cx) : 0.0;
        for (int c = 0; c < 3; ++c) {
          const double fg = std::max(0.0, obj.value.i * obj.value.tint[c] * tex + ramp);
          inten[c] = cov * fg + (1.0 - cov) * inten[c];
        }
        p = cov * obj.value.p + (1.0 - cov) * p;
        if (cov > 0.5) {
          const double spin = obj.motion.kind == MotionLaw::Kind::kRotation && obj.motion.aop_corotates
                                  ? obj.motion.omega * frame
                                  : 0.0;
          phi = wrap_aop(obj.value.phi + spin);
        }
      }
      for (int c = 0; c < 3; ++c) {
        out.i.at(c, y, x) = inten[c];
        out.p.at(c, y, x) = p;
        out.phi.at(c, y, x) = phi;
      }
    }
  }
  return out;
}

FlowField exact_flow(const SceneSpec& spec, int from, int to) {
  spec.validate();
  FlowField flow = FlowField::zeros(spec.height, spec.width, from, to);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const ScenePrimitive* top = nullptr;
      for (const auto& obj : spec.objects) {
        if (coverage(obj, y, x, from) > 0.5) top = &obj;
      }
      if (!top) continue;
      const Point p{static_cast<double>(x), static_cast<double>(y)};
      const Point q = advance(*top, p, from, to);
      flow.u.at(0, y, x) = q.x - p.x;
      flow.v.at(0, y, x) = q.y - p.y;
    }
  }
  return flow;
}

SceneFrameBundle render_frame(const SceneSpec& spec, int frame, const MosaicLayout& layout) {
  spec.validate();
  if (frame < 0 || frame >= spec.n_frames) throw DomainError("scene: frame index out of range");
  SceneFrameBundle b;
  b.timestamp = frame;
  b.params_gt = render_params(spec, frame);
  b.directions_gt = render_directions(b.params_gt);
  DegradationConfig cfg;
  cfg.noise_sigma = spec.noise_sigma;
  cfg.rng_seed = spec.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(frame + 1));
  b.mosaic = apply_forward(b.directions_gt, layout, cfg);
  if (frame + 1 < spec.n_frames) {
    b.flow_to_next = exact_flow(spec, frame, frame + 1);
  } else {
    b.flow_to_next.source_time = frame;
    b.flow_to_next.target_time = frame + 1;
  }
  return b;
}

std::vector<SceneFrameBundle> render_sequence(const SceneSpec& spec, const MosaicLayout& layout) {
  spec.validate();
  std::vector<SceneFrameBundle> out;
  out.reserve(spec.n_frames);
  for (int k = 0; k < spec.n_frames; ++k) out.push_back(render_frame(spec, k, layout));
  return out;
}

std::vector<std::string> preset_scene_names() {
  return {"turntable", "translating-patches", "static-noise"};
}

SceneSpec preset_scene(std::string_view name) {
  SceneSpec s;
  if (name == "turntable") {
    // A linear polarizer disc spinning on a turntable over a static textured backdrop.
    s.width = 256;
    s.height = 256;
    s.n_frames = 8;
    s.background = {0.35, 0.10, 0.40, {1.0, 0.9, 0.8}};
    s.background_texture = {0.3, 40.0};
    ScenePrimitive disc;
    disc.shape = ScenePrimitive::Shape::kDisc;
    disc.cx = 128.0;
    disc.cy = 128.0;
    disc.radius = 80.0;
    disc.value = {0.6, 0.95, 0.2, {0.9, 1.0, 0.8}};
    disc.texture = {0.3, 32.0};
    disc.motion.kind = MotionLaw::Kind::kRotation;
    disc.motion.cx = 128.0;
    disc.motion.cy = 128.0;
    disc.motion.omega = 0.1;
    disc.motion.aop_corotates = true;
    s.objects.push_back(disc);
    s.seed = 1;
    return s;
  }
  if (name == "translating-patches") {
    s.width = 128;
    s.height = 128;
    s.n_frames = 6;
    s.background = {0.3, 0.05, 1.2, {1.0, 1.0, 1.0}};
    s.background_texture = {0.25, 24.0};
    ScenePrimitive a;
    a.shape = ScenePrimitive::Shape::kRectangle;
    a.cx = 36.0;
    a.cy = 40.0;
    a.half_width = 12.0;
    a.half_height = 12.0;
    a.value = {0.7, 0.6, 0.3, {1.0, 0.8, 0.6}};
    a.texture = {0.2, 16.0};
    a.motion.kind = MotionLaw::Kind::kTranslation;
    a.motion.dx = 1.0;
    ScenePrimitive b;
    b.shape = ScenePrimitive::Shape::kRampPatch;
    b.cx = 60.0;
    b.cy = 88.0;
    b.half_width = 14.0;
    b.half_height = 10.0;
    b.ramp_slope = 0.01;
    b.value = {0.5, 0.4, 2.4, {0.7, 0.9, 1.0}};
    b.motion.kind = MotionLaw::Kind::kTranslation;
    b.motion.dx = 2.0;
    s.objects = {a, b};
    s.seed = 2;
    return s;
  }
  if (name == "static-noise") {
    // Static scene whose DoLP boundaries coincide with intensity edges.
    s.width = 128;
    s.height = 128;
    s.n_frames = 2;
    s.background = {0.4, 0.15, 1.0, {1.0, 0.95, 0.9}};
    s.background_texture = {0.2, 28.0};
    ScenePrimitive rect;
    rect.shape = ScenePrimitive::Shape::kRectangle;
    rect.cx = 44.0;
    rect.cy = 64.0;
    rect.half_width = 20.0;
    rect.half_height = 36.0;
    rect.value = {0.75, 0.6, 0.3, {1.0, 0.9, 0.8}};
    ScenePrimitive disc;
    disc.shape = ScenePrimitive::Shape::kDisc;
    disc.cx = 92.0;
    disc.cy = 64.0;
    disc.radius = 22.0;
    disc.value = {0.2, 0.8, 2.0, {0.8, 1.0, 1.0}};
    s.objects = {rect, disc};
    s.noise_sigma = 0.02;
    s.seed = 3;
    return s;
  }
  throw DomainError("unknown scene preset '" + std::string(name) + "'");
}

namespace {

using nlohmann::ordered_json;

ordered_json surface_json(const SurfaceValue& v) {
  return {{"i", v.i}, {"p", v.p}, {"phi", v.phi}, {"tint", v.tint}};
}

SurfaceValue surface_from(const ordered_json& j) {
  SurfaceValue v;
  v.i = j.value("i", v.i);
  v.p = j.value("p", v.p);
  v.phi = j.value("phi", v.phi);
  if (j.contains("tint")) v.tint = j.at("tint").get<std::array<double, 3>>();
  return v;
}

ordered_json texture_json(const Texture& t) { return {{"amplitude", t.amplitude}, {"period", t.period}}; }

Texture texture_from(const ordered_json& j) {
  Texture t;
  t.amplitude = j.value("amplitude", t.amplitude);
  t.period = j.value("period", t.period);
  return t;
}

const char* shape_name(ScenePrimitive::Shape s) {
  switch (s) {
    case ScenePrimitive::Shape::kDisc: return "disc";
    case ScenePrimitive::Shape::kRectangle: return "rectangle";
    case ScenePrimitive::Shape::kRampPatch: return "ramp";
  }
  return "disc";
}

ScenePrimitive::Shape shape_from(const std::string& s) {
  if (s == "disc") return ScenePrimitive::Shape::kDisc;
  if (s == "rectangle") return ScenePrimitive::Shape::kRectangle;
  if (s == "ramp") return ScenePrimitive::Shape::kRampPatch;
  throw FormatError("scene json: unknown shape '" + s + "'");
}

ordered_json motion_json(const MotionLaw& m) {
  switch (m.kind) {
    case MotionLaw::Kind::kRotation:
      return {{"kind", "rotation"}, {"cx", m.cx}, {"cy", m.cy}, {"omega", m.omega}, {"aop_corotates", m.aop_corotates}};
    case MotionLaw::Kind::kTranslation:
      return {{"kind", "translation"}, {"dx", m.dx}, {"dy", m.dy}};
    case MotionLaw::Kind::kStatic:
      break;
  }
  return {{"kind", "static"}};
}

MotionLaw motion_from(const ordered_json& j) {
  MotionLaw m;
  const std::string kind = j.value("kind", std::string("static"));
  if (kind == "rotation") {
    m.kind = MotionLaw::Kind::kRotation;
    m.cx = j.value("cx", 0.0);
    m.cy = j.value("cy", 0.0);
    m.omega = j.value("omega", 0.0);
    m.aop_corotates = j.value("aop_corotates", false);
  } else if (kind == "translation") {
    m.kind = MotionLaw::Kind::kTranslation;
    m.dx = j.value("dx", 0.0);
    m.dy = j.value("dy", 0.0);
  } else if (kind != "static") {
    throw FormatError("scene json: unknown motion kind '" + kind + "'");
  }
  return m;
}

}  // namespace

std::string scene_to_json(const SceneSpec& spec) {
  ordered_json j;
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["n_frames"] = spec.n_frames;
  j["background"] = surface_json(spec.background);
  j["background_texture"] = texture_json(spec.background_texture);
  j["objects"] = ordered_json::array();
  for (const auto& o : spec.objects) {
    ordered_json oj;
    oj["shape"] = shape_name(o.shape);
    oj["cx"] = o.cx;
    oj["cy"] = o.cy;
    if (o.shape == ScenePrimitive::Shape::kDisc) {
      oj["radius"] = o.radius;
    } else {
      oj["half_width"] = o.half_width;
      oj["half_height"] = o.half_height;
    }
    if (o.shape == ScenePrimitive::Shape::kRampPatch) oj["ramp_slope"] = o.ramp_slope;
    oj["value"] = surface_json(o.value);
    oj["texture"] = texture_json(o.texture);
    oj["motion"] = motion_json(o.motion);
    j["objects"].push_back(oj);
  }
  j["noise_sigma"] = spec.noise_sigma;
  j["seed"] = spec.seed;
  return j.dump(2);
}

SceneSpec scene_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scene json: ") + e.what());
  }
  try {
    SceneSpec s;
    if (j.contains("preset")) s = preset_scene(j.at("preset").get<std::string>());
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.n_frames = j.value("n_frames", s.n_frames);
    if (j.contains("background")) s.background = surface_from(j.at("background"));
    if (j.contains("background_texture")) s.background_texture = texture_from(j.at("background_texture"));
    if (j.contains("objects")) {
      s.objects.clear();
      for (const auto& oj : j.at("objects")) {
        ScenePrimitive o;
        o.shape = shape_from(oj.value("shape", std::string("disc")));
        o.cx = oj.value("cx", 0.0);
        o.cy = oj.value("cy", 0.0);
        o.radius = oj.value("radius", o.radius);
        o.half_width = oj.value("half_width", o.half_width);
        o.half_height = oj.value("half_height", o.half_height);
        o.ramp_slope = oj.value("ramp_slope", 0.0);
        if (oj.contains("value")) o.value = surface_from(oj.at("value"));
        if (oj.contains("texture")) o.texture = texture_from(oj.at("texture"));
        if (oj.contains("motion")) o.motion = motion_from(oj.at("motion"));
        s.objects.push_back(o);
      }
    }
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scene json: ") + e.what());
  }
}

}  // namespace pvt
