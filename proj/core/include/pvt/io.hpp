#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pvt/dofp.hpp"
#include "pvt/dynamics.hpp"
#include "pvt/flow.hpp"
#include "pvt/image.hpp"
#include "pvt/metrics.hpp"
#include "pvt/polar.hpp"

namespace pvt {

enum class PvtDtype : std::uint32_t { kFloat32 = 0, kFloat64 = 1 };

/// What the leading axis of a PVT tensor holds.
enum class PvtTag : std::uint32_t {
  kDirections = 0,  ///< 4 slices in the order 0, 45, 90, 135 degrees
  kStokes = 1,      ///< 3 slices S0, S1, S2
  kParams = 2,      ///< 3 slices I, p, phi
  kGeneric = 3,     ///< anything else (mosaics, masks, heatmaps)
};

inline constexpr std::size_t kPvtHeaderBytes = 28;

/// "PVT1" followed by six little-endian u32: n_dirs, n_channels, height, width, dtype, tag.
struct PvtHeader {
  std::uint32_t n_dirs = 1;
  std::uint32_t n_channels = 1;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  PvtDtype dtype = PvtDtype::kFloat32;
  PvtTag tag = PvtTag::kGeneric;

  std::size_t element_bytes() const { return dtype == PvtDtype::kFloat64 ? 8 : 4; }
  /// Payload length in bytes; throws FormatError on overflow.
  std::size_t payload_bytes() const;
};

/// A decoded PVT file: n_dirs images of n_channels x height x width.
struct PvtTensor {
  PvtHeader header;
  std::vector<Image> slices;
};

/// Serialization in memory. Slices are written direction-major, then channel, then row.
std::vector<std::byte> encode_pvt(std::span<const Image> slices, PvtTag tag,
                                  PvtDtype dtype = PvtDtype::kFloat32);
/// Parses a PVT buffer. Never allocates before the header and the buffer length agree.
PvtTensor decode_pvt(std::span<const std::byte> bytes);

void write_pvt(const PolarFrame& frame, const std::filesystem::path& path,
               PvtDtype dtype = PvtDtype::kFloat32);
void write_pvt(const StokesFrame& frame, const std::filesystem::path& path,
               PvtDtype dtype = PvtDtype::kFloat32);
void write_pvt(const PolarParams& params, const std::filesystem::path& path,
               PvtDtype dtype = PvtDtype::kFloat32);
void write_pvt(const Image& image, const std::filesystem::path& path,
               PvtDtype dtype = PvtDtype::kFloat32);

PvtTensor read_pvt(const std::filesystem::path& path);
/// Typed readers check the tag and slice count.
PolarFrame read_pvt_directions(const std::filesystem::path& path);
StokesFrame read_pvt_stokes(const std::filesystem::path& path);
PolarParams read_pvt_params(const std::filesystem::path& path);
Image read_pvt_image(const std::filesystem::path& path);

/// Middlebury .flo: float 202021.25, int32 width, int32 height, interleaved float32 u, v.
inline constexpr float kFloMagic = 202021.25f;
std::vector<std::byte> encode_flo(const FlowField& field);
FlowField decode_flo(std::span<const std::byte> bytes);
void write_flo(const FlowField& field, const std::filesystem::path& path);
FlowField read_flo(const std::filesystem::path& path);

struct Png16ReadResult {
  MosaicFrame mosaic;
  double scale = 1.0;
  std::vector<std::string> warnings;
};

/// 16-bit grayscale PNG storing round(value / scale * 65535), clipped to [0, 65535]. The scale
/// and the layout go to a JSON sidecar at `<path>.json`.
void write_png16(const MosaicFrame& mosaic, const std::filesystem::path& path, double scale = 1.0);
/// A missing sidecar falls back to scale 1 and the default layout with a warning. Images that
/// are not 16-bit single-channel raise FormatError.
Png16ReadResult read_png16(const std::filesystem::path& path);

/// Mosaic storage keyed on the extension: ".png" uses write_png16, anything else a generic PVT
/// plus the same layout sidecar.
void write_mosaic(const MosaicFrame& mosaic, const std::filesystem::path& path, double png_scale = 1.0);
Png16ReadResult read_mosaic(const std::filesystem::path& path);

/// 8-bit RGB (3 channels) or gray (1 channel) PNG for inspection. Values are clipped to [0, 1]
/// and raised to 1/gamma.
void write_png8(const Image& image, const std::filesystem::path& path, double gamma = 2.2);

/// Blue-white-red map of a signed field; `limit` <= 0 uses the largest magnitude.
Image diverging_colormap(const Image& field, double limit = 0.0);

std::string metrics_to_json(const MetricsReport& report);
std::string loss_report_to_json(const LossReport& report);
/// Fixed-width text table of the metrics.
std::string metrics_table(const MetricsReport& report);

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
/// Writes and fsyncs; errors carry the path.
void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace pvt
