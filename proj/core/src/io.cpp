#include "pvt/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "pvt/error.hpp"

namespace pvt {
namespace {

static_assert(std::numeric_limits<float>::is_iec559 && std::numeric_limits<double>::is_iec559);

// Arrays larger than this are refused before any allocation.
constexpr std::size_t kMaxPayloadBytes = std::size_t{1} << 34;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<std::byte, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void put(std::vector<std::byte>& out, T v) {
  const auto bytes = std::bit_cast<std::array<std::byte, sizeof(T)>>(to_little(v));
  out.insert(out.end(), bytes.begin(), bytes.end());
}

template <typename T>
T get(std::span<const std::byte> in, std::size_t offset) {
  std::array<std::byte, sizeof(T)> bytes;
  std::memcpy(bytes.data(), in.data() + offset, sizeof(T));
  return to_little(std::bit_cast<T>(bytes));
}

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    throw FormatError("pvt: declared dimensions overflow");
  }
  return a * b;
}

std::string with_path(const std::filesystem::path& path, const std::string& msg) {
  return path.string() + ": " + msg;
}

template <typename Fn>
auto rethrow_with_path(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(with_path(path, e.what()));
  }
}

std::vector<Image> expect_slices(const PvtTensor& t, PvtTag tag, std::uint32_t n, const char* what) {
  if (t.header.tag != tag || t.header.n_dirs != n) {
    throw FormatError(std::string("pvt: expected ") + what + " (tag " +
                      std::to_string(static_cast<std::uint32_t>(tag)) + ", " + std::to_string(n) +
                      " slices), found tag " + std::to_string(static_cast<std::uint32_t>(t.header.tag)) +
                      " with " + std::to_string(t.header.n_dirs) + " slices");
  }
  return t.slices;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

bool has_png_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

void write_mosaic_sidecar(const std::filesystem::path& path, const MosaicLayout& layout,
                          const double* scale) {
  nlohmann::ordered_json j;
  if (scale) j["scale"] = *scale;
  j["layout"] = layout.name();
  j["layout_table"] = layout.to_text();
  write_text_file(sidecar_path(path), j.dump(2) + "\n");
}

// Returns false when there is no sidecar.
bool read_mosaic_sidecar(const std::filesystem::path& path, double* scale, MosaicLayout* layout) {
  const auto side = sidecar_path(path);
  if (!std::filesystem::exists(side)) return false;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(side));
    if (scale && j.contains("scale")) *scale = j.at("scale").get<double>();
    if (j.contains("layout_table")) {
      std::istringstream in(j.at("layout_table").get<std::string>());
      *layout = MosaicLayout::parse(in, j.value("layout", std::string("custom")));
    } else if (j.contains("layout")) {
      *layout = MosaicLayout::resolve(j.at("layout").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(with_path(side, e.what()));
  }
  if (scale && !(*scale > 0.0 && std::isfinite(*scale))) {
    throw FormatError(with_path(side, "scale must be positive and finite"));
  }
  return true;
}

nlohmann::ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::size_t PvtHeader::payload_bytes() const {
  std::size_t n = checked_mul(n_dirs, n_channels);
  n = checked_mul(n, height);
  n = checked_mul(n, width);
  return checked_mul(n, element_bytes());
}

std::vector<std::byte> encode_pvt(std::span<const Image> slices, PvtTag tag, PvtDtype dtype) {
  if (slices.empty()) throw DimensionError("pvt: nothing to write");
  const Image& first = slices.front();
  if (first.empty()) throw DimensionError("pvt: empty image");
  for (const auto& s : slices) require_same_shape(s, first, "pvt slices");
  if (dtype != PvtDtype::kFloat32 && dtype != PvtDtype::kFloat64) throw DomainError("pvt: unknown dtype");

  PvtHeader h;
  h.n_dirs = static_cast<std::uint32_t>(slices.size());
  h.n_channels = static_cast<std::uint32_t>(first.channels());
  h.height = static_cast<std::uint32_t>(first.height());
  h.width = static_cast<std::uint32_t>(first.width());
  h.dtype = dtype;
  h.tag = tag;

  std::vector<std::byte> out;
  out.reserve(kPvtHeaderBytes + h.payload_bytes());
  for (char c : {'P', 'V', 'T', '1'}) out.push_back(static_cast<std::byte>(c));
  put(out, h.n_dirs);
  put(out, h.n_channels);
  put(out, h.height);
  put(out, h.width);
  put(out, static_cast<std::uint32_t>(h.dtype));
  put(out, static_cast<std::uint32_t>(h.tag));
  for (const auto& s : slices) {
    for (double v : s.values()) {
      if (dtype == PvtDtype::kFloat32) {
        put(out, static_cast<float>(v));
      } else {
        put(out, v);
      }
    }
  }
  return out;
}

PvtTensor decode_pvt(std::span<const std::byte> bytes) {
  if (bytes.size() < kPvtHeaderBytes) {
    throw FormatError("pvt: file has " + std::to_string(bytes.size()) + " bytes, shorter than the " +
                      std::to_string(kPvtHeaderBytes) + "-byte header");
  }
  if (std::memcmp(bytes.data(), "PVT1", 4) != 0) throw FormatError("pvt: bad magic, expected 'PVT1'");
  PvtHeader h;
  h.n_dirs = get<std::uint32_t>(bytes, 4);
  h.n_channels = get<std::uint32_t>(bytes, 8);
  h.height = get<std::uint32_t>(bytes, 12);
  h.width = get<std::uint32_t>(bytes, 16);
  const auto dtype = get<std::uint32_t>(bytes, 20);
  const auto tag = get<std::uint32_t>(bytes, 24);
  if (h.n_dirs == 0 || h.n_channels == 0 || h.height == 0 || h.width == 0) {
    throw FormatError("pvt: header declares a zero dimension");
  }
  constexpr std::uint32_t kMaxDim = static_cast<std::uint32_t>(std::numeric_limits<int>::max());
  if (h.n_channels > kMaxDim || h.height > kMaxDim || h.width > kMaxDim) {
    throw FormatError("pvt: header dimension exceeds the supported range");
  }
  if (dtype > 1) throw FormatError("pvt: unknown dtype code " + std::to_string(dtype));
  if (tag > 3) throw FormatError("pvt: unknown tag " + std::to_string(tag));
  h.dtype = static_cast<PvtDtype>(dtype);
  h.tag = static_cast<PvtTag>(tag);

  const std::size_t payload = h.payload_bytes();
  if (payload > kMaxPayloadBytes) throw FormatError("pvt: declared payload too large");
  const std::size_t expected = kPvtHeaderBytes + payload;
  if (bytes.size() != expected) {
    throw FormatError("pvt: expected " + std::to_string(expected) + " bytes from the header, file has " +
                      std::to_string(bytes.size()));
  }

  PvtTensor t;
  t.header = h;
  t.slices.reserve(h.n_dirs);
  std::size_t offset = kPvtHeaderBytes;
  for (std::uint32_t d = 0; d < h.n_dirs; ++d) {
    Image img(static_cast<int>(h.n_channels), static_cast<int>(h.height), static_cast<int>(h.width));
    for (double& v : img.values()) {
      if (h.dtype == PvtDtype::kFloat32) {
        v = get<float>(bytes, offset);
        offset += 4;
      } else {
        v = get<double>(bytes, offset);
        offset += 8;
      }
    }
    t.slices.push_back(std::move(img));
  }
  return t;
}

void write_pvt(const PolarFrame& frame, const std::filesystem::path& path, PvtDtype dtype) {
  write_file_bytes(path, encode_pvt(frame.dirs, PvtTag::kDirections, dtype));
}

void write_pvt(const StokesFrame& frame, const std::filesystem::path& path, PvtDtype dtype) {
  const std::array<Image, 3> s{frame.s0, frame.s1, frame.s2};
  write_file_bytes(path, encode_pvt(s, PvtTag::kStokes, dtype));
}

void write_pvt(const PolarParams& params, const std::filesystem::path& path, PvtDtype dtype) {
  const std::array<Image, 3> s{params.i, params.p, params.phi};
  write_file_bytes(path, encode_pvt(s, PvtTag::kParams, dtype));
}

void write_pvt(const Image& image, const std::filesystem::path& path, PvtDtype dtype) {
  write_file_bytes(path, encode_pvt(std::span<const Image>(&image, 1), PvtTag::kGeneric, dtype));
}

PvtTensor read_pvt(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return rethrow_with_path(path, [&] { return decode_pvt(bytes); });
}

PolarFrame read_pvt_directions(const std::filesystem::path& path) {
  return rethrow_with_path(path, [&] {
    auto s = expect_slices(read_pvt(path), PvtTag::kDirections, 4, "directions");
    PolarFrame f;
    for (int d = 0; d < 4; ++d) f.dirs[d] = std::move(s[d]);
    return f;
  });
}

StokesFrame read_pvt_stokes(const std::filesystem::path& path) {
  return rethrow_with_path(path, [&] {
    auto s = expect_slices(read_pvt(path), PvtTag::kStokes, 3, "Stokes");
    StokesFrame f;
    f.s0 = std::move(s[0]);
    f.s1 = std::move(s[1]);
    f.s2 = std::move(s[2]);
    return f;
  });
}

PolarParams read_pvt_params(const std::filesystem::path& path) {
  return rethrow_with_path(path, [&] {
    auto s = expect_slices(read_pvt(path), PvtTag::kParams, 3, "params");
    PolarParams p;
    p.i = std::move(s[0]);
    p.p = std::move(s[1]);
    p.phi = std::move(s[2]);
    return p;
  });
}

Image read_pvt_image(const std::filesystem::path& path) {
  return rethrow_with_path(path, [&] {
    return std::move(expect_slices(read_pvt(path), PvtTag::kGeneric, 1, "a generic image")[0]);
  });
}

std::vector<std::byte> encode_flo(const FlowField& field) {
  field.validate();
  const int h = field.height();
  const int w = field.width();
  std::vector<std::byte> out;
  out.reserve(12 + static_cast<std::size_t>(h) * w * 8);
  put(out, kFloMagic);
  put(out, static_cast<std::int32_t>(w));
  put(out, static_cast<std::int32_t>(h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      put(out, static_cast<float>(field.u.at(0, y, x)));
      put(out, static_cast<float>(field.v.at(0, y, x)));
    }
  }
  return out;
}

FlowField decode_flo(std::span<const std::byte> bytes) {
  if (bytes.size() < 12) throw FormatError("flo: file shorter than the 12-byte header");
  if (get<float>(bytes, 0) != kFloMagic) throw FormatError("flo: bad magic, expected 202021.25");
  const auto w = get<std::int32_t>(bytes, 4);
  const auto h = get<std::int32_t>(bytes, 8);
  if (w <= 0 || h <= 0) throw FormatError("flo: non-positive dimensions");
  const std::size_t payload = checked_mul(checked_mul(static_cast<std::size_t>(w), static_cast<std::size_t>(h)), 8);
  if (payload > kMaxPayloadBytes || bytes.size() != 12 + payload) {
    throw FormatError("flo: expected " + std::to_string(12 + payload) + " bytes for " + std::to_string(w) + "x" +
                      std::to_string(h) + ", file has " + std::to_string(bytes.size()));
  }
  FlowField f = FlowField::zeros(h, w);
  std::size_t offset = 12;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      f.u.at(0, y, x) = get<float>(bytes, offset);
      f.v.at(0, y, x) = get<float>(bytes, offset + 4);
      offset += 8;
    }
  }
  return f;
}

void write_flo(const FlowField& field, const std::filesystem::path& path) {
  write_file_bytes(path, encode_flo(field));
}

FlowField read_flo(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return rethrow_with_path(path, [&] { return decode_flo(bytes); });
}

void write_mosaic(const MosaicFrame& mosaic, const std::filesystem::path& path, double png_scale) {
  if (has_png_extension(path)) {
    write_png16(mosaic, path, png_scale);
    return;
  }
  mosaic.validate();
  write_pvt(mosaic.data, path);
  write_mosaic_sidecar(path, mosaic.layout, nullptr);
}

Png16ReadResult read_mosaic(const std::filesystem::path& path) {
  if (has_png_extension(path)) return read_png16(path);
  Png16ReadResult r;
  r.mosaic.data = read_pvt_image(path);
  if (!read_mosaic_sidecar(path, nullptr, &r.mosaic.layout)) {
    r.warnings.push_back(with_path(sidecar_path(path), "sidecar missing, assuming layout '" +
                                                          r.mosaic.layout.name() + "'"));
  }
  r.mosaic.validate();
  return r;
}

namespace detail {

void write_png16_sidecar(const std::filesystem::path& path, const MosaicLayout& layout, double scale) {
  write_mosaic_sidecar(path, layout, &scale);
}

bool read_png16_sidecar(const std::filesystem::path& path, double* scale, MosaicLayout* layout) {
  return read_mosaic_sidecar(path, scale, layout);
}

}  // namespace detail

Image diverging_colormap(const Image& field, double limit) {
  if (field.channels() != 1) throw DimensionError("diverging_colormap: expected one channel");
  if (limit <= 0.0) {
    for (double v : field.values()) limit = std::max(limit, std::abs(v));
  }
  if (limit <= 0.0) limit = 1.0;
  Image out(3, field.height(), field.width());
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      const double t = std::clamp(field.at(0, y, x) / limit, -1.0, 1.0);
      const double a = std::abs(t);
      // White at zero, red for positive, blue for negative.
      const double r = t >= 0 ? 1.0 : 1.0 - a;
      const double b = t <= 0 ? 1.0 : 1.0 - a;
      out.at(0, y, x) = r;
      out.at(1, y, x) = 1.0 - a;
      out.at(2, y, x) = b;
    }
  }
  return out;
}

std::string metrics_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method_tag;
  j["frames"] = r.frames;
  j["psnr_i"] = number_or_null(r.psnr_i);
  j["psnr_p"] = number_or_null(r.psnr_p);
  j["ssim_i"] = number_or_null(r.ssim_i);
  j["ssim_p"] = number_or_null(r.ssim_p);
  j["mae_aop_deg"] = number_or_null(r.mae_deg);
  j["psnr_i_capped"] = r.psnr_i_capped;
  j["psnr_p_capped"] = r.psnr_p_capped;
  j["dolp_clamped"] = r.dolp_clamped;
  j["intensity_normalization"] = r.normalization;
  return j.dump(2);
}

std::string loss_report_to_json(const LossReport& r) {
  nlohmann::ordered_json j;
  j["l_int"] = r.l_int;
  j["l_flow"] = r.l_flow;
  j["l_var"] = r.l_var;
  j["l_sm"] = r.l_sm;
  j["l_pix"] = r.l_pix;
  j["l_polar"] = r.l_polar;
  j["l_total"] = r.l_total;
  j["constants"] = {{"epsilon", r.epsilon}, {"tau", r.tau}, {"lambda1", r.lambda1}, {"lambda2", r.lambda2}};
  return j.dump(2);
}

std::string metrics_table(const MetricsReport& r) {
  std::ostringstream out;
  out << std::fixed;
  out << std::left << std::setw(24) << "method" << std::setw(10) << "PSNR_I" << std::setw(10) << "PSNR_p"
      << std::setw(10) << "SSIM_I" << std::setw(10) << "SSIM_p" << "MAE(deg)\n";
  out << std::setw(24) << r.method_tag << std::setprecision(3) << std::setw(10) << r.psnr_i << std::setw(10)
      << r.psnr_p << std::setprecision(4) << std::setw(10) << r.ssim_i << std::setw(10) << r.ssim_p
      << std::setprecision(3) << r.mae_deg << "\n";
  return out.str();
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(with_path(path, std::string("cannot open for reading: ") + std::strerror(errno)));
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size < 0) throw IoError(with_path(path, "cannot determine file size"));
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(static_cast<std::size_t>(size));
  if (!bytes.empty() && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw IoError(with_path(path, "read failed"));
  }
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError(with_path(path, std::string("cannot open for writing: ") + std::strerror(errno)));
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw IoError(with_path(path, std::string("write failed: ") + std::strerror(err)));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int err = errno;
    ::close(fd);
    throw IoError(with_path(path, std::string("fsync failed: ") + std::strerror(err)));
  }
  if (::close(fd) != 0) throw IoError(with_path(path, std::string("close failed: ") + std::strerror(errno)));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, std::as_bytes(std::span(text.data(), text.size())));
}

std::string read_text_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

}  // namespace pvt
