#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <vector>

#include "pvt/error.hpp"
#include "pvt/io.hpp"

namespace pvt {
namespace detail {
void write_png16_sidecar(const std::filesystem::path& path, const MosaicLayout& layout, double scale);
bool read_png16_sidecar(const std::filesystem::path& path, double* scale, MosaicLayout* layout);
}  // namespace detail

namespace {

constexpr std::uint32_t kMaxPngSide = 1u << 16;

struct ErrorSink {
  char message[256] = {0};
};

void on_error(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

struct WriteBuffer {
  std::vector<std::byte> bytes;
};

void write_to_buffer(png_structp png, png_bytep data, png_size_t length) {
  auto* buf = static_cast<WriteBuffer*>(png_get_io_ptr(png));
  const auto* p = reinterpret_cast<const std::byte*>(data);
  buf->bytes.insert(buf->bytes.end(), p, p + length);
}

void flush_noop(png_structp) {}

struct ReadCursor {
  const std::byte* data;
  std::size_t size;
  std::size_t offset;
};

void read_from_buffer(png_structp png, png_bytep out, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (length > cur->size - cur->offset) png_error(png, "unexpected end of data");
  std::memcpy(out, cur->data + cur->offset, length);
  cur->offset += length;
}

// Encodes rows of `bit_depth` samples (big-endian for 16 bits) into PNG bytes.
std::vector<std::byte> encode_png(const std::vector<unsigned char>& pixels, int width, int height,
                                  int channels, int bit_depth) {
  ErrorSink sink;
  WriteBuffer buf;
  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = const_cast<png_bytep>(pixels.data() + y * row_bytes);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, on_error, on_warning);
  if (!png) throw IoError("png: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png: cannot create info struct");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError(std::string("png: ") + sink.message);
  }
  png_set_write_fn(png, &buf, write_to_buffer, flush_noop);
  const int color = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return std::move(buf.bytes);
}

struct DecodedGray16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> samples;
};

DecodedGray16 decode_gray16(const std::vector<std::byte>& file) {
  ErrorSink sink;
  ReadCursor cursor{file.data(), file.size(), 0};
  DecodedGray16 out;
  std::vector<unsigned char> raw;
  std::vector<png_bytep> rows;
  std::string mismatch;

  if (file.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(file.data()), 0, 8) != 0) {
    throw FormatError("png: not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, on_error, on_warning);
  if (!png) throw IoError("png: cannot create read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png: cannot create info struct");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(std::string("png: ") + sink.message);
  }
  png_set_read_fn(png, &cursor, read_from_buffer);
  png_set_user_limits(png, kMaxPngSide, kMaxPngSide);
  png_read_info(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (bit_depth != 16 || color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("png: expected 16-bit grayscale, found bit depth " + std::to_string(bit_depth) +
                      " color type " + std::to_string(color));
  }
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  raw.resize(row_bytes * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = raw.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out.samples.resize(static_cast<std::size_t>(out.width) * out.height);
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    out.samples[k] = static_cast<std::uint16_t>((raw[2 * k] << 8) | raw[2 * k + 1]);
  }
  return out;
}

}  // namespace

void write_png16(const MosaicFrame& mosaic, const std::filesystem::path& path, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("write_png16: scale must be positive");
  mosaic.validate();
  const int h = mosaic.height();
  const int w = mosaic.width();
  std::vector<unsigned char> pixels(static_cast<std::size_t>(h) * w * 2);
  std::size_t k = 0;
  for (double v : mosaic.data.values()) {
    const double q = std::clamp(std::round(v / scale * 65535.0), 0.0, 65535.0);
    const auto s = static_cast<std::uint16_t>(q);
    pixels[k++] = static_cast<unsigned char>(s >> 8);
    pixels[k++] = static_cast<unsigned char>(s & 0xFF);
  }
  const auto bytes = encode_png(pixels, w, h, 1, 16);
  try {
    write_file_bytes(path, bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  detail::write_png16_sidecar(path, mosaic.layout, scale);
}

Png16ReadResult read_png16(const std::filesystem::path& path) {
  const auto file = read_file_bytes(path);
  DecodedGray16 img;
  try {
    img = decode_gray16(file);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  Png16ReadResult r;
  if (!detail::read_png16_sidecar(path, &r.scale, &r.mosaic.layout)) {
    r.warnings.push_back(path.string() + ".json: sidecar missing, assuming scale 1 and layout '" +
                         r.mosaic.layout.name() + "'");
  }
  r.mosaic.data = Image(1, img.height, img.width);
  auto values = r.mosaic.data.values();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = img.samples[k] / 65535.0 * r.scale;
  r.mosaic.validate();
  return r;
}

void write_png8(const Image& image, const std::filesystem::path& path, double gamma) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw DimensionError("write_png8: expected 1 or 3 channels, got " + std::to_string(image.channels()));
  }
  if (!(gamma > 0.0)) throw DomainError("write_png8: gamma must be positive");
  const int c = image.channels();
  const int h = image.height();
  const int w = image.width();
  std::vector<unsigned char> pixels(static_cast<std::size_t>(h) * w * c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        double v = image.at(ch, y, x);
        v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        v = std::pow(v, 1.0 / gamma);
        pixels[(static_cast<std::size_t>(y) * w + x) * c + ch] = static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
  }
  write_file_bytes(path, encode_png(pixels, w, h, c, 8));
}

}  // namespace pvt
