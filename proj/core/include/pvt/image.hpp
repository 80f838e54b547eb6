#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pvt {

/// Planar multi-channel image of doubles, laid out channel-major then row-major
/// (C x H x W). Scalar fields are single-channel images.
class Image {
 public:
  Image() = default;
  Image(int channels, int height, int width, double fill = 0.0);

  static Image like(const Image& other, double fill = 0.0) {
    return Image(other.channels(), other.height(), other.width(), fill);
  }

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  /// Pixel access with coordinates clamped into the frame (replicate border).
  double clamped(int c, int y, int x) const;

  std::span<double> plane(int c);
  std::span<const double> plane(int c) const;
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  /// Copy of one channel as a single-channel image.
  Image channel(int c) const;
  void set_channel(int c, const Image& src);

  /// Mean over channels, producing a single-channel image.
  Image channel_mean() const;

  bool same_shape(const Image& other) const {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }
  bool same_extent(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  std::string shape_string() const;

  double min() const;
  double max() const;
  double sum() const;
  double mean() const;
  bool all_finite() const;

  Image& operator+=(const Image& rhs);
  Image& operator-=(const Image& rhs);
  Image& operator*=(double k);

  friend Image operator+(Image lhs, const Image& rhs) { return lhs += rhs; }
  friend Image operator-(Image lhs, const Image& rhs) { return lhs -= rhs; }
  friend Image operator*(Image lhs, double k) { return lhs *= k; }
  friend Image operator*(double k, Image rhs) { return rhs *= k; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Throws DimensionError naming `what` when shapes differ.
void require_same_shape(const Image& a, const Image& b, const char* what);
void require_same_extent(const Image& a, const Image& b, const char* what);

}  // namespace pvt
