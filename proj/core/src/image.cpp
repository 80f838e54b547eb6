#include "pvt/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pvt/error.hpp"

namespace pvt {

Image::Image(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) {
    throw DimensionError("negative image dimension " + shape_string());
  }
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

double Image::clamped(int c, int y, int x) const {
  y = std::clamp(y, 0, height_ - 1);
  x = std::clamp(x, 0, width_ - 1);
  return data_[index(c, y, x)];
}

std::span<double> Image::plane(int c) {
  return std::span<double>(data_).subspan(static_cast<std::size_t>(c) * plane_size(), plane_size());
}

std::span<const double> Image::plane(int c) const {
  return std::span<const double>(data_).subspan(static_cast<std::size_t>(c) * plane_size(),
                                                plane_size());
}

Image Image::channel(int c) const {
  Image out(1, height_, width_);
  std::ranges::copy(plane(c), out.data_.begin());
  return out;
}

void Image::set_channel(int c, const Image& src) {
  if (!same_extent(src) || src.channels() != 1) {
    throw DimensionError("set_channel: expected 1x" + std::to_string(height_) + "x" +
                         std::to_string(width_) + ", got " + src.shape_string());
  }
  std::ranges::copy(src.data_, plane(c).begin());
}

Image Image::channel_mean() const {
  Image out(1, height_, width_);
  if (channels_ == 0) return out;
  for (int c = 0; c < channels_; ++c) {
    auto src = plane(c);
    for (std::size_t i = 0; i < src.size(); ++i) out.data_[i] += src[i];
  }
  for (double& v : out.data_) v /= channels_;
  return out;
}

std::string Image::shape_string() const {
  return std::to_string(channels_) + "x" + std::to_string(height_) + "x" + std::to_string(width_);
}

double Image::min() const {
  return data_.empty() ? 0.0 : *std::ranges::min_element(data_);
}

double Image::max() const {
  return data_.empty() ? 0.0 : *std::ranges::max_element(data_);
}

double Image::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Image::mean() const { return data_.empty() ? 0.0 : sum() / static_cast<double>(size()); }

bool Image::all_finite() const {
  return std::ranges::all_of(data_, [](double v) { return std::isfinite(v); });
}

Image& Image::operator+=(const Image& rhs) {
  require_same_shape(*this, rhs, "image addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Image& Image::operator-=(const Image& rhs) {
  require_same_shape(*this, rhs, "image subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Image& Image::operator*=(double k) {
  for (double& v : data_) v *= k;
  return *this;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

void require_same_extent(const Image& a, const Image& b, const char* what) {
  if (!a.same_extent(b)) {
    throw DimensionError(std::string(what) + ": extent mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

}  // namespace pvt
