#pragma once

// 8-bit planar images, overlap geometry and per-channel histograms.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imfkit/error.hpp"

namespace imfkit {

/// Number of representable intensity levels (8-bit).
inline constexpr int kLevels = 256;
inline constexpr int kMaxLevel = kLevels - 1;

/// One color channel, row-major, origin top-left.
class ChannelPlane {
 public:
  ChannelPlane() = default;
  ChannelPlane(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InvalidArgument("negative plane size");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }
  ChannelPlane(int width, int height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0) throw InvalidArgument("negative plane size");
    if (data_.size() != static_cast<std::size_t>(width) * height)
      throw InvalidArgument("plane data length does not match width*height");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  std::uint8_t at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint8_t& at(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<const std::uint8_t> pixels() const { return data_; }
  std::span<std::uint8_t> pixels() { return data_; }
  std::span<const std::uint8_t> row(int y) const {
    return std::span<const std::uint8_t>(data_).subspan(
        static_cast<std::size_t>(y) * width_, width_);
  }

  friend bool operator==(const ChannelPlane&, const ChannelPlane&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Grayscale (1 channel) or RGB (3 channels) 8-bit image.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::uint8_t fill = 0)
      : width_(width), height_(height) {
    check_channel_count(channels);
    planes_.assign(channels, ChannelPlane(width, height, fill));
  }
  explicit Image(std::vector<ChannelPlane> planes) : planes_(std::move(planes)) {
    check_channel_count(static_cast<int>(planes_.size()));
    width_ = planes_.front().width();
    height_ = planes_.front().height();
    for (const auto& p : planes_)
      if (p.width() != width_ || p.height() != height_)
        throw InvalidArgument("channel planes differ in size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return static_cast<int>(planes_.size()); }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  const ChannelPlane& channel(int c) const { return planes_.at(c); }
  ChannelPlane& channel(int c) { return planes_.at(c); }
  const std::vector<ChannelPlane>& planes() const { return planes_; }

  std::uint8_t at(int x, int y, int c) const { return planes_[c].at(x, y); }
  std::uint8_t& at(int x, int y, int c) { return planes_[c].at(x, y); }

  bool same_shape(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_ &&
           channels() == o.channels();
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static void check_channel_count(int channels) {
    if (channels != 1 && channels != 3)
      throw InvalidArgument("images carry 1 or 3 channels, got " +
                            std::to_string(channels));
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<ChannelPlane> planes_;
};

/// Axis-aligned pixel rectangle.
struct RegionRect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  std::size_t area() const { return static_cast<std::size_t>(width) * height; }
  bool inside(int img_width, int img_height) const {
    return x0 >= 0 && y0 >= 0 && width >= 0 && height >= 0 &&
           x0 + width <= img_width && y0 + height <= img_height;
  }
  friend bool operator==(const RegionRect&, const RegionRect&) = default;
};

inline ChannelPlane crop(const ChannelPlane& plane, const RegionRect& r) {
  if (!r.inside(plane.width(), plane.height()))
    throw InvalidArgument("crop rectangle out of bounds");
  ChannelPlane out(r.width, r.height);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) out.at(x, y) = plane.at(r.x0 + x, r.y0 + y);
  return out;
}

inline Image crop(const Image& img, const RegionRect& r) {
  if (!r.inside(img.width(), img.height()))
    throw InvalidArgument("crop rectangle out of bounds");
  std::vector<ChannelPlane> planes;
  planes.reserve(img.channels());
  for (const auto& p : img.planes()) planes.push_back(crop(p, r));
  return Image(std::move(planes));
}

/// Simulated misalignment of an aligned pair: `a` loses `n_c` columns on the
/// left and `n_c` rows at the bottom, `b` loses `n_c` columns on the right and
/// `n_c` rows at the top. Both results are (w - n_c) x (h - n_c).
inline std::pair<Image, Image> simulate_overlap(const Image& a, const Image& b,
                                                int n_c) {
  if (!a.same_shape(b))
    throw InvalidArgument("simulate_overlap: images differ in shape");
  if (n_c < 0) throw InvalidArgument("simulate_overlap: negative n_c");
  if (n_c > 0 && 2 * n_c >= std::min(a.width(), a.height()))
    throw InvalidArgument("simulate_overlap: n_c too large for the image");
  const int w = a.width() - n_c;
  const int h = a.height() - n_c;
  return {crop(a, RegionRect{n_c, 0, w, h}), crop(b, RegionRect{0, n_c, w, h})};
}

/// Per-level pixel counts of one channel.
struct Histogram {
  std::array<std::uint64_t, kLevels> bins{};
  std::uint64_t total = 0;

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// Running sums of a Histogram; cum[z] counts pixels with intensity <= z.
struct CumHistogram {
  std::array<std::uint64_t, kLevels> cum{};

  std::uint64_t total() const { return cum[kMaxLevel]; }
  /// C(z) with the convention C(-1) = 0.
  std::uint64_t at(int z) const { return z < 0 ? 0 : cum[z]; }

  friend bool operator==(const CumHistogram&, const CumHistogram&) = default;
};

inline Histogram histogram(const ChannelPlane& plane) {
  Histogram h;
  for (std::uint8_t v : plane.pixels()) ++h.bins[v];
  h.total = plane.size();
  return h;
}

inline CumHistogram cumulate(const Histogram& h) {
  CumHistogram c;
  std::uint64_t run = 0;
  for (int z = 0; z < kLevels; ++z) {
    run += h.bins[z];
    c.cum[z] = run;
  }
  return c;
}

}  // namespace imfkit
