#pragma once

// Multi-scale exposure fusion (contrast x saturation x well-exposedness
// weights blended over Gaussian / Laplacian pyramids).

#include <algorithm>
#include <cmath>
#include <vector>

#include "imfkit/complete.hpp"
#include "imfkit/error.hpp"
#include "imfkit/image.hpp"

namespace imfkit {

struct FusionOptions {
  /// Spread of the well-exposedness Gaussian around mid-gray, on a [0, 1] scale.
  double well_exposed_sigma = 0.2;
  /// Floor added to the contrast and saturation measures so flat or gray
  /// layers are still ranked by exposure.
  double measure_floor = 1e-3;
  /// Pyramid depth; <= 0 selects floor(log2(min dimension)) - 2.
  int levels = 0;
};

/// Row-major double plane used inside the pyramids.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), v(static_cast<std::size_t>(w) * h, fill) {}
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

namespace detail {

// Reflect-101 border.
inline int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
  return i;
}

inline Plane blur5(const Plane& src, double gain) {
  static constexpr double k[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  Plane tmp(src.width, src.height);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      double s = 0.0;
      for (int i = 0; i < 5; ++i) s += k[i] * src.at(reflect(x + i - 2, src.width), y);
      tmp.at(x, y) = s * gain;
    }
  Plane out(src.width, src.height);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      double s = 0.0;
      for (int i = 0; i < 5; ++i) s += k[i] * tmp.at(x, reflect(y + i - 2, src.height));
      out.at(x, y) = s * gain;
    }
  return out;
}

inline Plane pyr_down(const Plane& src) {
  const Plane b = blur5(src, 1.0);
  Plane out((src.width + 1) / 2, (src.height + 1) / 2);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) out.at(x, y) = b.at(2 * x, 2 * y);
  return out;
}

inline Plane pyr_up(const Plane& src, int width, int height) {
  Plane z(width, height);
  for (int y = 0; y < src.height && 2 * y < height; ++y)
    for (int x = 0; x < src.width && 2 * x < width; ++x) z.at(2 * x, 2 * y) = src.at(x, y);
  return blur5(z, 2.0);
}

inline std::vector<Plane> gaussian_pyramid(Plane base, int levels) {
  std::vector<Plane> pyr;
  pyr.push_back(std::move(base));
  for (int i = 1; i < levels; ++i) pyr.push_back(pyr_down(pyr.back()));
  return pyr;
}

inline std::vector<Plane> laplacian_pyramid(const Plane& base, int levels) {
  auto g = gaussian_pyramid(base, levels);
  for (int i = 0; i + 1 < levels; ++i) {
    const Plane up = pyr_up(g[i + 1], g[i].width, g[i].height);
    for (std::size_t k = 0; k < up.v.size(); ++k) g[i].v[k] -= up.v[k];
  }
  return g;
}

inline Plane collapse(std::vector<Plane> lap) {
  for (int i = static_cast<int>(lap.size()) - 2; i >= 0; --i) {
    const Plane up = pyr_up(lap[i + 1], lap[i].width, lap[i].height);
    for (std::size_t k = 0; k < up.v.size(); ++k) lap[i].v[k] += up.v[k];
  }
  return lap.front();
}

inline Plane to_plane(const ChannelPlane& c) {
  Plane p(c.width(), c.height());
  for (std::size_t i = 0; i < c.size(); ++i) p.v[i] = c.pixels()[i];
  return p;
}

}  // namespace detail

inline int fusion_levels(int width, int height, const FusionOptions& opts = {}) {
  if (opts.levels > 0) return opts.levels;
  const int m = std::min(width, height);
  return std::max(1, static_cast<int>(std::floor(std::log2(std::max(m, 1)))) - 2);
}

/// Per-pixel fusion weights for each layer, normalized to sum to 1.
inline std::vector<Plane> fusion_weights(const std::vector<Image>& layers,
                                         const FusionOptions& opts = {}) {
  const int w = layers.front().width();
  const int h = layers.front().height();
  const double two_s2 = 2.0 * opts.well_exposed_sigma * opts.well_exposed_sigma;
  std::vector<Plane> weights;
  for (const auto& img : layers) {
    const int nc = img.channels();
    Plane gray(w, h);
    Plane wgt(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double sum = 0.0;
        for (int c = 0; c < nc; ++c) sum += img.at(x, y, c) / 255.0;
        gray.at(x, y) = sum / nc;
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double lap = gray.at(detail::reflect(x - 1, w), y) +
                           gray.at(detail::reflect(x + 1, w), y) +
                           gray.at(x, detail::reflect(y - 1, h)) +
                           gray.at(x, detail::reflect(y + 1, h)) - 4.0 * gray.at(x, y);
        const double contrast = std::abs(lap) + opts.measure_floor;
        double saturation = 1.0;
        double exposure = 1.0;
        if (nc == 3) {
          const double mean = gray.at(x, y);
          double var = 0.0;
          for (int c = 0; c < 3; ++c) {
            const double v = img.at(x, y, c) / 255.0;
            var += (v - mean) * (v - mean);
            exposure *= std::exp(-(v - 0.5) * (v - 0.5) / two_s2);
          }
          saturation = std::sqrt(var / 3.0) + opts.measure_floor;
        } else {
          // A gray pixel is an RGB pixel with three equal channels.
          const double v = gray.at(x, y);
          exposure = std::pow(std::exp(-(v - 0.5) * (v - 0.5) / two_s2), 3.0);
          saturation = opts.measure_floor;
        }
        wgt.at(x, y) = contrast * saturation * exposure;
      }
    weights.push_back(std::move(wgt));
  }
  for (std::size_t i = 0; i < weights.front().v.size(); ++i) {
    double sum = 0.0;
    for (const auto& p : weights) sum += p.v[i];
    for (auto& p : weights)
      p.v[i] = sum > 0.0 ? p.v[i] / sum : 1.0 / static_cast<double>(weights.size());
  }
  return weights;
}

/// Fuses equally sized exposures of one scene into a single 8-bit image.
inline Image fuse_exposures(const std::vector<Image>& layers, const FusionOptions& opts = {}) {
  if (layers.size() < 2) throw InvalidArgument("fuse_exposures: need at least 2 layers");
  for (const auto& l : layers)
    if (!l.same_shape(layers.front()))
      throw InvalidArgument("fuse_exposures: layers differ in shape");
  const int w = layers.front().width();
  const int h = layers.front().height();
  const int levels = fusion_levels(w, h, opts);

  std::vector<std::vector<Plane>> wpyr;
  for (auto& wp : fusion_weights(layers, opts))
    wpyr.push_back(detail::gaussian_pyramid(std::move(wp), levels));

  Image out(w, h, layers.front().channels());
  for (int c = 0; c < out.channels(); ++c) {
    std::vector<Plane> blended;
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const auto lap = detail::laplacian_pyramid(detail::to_plane(layers[k].channel(c)), levels);
      if (blended.empty()) {
        for (const auto& p : lap) blended.emplace_back(p.width, p.height);
      }
      for (int l = 0; l < levels; ++l)
        for (std::size_t i = 0; i < lap[l].v.size(); ++i)
          blended[l].v[i] += wpyr[k][l].v[i] * lap[l].v[i];
    }
    const Plane result = detail::collapse(std::move(blended));
    auto px = out.channel(c).pixels();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = quantize_level(result.v[i]);
  }
  return out;
}

}  // namespace imfkit
