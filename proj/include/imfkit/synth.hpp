#pragma once

// Deterministic synthetic scenes and differently exposed pairs with known
// ground-truth mapping curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "imfkit/complete.hpp"
#include "imfkit/error.hpp"
#include "imfkit/image.hpp"
#include "imfkit/imf_table.hpp"

namespace imfkit::synth {

/// Seeded generator whose output does not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class CurveKind { gamma, sigmoid, shift, affine };

inline CurveKind parse_curve(const std::string& name) {
  if (name == "gamma") return CurveKind::gamma;
  if (name == "sigmoid") return CurveKind::sigmoid;
  if (name == "shift") return CurveKind::shift;
  if (name == "affine") return CurveKind::affine;
  throw InvalidArgument("unknown curve '" + name + "' (gamma|sigmoid|shift|affine)");
}

/// Exposure curve on 0..255. `param` is γ for gamma, the slope scale for
/// sigmoid, the offset for shift and the gain for affine.
inline ImfTable make_curve(CurveKind kind, double param) {
  ImfTable t;
  constexpr double top = kMaxLevel;
  for (int z = 0; z < kLevels; ++z) {
    double v = 0.0;
    switch (kind) {
      case CurveKind::gamma:
        v = top * std::pow(z / top, param);
        break;
      case CurveKind::sigmoid: {
        auto s = [&](double x) { return 1.0 / (1.0 + std::exp(-(x - 128.0) / param)); };
        v = top * (s(z) - s(0)) / (s(top) - s(0));
        break;
      }
      case CurveKind::shift:
        v = z + param;
        break;
      case CurveKind::affine:
        v = param * z;
        break;
    }
    t.set(z, std::clamp(v, 0.0, top));
  }
  return t;
}

/// Integer version of a curve, as a camera would record it.
inline std::array<std::uint8_t, kLevels> curve_lut(const ImfTable& curve) {
  std::array<std::uint8_t, kLevels> lut{};
  for (int z = 0; z < kLevels; ++z) lut[z] = quantize_level(curve.value(z));
  return lut;
}

inline ImfTable lut_table(const std::array<std::uint8_t, kLevels>& lut) {
  ImfTable t;
  for (int z = 0; z < kLevels; ++z) t.set(z, lut[z]);
  return t;
}

/// Stationary band-limited texture stretched to [0, 1]. `grain` is the box
/// blur radius applied (twice) to white noise.
inline std::vector<double> texture(int width, int height, int grain, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  std::vector<double> tmp(n);
  auto blur = [&](std::vector<double>& img) {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        double s = 0.0;
        for (int d = -grain; d <= grain; ++d)
          s += img[static_cast<std::size_t>(y) * width + std::clamp(x + d, 0, width - 1)];
        tmp[static_cast<std::size_t>(y) * width + x] = s;
      }
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        double s = 0.0;
        for (int d = -grain; d <= grain; ++d)
          s += tmp[static_cast<std::size_t>(std::clamp(y + d, 0, height - 1)) * width + x];
        img[static_cast<std::size_t>(y) * width + x] = s;
      }
  };
  if (grain > 0) {
    blur(v);
    blur(v);
  }
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const double lo = *mn;
  const double span = std::max(*mx - lo, 1e-12);
  for (auto& x : v) x = (x - lo) / span;
  return v;
}

struct SceneOptions {
  int width = 128;
  int height = 128;
  int channels = 3;
  int grain = 2;
};

/// Continuous scene radiance in [0, 1], one texture per channel.
struct Scene {
  int width = 0;
  int height = 0;
  std::vector<std::vector<double>> channels;
};

inline Scene make_scene(const SceneOptions& o, Rng& rng) {
  Scene s{o.width, o.height, {}};
  for (int c = 0; c < o.channels; ++c) s.channels.push_back(texture(o.width, o.height, o.grain, rng));
  return s;
}

/// Records a scene: each channel value r becomes round(curve(lo + (hi - lo) r)
/// + noise), with the curve evaluated between its integer entries.
inline Image expose(const Scene& s, double lo, double hi, const ImfTable& curve,
                    double noise, Rng& rng) {
  std::vector<ChannelPlane> planes;
  for (const auto& ch : s.channels) {
    ChannelPlane p(s.width, s.height);
    auto px = p.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
      const double x = std::clamp(lo + (hi - lo) * ch[i], 0.0, static_cast<double>(kMaxLevel));
      const int k = std::min(static_cast<int>(x), kMaxLevel - 1);
      const double v = curve.value(k) + (x - k) * (curve.value(k + 1) - curve.value(k));
      px[i] = quantize_level(noise > 0.0 ? v + noise * rng.normal() : v);
    }
    planes.push_back(std::move(p));
  }
  return Image(std::move(planes));
}

/// Overwrites pixels at random positions so every level 0..255 occurs in every
/// channel. Needs at least 256 pixels.
inline void ensure_all_levels(Image& img, Rng& rng) {
  if (img.pixel_count() < static_cast<std::size_t>(kLevels))
    throw InvalidArgument("ensure_all_levels: image smaller than 256 pixels");
  for (int c = 0; c < img.channels(); ++c) {
    auto px = img.channel(c).pixels();
    std::vector<std::size_t> idx(px.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (int z = 0; z < kLevels; ++z) {
      const std::size_t pick =
          z + static_cast<std::size_t>(rng.uniform() * static_cast<double>(idx.size() - z));
      std::swap(idx[z], idx[pick]);
      px[idx[z]] = static_cast<std::uint8_t>(z);
    }
  }
}

/// Maps every channel through an integer LUT.
inline Image apply_lut(const Image& img, const std::array<std::uint8_t, kLevels>& lut) {
  Image out = img;
  for (int c = 0; c < out.channels(); ++c)
    for (auto& v : out.channel(c).pixels()) v = lut[v];
  return out;
}

inline Image add_noise(const Image& img, double sigma, Rng& rng) {
  Image out = img;
  if (sigma <= 0.0) return out;
  for (int c = 0; c < out.channels(); ++c)
    for (auto& v : out.channel(c).pixels()) v = quantize_level(v + sigma * rng.normal());
  return out;
}

/// A differently exposed aligned pair with its ground-truth mapping.
struct ExposurePair {
  Image dark;
  Image bright;
  ImfTable curve;  // dark -> bright
};

struct PairOptions {
  /// Dark exposure range the scene is mapped onto.
  double lo = 0.0;
  double hi = 255.0;
  double noise = 1.0;
};

/// `dark` records the scene linearly over [lo, hi]; `bright` records the
/// same radiance through `curve` applied to the dark response. Both carry
/// independent Gaussian noise.
inline ExposurePair make_pair(const Scene& scene, const ImfTable& curve,
                              const PairOptions& o, Rng& rng) {
  ExposurePair p;
  p.curve = curve;
  p.dark = expose(scene, o.lo, o.hi, ImfTable::identity(), o.noise, rng);
  p.bright = expose(scene, o.lo, o.hi, curve, o.noise, rng);
  return p;
}

/// Camera response for a relative exposure `gain`: 255 * min(1, gain r)^(1/2.2)
/// on radiance r in [0, 1].
inline double camera_response(double radiance, double gain) {
  return kMaxLevel * std::pow(std::clamp(gain * radiance, 0.0, 1.0), 1.0 / 2.2);
}

/// Ground-truth mapping from the exposure with gain `from` to the one with gain
/// `to` under camera_response.
inline ImfTable exposure_curve(double from, double to) {
  ImfTable t;
  for (int z = 0; z < kLevels; ++z) {
    const double radiance = std::pow(z / 255.0, 2.2) / from;
    t.set(z, camera_response(radiance, to));
  }
  return t;
}

/// Sub-images of one wide scene, each recorded with its own exposure gain,
/// plus the overlap geometry between neighbours.
struct StitchSet {
  std::vector<Image> images;
  std::vector<RegionRect> a_rects;  // overlap in image l
  std::vector<RegionRect> b_rects;  // same area in image l + 1
  std::vector<double> gains;
  int scene_width = 0;
};

struct StitchOptions {
  int tile_width = 160;
  int height = 128;
  int overlap = 48;
  int grain = 2;
  double noise = 0.5;
  std::vector<double> gains{0.5, 1.0, 2.0};
};

/// Cuts `radiance` (single or multi channel, values in [0, 1], width
/// tiles * (tile_width - overlap) + overlap) into horizontally overlapping
/// tiles and exposes tile l with gains[l].
inline StitchSet make_stitch_set(const Scene& radiance, const StitchOptions& o, Rng& rng) {
  const int n = static_cast<int>(o.gains.size());
  const int step = o.tile_width - o.overlap;
  if (n < 2 || step <= 0 || radiance.height != o.height ||
      radiance.width != (n - 1) * step + o.tile_width)
    throw InvalidArgument("make_stitch_set: scene size does not match the tiling");
  StitchSet set;
  set.gains = o.gains;
  set.scene_width = radiance.width;
  for (int l = 0; l < n; ++l) {
    std::vector<ChannelPlane> planes;
    for (const auto& ch : radiance.channels) {
      ChannelPlane p(o.tile_width, o.height);
      for (int y = 0; y < o.height; ++y)
        for (int x = 0; x < o.tile_width; ++x) {
          const double r = ch[static_cast<std::size_t>(y) * radiance.width + l * step + x];
          double v = camera_response(r, o.gains[l]);
          if (o.noise > 0.0) v += o.noise * rng.normal();
          p.at(x, y) = quantize_level(v);
        }
      planes.push_back(std::move(p));
    }
    set.images.emplace_back(std::move(planes));
    if (l + 1 < n) {
      set.a_rects.push_back({step, 0, o.overlap, o.height});
      set.b_rects.push_back({0, 0, o.overlap, o.height});
    }
  }
  return set;
}

}  // namespace imfkit::synth
