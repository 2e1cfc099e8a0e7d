#pragma once

// Differently exposed panorama synthesis: pairwise IMFs between adjacent
// sub-images, one panorama per brightness benchmark, then exposure fusion.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imfkit/apply.hpp"
#include "imfkit/complete.hpp"
#include "imfkit/error.hpp"
#include "imfkit/estimate.hpp"
#include "imfkit/fusion.hpp"
#include "imfkit/image.hpp"
#include "imfkit/image_io.hpp"
#include "imfkit/imf_table.hpp"
#include "imfkit/metrics.hpp"

namespace imfkit {

/// Smallest overlap (in pixels) accepted for estimation.
inline constexpr std::size_t kMinOverlapArea = 256;

/// Shared area of inputs l and l+1: `a_rect` in image l, `b_rect` in image l+1.
struct OverlapPair {
  RegionRect a_rect;
  RegionRect b_rect;
};

struct StitchSpec {
  std::vector<std::filesystem::path> inputs;  // exposure-ordered
  std::vector<OverlapPair> overlaps;          // inputs.size() - 1 entries
  int feather = 0;
};

namespace detail {

inline RegionRect parse_rect(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4)
    throw InvalidArgument(where + ": expected [x0, y0, w, h]");
  for (const auto& v : j)
    if (!v.is_number_integer())
      throw InvalidArgument(where + ": rectangle entries must be integers");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

}  // namespace detail

/// Reads a stitch spec; relative input paths resolve against `base_dir`.
inline StitchSpec parse_stitch_spec(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw InvalidArgument("stitch spec: top level must be an object");
  if (!j.contains("inputs") || !j["inputs"].is_array())
    throw InvalidArgument("stitch spec: missing 'inputs' array");
  if (!j.contains("overlaps") || !j["overlaps"].is_array())
    throw InvalidArgument("stitch spec: missing 'overlaps' array");
  StitchSpec spec;
  for (std::size_t i = 0; i < j["inputs"].size(); ++i) {
    const auto& p = j["inputs"][i];
    if (!p.is_string())
      throw InvalidArgument("stitch spec: inputs[" + std::to_string(i) + "] must be a path");
    std::filesystem::path path = p.get<std::string>();
    spec.inputs.push_back(path.is_relative() ? base_dir / path : path);
  }
  for (std::size_t i = 0; i < j["overlaps"].size(); ++i) {
    const auto& o = j["overlaps"][i];
    const std::string where = "stitch spec: overlaps[" + std::to_string(i) + "]";
    if (!o.is_object() || !o.contains("a_rect") || !o.contains("b_rect"))
      throw InvalidArgument(where + ": needs 'a_rect' and 'b_rect'");
    spec.overlaps.push_back({detail::parse_rect(o["a_rect"], where + ".a_rect"),
                             detail::parse_rect(o["b_rect"], where + ".b_rect")});
  }
  if (j.contains("feather")) {
    if (!j["feather"].is_number_integer() || j["feather"].get<int>() < 0)
      throw InvalidArgument("stitch spec: 'feather' must be a non-negative integer");
    spec.feather = j["feather"].get<int>();
  }
  if (spec.inputs.size() < 2) throw InvalidArgument("stitch spec: need at least 2 inputs");
  if (spec.overlaps.size() != spec.inputs.size() - 1)
    throw InvalidArgument("stitch spec: " + std::to_string(spec.inputs.size()) +
                          " inputs need " + std::to_string(spec.inputs.size() - 1) +
                          " overlaps, got " + std::to_string(spec.overlaps.size()));
  for (std::size_t i = 0; i < spec.overlaps.size(); ++i) {
    const auto& o = spec.overlaps[i];
    if (o.a_rect.width != o.b_rect.width || o.a_rect.height != o.b_rect.height)
      throw InvalidArgument("stitch spec: overlaps[" + std::to_string(i) +
                            "] rectangles differ in size");
  }
  return spec;
}

inline StitchSpec load_stitch_spec(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  return parse_stitch_spec(j, path.parent_path());
}

inline nlohmann::json stitch_spec_to_json(const StitchSpec& spec) {
  nlohmann::json j;
  j["inputs"] = nlohmann::json::array();
  for (const auto& p : spec.inputs) j["inputs"].push_back(p.generic_string());
  j["overlaps"] = nlohmann::json::array();
  for (const auto& o : spec.overlaps) {
    const auto& a = o.a_rect;
    const auto& b = o.b_rect;
    j["overlaps"].push_back({{"a_rect", {a.x0, a.y0, a.width, a.height}},
                             {"b_rect", {b.x0, b.y0, b.width, b.height}}});
  }
  j["feather"] = spec.feather;
  return j;
}

/// Completed WHA tables for one adjacent pair.
struct HopTables {
  ChannelTables forward;   // l -> l+1
  ChannelTables backward;  // l+1 -> l
};

using TableChain = std::vector<HopTables>;

inline void validate_layout(const std::vector<Image>& images,
                            const std::vector<OverlapPair>& overlaps) {
  if (images.size() < 2) throw InvalidArgument("stitch: need at least 2 images");
  if (overlaps.size() != images.size() - 1)
    throw InvalidArgument("stitch: missing overlap metadata");
  for (std::size_t l = 0; l + 1 < images.size(); ++l) {
    const auto& o = overlaps[l];
    if (images[l].channels() != images[l + 1].channels())
      throw InvalidArgument("stitch: inputs differ in channel count");
    if (o.a_rect.width != o.b_rect.width || o.a_rect.height != o.b_rect.height)
      throw InvalidArgument("stitch: overlap " + std::to_string(l) +
                            " rectangles differ in size");
    if (!o.a_rect.inside(images[l].width(), images[l].height()) ||
        !o.b_rect.inside(images[l + 1].width(), images[l + 1].height()))
      throw InvalidArgument("stitch: overlap " + std::to_string(l) +
                            " lies outside its image");
  }
}

/// WHA tables in both directions for every adjacent pair, completed over the
/// full range.
inline TableChain estimate_pairwise(const std::vector<Image>& images,
                                    const std::vector<OverlapPair>& overlaps) {
  validate_layout(images, overlaps);
  TableChain chain;
  for (std::size_t l = 0; l + 1 < images.size(); ++l) {
    const auto& o = overlaps[l];
    if (o.a_rect.area() < kMinOverlapArea)
      throw DomainError("stitch: overlap " + std::to_string(l) + " has " +
                        std::to_string(o.a_rect.area()) + " pixels, need at least " +
                        std::to_string(kMinOverlapArea));
    const Image oa = crop(images[l], o.a_rect);
    const Image ob = crop(images[l + 1], o.b_rect);
    HopTables hop;
    for (auto& t : estimate_wha(oa, ob)) hop.forward.push_back(complete_table(t));
    for (auto& t : estimate_wha(ob, oa)) hop.backward.push_back(complete_table(t));
    chain.push_back(std::move(hop));
  }
  return chain;
}

/// Λ_{m→l}, composed hop by hop through the adjacent pairs.
inline ChannelTables table_to_benchmark(const TableChain& chain, int m, int l,
                                        int channels) {
  const int n = static_cast<int>(chain.size()) + 1;
  if (m < 0 || m >= n || l < 0 || l >= n)
    throw InvalidArgument("table_to_benchmark: index out of range");
  ChannelTables acc = identity_tables(channels);
  if (m < l) {
    for (int k = m; k < l; ++k) acc = compose_imf(chain[k].forward, acc);
  } else {
    for (int k = m; k > l; --k) acc = compose_imf(chain[k - 1].backward, acc);
  }
  return acc;
}

/// Placement of every input on the panorama canvas.
struct Layout {
  std::vector<std::pair<int, int>> origin;  // top-left of each input
  int width = 0;
  int height = 0;
};

inline Layout compute_layout(const std::vector<Image>& images,
                             const std::vector<OverlapPair>& overlaps) {
  Layout lay;
  lay.origin.push_back({0, 0});
  for (std::size_t l = 0; l < overlaps.size(); ++l) {
    const auto& o = overlaps[l];
    const auto [x, y] = lay.origin.back();
    lay.origin.push_back({x + o.a_rect.x0 - o.b_rect.x0, y + o.a_rect.y0 - o.b_rect.y0});
  }
  int min_x = 0;
  int min_y = 0;
  for (const auto& [x, y] : lay.origin) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    auto& [x, y] = lay.origin[i];
    x -= min_x;
    y -= min_y;
    lay.width = std::max(lay.width, x + images[i].width());
    lay.height = std::max(lay.height, y + images[i].height());
  }
  return lay;
}

/// Weight of image m (versus what is already on the canvas) at canvas
/// coordinate (x, y). The seam sits in the middle of the overlap with image
/// m-1, with a linear ramp `feather` pixels wide across it.
inline double feather_alpha(const Layout& lay, const std::vector<Image>& images, int m,
                            int feather, int x, int y) {
  const auto [px, py] = lay.origin[m - 1];
  const auto [cx, cy] = lay.origin[m];
  const int dx = cx - px;
  const int dy = cy - py;
  const bool horizontal = std::abs(dx) >= std::abs(dy);
  int lo = 0;
  int hi = 0;
  double u = 0.0;
  if (horizontal) {
    lo = std::max(px, cx);
    hi = std::min(px + images[m - 1].width(), cx + images[m].width());
    u = x + 0.5;
  } else {
    lo = std::max(py, cy);
    hi = std::min(py + images[m - 1].height(), cy + images[m].height());
    u = y + 0.5;
  }
  const double centre = 0.5 * (lo + hi);
  const double band = std::min(feather, std::max(hi - lo, 0));
  double a = band > 0.0 ? std::clamp((u - (centre - band / 2.0)) / band, 0.0, 1.0)
                        : (u >= centre ? 1.0 : 0.0);
  if ((horizontal ? dx : dy) < 0) a = 1.0 - a;
  return a;
}

/// Mosaics already tone-corrected images left to right with feathered seams.
/// Canvas pixels covered by no input are 0.
inline Image mosaic(const std::vector<Image>& images, const std::vector<OverlapPair>& overlaps,
                    int feather) {
  validate_layout(images, overlaps);
  const Layout lay = compute_layout(images, overlaps);
  const int channels = images.front().channels();
  std::vector<Plane> acc(channels, Plane(lay.width, lay.height));
  std::vector<char> covered(static_cast<std::size_t>(lay.width) * lay.height, 0);
  for (int m = 0; m < static_cast<int>(images.size()); ++m) {
    const auto [ox, oy] = lay.origin[m];
    const Image& img = images[m];
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) {
        const int cx = ox + x;
        const int cy = oy + y;
        const std::size_t idx = static_cast<std::size_t>(cy) * lay.width + cx;
        const double a = covered[idx] ? feather_alpha(lay, images, m, feather, cx, cy) : 1.0;
        for (int c = 0; c < channels; ++c) {
          double& v = acc[c].v[idx];
          v = (1.0 - a) * v + a * img.at(x, y, c);
        }
        covered[idx] = 1;
      }
  }
  Image out(lay.width, lay.height, channels);
  for (int c = 0; c < channels; ++c) {
    auto px = out.channel(c).pixels();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = quantize_level(acc[c].v[i]);
  }
  return out;
}

/// Panorama whose brightness follows input `benchmark`: every other input is
/// corrected with its composed table toward it; the benchmark is untouched.
inline Image synthesize_benchmark(const std::vector<Image>& images,
                                  const std::vector<OverlapPair>& overlaps, int feather,
                                  const TableChain& chain, int benchmark) {
  if (chain.size() + 1 != images.size())
    throw InvalidArgument("synthesize_benchmark: table chain is incomplete");
  std::vector<Image> corrected;
  for (int m = 0; m < static_cast<int>(images.size()); ++m) {
    if (m == benchmark) {
      corrected.push_back(images[m]);
    } else {
      corrected.push_back(apply_imf(
          images[m], table_to_benchmark(chain, m, benchmark, images[m].channels())));
    }
  }
  return mosaic(corrected, overlaps, feather);
}

/// One panorama per benchmark, in input order.
inline std::vector<Image> synthesize_all(const std::vector<Image>& images,
                                         const std::vector<OverlapPair>& overlaps,
                                         int feather, const TableChain& chain) {
  std::vector<Image> panos;
  for (int l = 0; l < static_cast<int>(images.size()); ++l)
    panos.push_back(synthesize_benchmark(images, overlaps, feather, chain, l));
  return panos;
}

struct StitchResult {
  TableChain chain;
  std::vector<Image> panos;
  Image fused;
  double estimate_seconds = 0.0;
  double synthesize_seconds = 0.0;
  double fuse_seconds = 0.0;
};

inline StitchResult stitch_hdr(const std::vector<Image>& images,
                               const std::vector<OverlapPair>& overlaps, int feather,
                               const FusionOptions& fusion = {}) {
  StitchResult r;
  r.estimate_seconds = time_op([&] { r.chain = estimate_pairwise(images, overlaps); });
  r.synthesize_seconds =
      time_op([&] { r.panos = synthesize_all(images, overlaps, feather, r.chain); });
  r.fuse_seconds = time_op([&] { r.fused = fuse_exposures(r.panos, fusion); });
  return r;
}

inline StitchResult stitch_hdr(const StitchSpec& spec, const FusionOptions& fusion = {}) {
  std::vector<Image> images;
  for (const auto& p : spec.inputs) images.push_back(decode_image(p));
  return stitch_hdr(images, spec.overlaps, spec.feather, fusion);
}

}  // namespace imfkit
