#pragma once

// Applying tables to images and chaining tables across exposures.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "imfkit/complete.hpp"
#include "imfkit/error.hpp"
#include "imfkit/image.hpp"
#include "imfkit/imf_table.hpp"

namespace imfkit {

/// Replaces every pixel z of each channel with round(Λ_c(z)).
inline Image apply_imf(const Image& img, const ChannelTables& tables) {
  if (static_cast<int>(tables.size()) != img.channels())
    throw InvalidArgument("apply_imf: " + std::to_string(tables.size()) +
                          " tables for " + std::to_string(img.channels()) +
                          " channels");
  Image out = img;
  for (int c = 0; c < img.channels(); ++c) {
    if (!tables[c].is_total())
      throw DomainError("apply_imf: table for channel " + std::to_string(c) +
                        " is not total");
    std::array<std::uint8_t, kLevels> lut;
    for (int z = 0; z < kLevels; ++z) lut[z] = quantize_level(tables[c].value(z));
    for (auto& v : out.channel(c).pixels()) v = lut[v];
  }
  return out;
}

/// Evaluates a total table at a real abscissa by linear interpolation between
/// the bracketing integer entries. Arguments outside [0, 255] are clamped.
inline double evaluate(const ImfTable& t, double x) {
  x = std::clamp(x, 0.0, static_cast<double>(kMaxLevel));
  const int lo = std::min(static_cast<int>(std::floor(x)), kMaxLevel - 1);
  const double frac = x - lo;
  return t.value(lo) + frac * (t.value(lo + 1) - t.value(lo));
}

/// (outer ∘ inner)(z) = outer(inner(z)); stays real-valued.
inline ImfTable compose_imf(const ImfTable& outer, const ImfTable& inner) {
  if (!outer.is_total() || !inner.is_total())
    throw DomainError("compose_imf: both tables must be total");
  ImfTable out;
  for (int z = 0; z < kLevels; ++z) out.set(z, evaluate(outer, inner.value(z)));
  return out;
}

inline ChannelTables compose_imf(const ChannelTables& outer, const ChannelTables& inner) {
  if (outer.size() != inner.size())
    throw InvalidArgument("compose_imf: channel count mismatch");
  ChannelTables out;
  for (std::size_t c = 0; c < outer.size(); ++c)
    out.push_back(compose_imf(outer[c], inner[c]));
  return out;
}

}  // namespace imfkit
