#pragma once

// Filling empty-bin entries of an ImfTable and quantizing it for application.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "imfkit/error.hpp"
#include "imfkit/imf_table.hpp"

namespace imfkit {

struct CompleteOptions {
  /// Clamp filled-in values to [0, 255]. Disable to inspect the raw
  /// interpolation/extrapolation lines.
  bool clamp = true;
};

/// What completion did; slopes are those of the lines used at each end.
struct CompletionDiagnostics {
  int interpolated = 0;
  int extrapolated_low = 0;
  int extrapolated_high = 0;
  double low_slope = 0.0;
  double high_slope = 0.0;
};

/// Fills every absent entry from two present entries (z1, z2) that minimize
/// |z - z1| + |z - z2|: the nearest neighbours on both sides when they exist,
/// otherwise the two nearest entries on the one available side.
inline ImfTable complete_table(const ImfTable& t, const CompleteOptions& opts = {},
                               CompletionDiagnostics* diag = nullptr) {
  const std::vector<int> known = t.present_levels();
  const int n = static_cast<int>(known.size());
  if (n < 2) throw DomainError("under-determined table: fewer than 2 present entries");

  CompletionDiagnostics d;
  auto slope = [&](int a, int b) {
    return (t.value(a) - t.value(b)) / static_cast<double>(a - b);
  };
  d.low_slope = slope(known[0], known[1]);
  d.high_slope = slope(known[n - 1], known[n - 2]);

  ImfTable out = t;
  for (int z = 0; z < kLevels; ++z) {
    if (t.present(z)) continue;
    const auto idx = static_cast<int>(
        std::lower_bound(known.begin(), known.end(), z) - known.begin());
    int z1 = 0;
    int z2 = 0;
    if (idx > 0 && idx < n) {
      z1 = known[idx - 1];
      z2 = known[idx];
      ++d.interpolated;
    } else if (idx == 0) {
      z1 = known[0];
      z2 = known[1];
      ++d.extrapolated_low;
    } else {
      z1 = known[n - 1];
      z2 = known[n - 2];
      ++d.extrapolated_high;
    }
    const double v1 = t.value(z1);
    const double v2 = t.value(z2);
    double v = (z - z1) * (v1 - v2) / static_cast<double>(z1 - z2) + v1;
    if (opts.clamp) v = std::clamp(v, 0.0, static_cast<double>(kMaxLevel));
    out.set(z, v);
  }
  if (diag) *diag = d;
  return out;
}

/// Half-up rounding into the representable range.
inline std::uint8_t quantize_level(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::min(r, static_cast<double>(kMaxLevel)));
}

inline ImfTable quantize_table(const ImfTable& t) {
  if (!t.is_total()) throw DomainError("quantize_table: table is not total");
  ImfTable out;
  for (int z = 0; z < kLevels; ++z) out.set(z, quantize_level(t.value(z)));
  return out;
}

}  // namespace imfkit
