#pragma once

// IMF estimators: weighted histogram averaging (WHA), cumulative histogram
// matching (CHM) and geometric correspondence (GC).

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "imfkit/complete.hpp"
#include "imfkit/error.hpp"
#include "imfkit/image.hpp"
#include "imfkit/imf_table.hpp"

namespace imfkit {

/// ψ(z): index of the last target bin of the segment matched to source bin z.
/// Satisfies C_j(ψ(z) - 1) < C_i(z) <= C_j(ψ(z)), with ψ(-1) = 0.
struct SegmentMap {
  std::array<int, kLevels> psi{};

  int at(int z) const { return z < 0 ? 0 : psi[z]; }
  friend bool operator==(const SegmentMap&, const SegmentMap&) = default;
};

/// Portion of target bin k attributed to one source bin.
struct SubBinMass {
  int k = 0;
  std::uint64_t mass = 0;
  friend bool operator==(const SubBinMass&, const SubBinMass&) = default;
};

namespace detail {

inline void require_equal_totals(const CumHistogram& ci, const CumHistogram& cj) {
  if (ci.total() != cj.total())
    throw InvalidArgument("histogram totals differ (" + std::to_string(ci.total()) +
                          " vs " + std::to_string(cj.total()) + ")");
}

inline void require_same_shape(const Image& a, const Image& b, const char* who) {
  if (!a.same_shape(b))
    throw InvalidArgument(std::string(who) + ": overlap images differ in shape");
}

}  // namespace detail

/// Smallest ψ(z) with C_j(ψ(z)) >= C_i(z), found in one forward sweep. Bins
/// with C_i(z) = 0 get ψ(z) = 0.
inline SegmentMap segment_map(const CumHistogram& ci, const CumHistogram& cj) {
  detail::require_equal_totals(ci, cj);
  SegmentMap s;
  int k = 0;
  for (int z = 0; z < kLevels; ++z) {
    while (cj.cum[k] < ci.cum[z]) ++k;
    s.psi[z] = k;
  }
  return s;
}

/// Target sub-bin masses matched to the non-empty source bin z. The masses are
/// non-negative integers summing to H_i(z).
inline std::vector<SubBinMass> sub_bin_masses(const CumHistogram& ci,
                                              const CumHistogram& cj,
                                              const Histogram& hi,
                                              const Histogram& hj,
                                              const SegmentMap& psi, int z) {
  if (z < 0 || z > kMaxLevel || hi.bins[z] == 0)
    throw InvalidArgument("sub_bin_masses: source bin " + std::to_string(z) +
                          " is empty");
  const int first = psi.at(z - 1);
  const int last = psi.at(z);
  if (first == last) return {{last, hi.bins[z]}};

  std::vector<SubBinMass> out;
  out.reserve(static_cast<std::size_t>(last - first + 1));
  out.push_back({first, cj.at(first) - ci.at(z - 1)});
  for (int k = first + 1; k < last; ++k) out.push_back({k, hj.bins[k]});
  out.push_back({last, ci.at(z) - cj.at(last - 1)});
  return out;
}

/// WHA table from a pair of histograms with equal totals: each non-empty
/// source bin maps to the mass-weighted mean index of its matched segment.
inline ImfTable wha_table(const Histogram& hi, const Histogram& hj) {
  const CumHistogram ci = cumulate(hi);
  const CumHistogram cj = cumulate(hj);
  const SegmentMap psi = segment_map(ci, cj);
  ImfTable t;
  for (int z = 0; z < kLevels; ++z) {
    if (hi.bins[z] == 0) continue;
    std::uint64_t moment = 0;
    for (const auto& m : sub_bin_masses(ci, cj, hi, hj, psi, z))
      moment += m.mass * static_cast<std::uint64_t>(m.k);
    t.set(z, static_cast<double>(moment) / static_cast<double>(hi.bins[z]));
  }
  return t;
}

/// CHM table: Λ(z) = argmin_z' |C_i(z) - C_j(z')|, smallest z' on ties.
inline ImfTable chm_table(const Histogram& hi, const Histogram& hj) {
  const CumHistogram ci = cumulate(hi);
  const CumHistogram cj = cumulate(hj);
  detail::require_equal_totals(ci, cj);
  ImfTable t;
  for (int z = 0; z < kLevels; ++z) {
    std::uint64_t best = UINT64_MAX;
    int best_k = 0;
    for (int k = 0; k < kLevels; ++k) {
      const std::uint64_t d =
          ci.cum[z] > cj.cum[k] ? ci.cum[z] - cj.cum[k] : cj.cum[k] - ci.cum[z];
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    t.set(z, best_k);
  }
  return t;
}

/// CHM recomputed through the segment map: on each non-empty bin pick
/// z'* in {ψ(z) - 1, ψ(z)} minimizing |C_i(z) - C_j(z')|, then move to the
/// first level of z'*'s cumulative plateau so ties resolve to the smallest z'
/// exactly as chm_table does. Only non-empty bins are filled.
inline ImfTable chm_table_from_segments(const Histogram& hi, const Histogram& hj) {
  const CumHistogram ci = cumulate(hi);
  const CumHistogram cj = cumulate(hj);
  const SegmentMap psi = segment_map(ci, cj);
  ImfTable t;
  for (int z = 0; z < kLevels; ++z) {
    if (hi.bins[z] == 0) continue;
    const int upper = psi.at(z);
    int pick = upper;
    if (upper > 0) {
      const std::uint64_t d_lower = ci.cum[z] - cj.at(upper - 1);
      const std::uint64_t d_upper = cj.at(upper) - ci.cum[z];
      if (d_lower <= d_upper) pick = upper - 1;
    }
    while (pick > 0 && cj.at(pick - 1) == cj.at(pick)) --pick;
    t.set(z, pick);
  }
  return t;
}

/// GC table: Λ(z) = mean of the target over the positions where the source
/// equals z. Positional, so the planes must be co-registered.
inline ImfTable gc_table(const ChannelPlane& src, const ChannelPlane& dst) {
  if (src.width() != dst.width() || src.height() != dst.height())
    throw InvalidArgument("gc_table: planes differ in size");
  std::array<std::uint64_t, kLevels> sum{};
  std::array<std::uint64_t, kLevels> count{};
  const auto s = src.pixels();
  const auto d = dst.pixels();
  for (std::size_t i = 0; i < s.size(); ++i) {
    sum[s[i]] += d[i];
    ++count[s[i]];
  }
  ImfTable t;
  for (int z = 0; z < kLevels; ++z)
    if (count[z] != 0)
      t.set(z, static_cast<double>(sum[z]) / static_cast<double>(count[z]));
  return t;
}

/// Runs `per_channel(src_plane, dst_plane)` for each channel of an overlap pair.
template <typename PerChannel>
ChannelTables estimate_per_channel(const Image& overlap_i, const Image& overlap_j,
                                   const char* who, PerChannel&& per_channel) {
  detail::require_same_shape(overlap_i, overlap_j, who);
  ChannelTables out;
  out.reserve(overlap_i.channels());
  for (int c = 0; c < overlap_i.channels(); ++c)
    out.push_back(per_channel(overlap_i.channel(c), overlap_j.channel(c)));
  return out;
}

inline ChannelTables estimate_wha(const Image& overlap_i, const Image& overlap_j) {
  return estimate_per_channel(
      overlap_i, overlap_j, "estimate_wha",
      [](const ChannelPlane& a, const ChannelPlane& b) {
        return wha_table(histogram(a), histogram(b));
      });
}

inline ChannelTables estimate_chm(const Image& overlap_i, const Image& overlap_j) {
  return estimate_per_channel(
      overlap_i, overlap_j, "estimate_chm",
      [](const ChannelPlane& a, const ChannelPlane& b) {
        return chm_table(histogram(a), histogram(b));
      });
}

inline ChannelTables estimate_gc(const Image& overlap_i, const Image& overlap_j) {
  return estimate_per_channel(overlap_i, overlap_j, "estimate_gc", gc_table);
}

struct GcCorrectOptions {
  /// Median window over consecutive present entries (odd).
  int window = 5;
  /// Keep the filtered curve non-decreasing while sweeping outward.
  bool clamp_monotone = true;
  CompleteOptions completion{};
};

namespace detail {

inline double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace detail

/// Empty-value correction for raw GC tables: a median pass over the present
/// entries sweeping from the middle entry outward in both directions, then
/// linear filling of the gaps and slope extension of both ends.
inline ImfTable gc_correct(const ImfTable& raw, const GcCorrectOptions& opts = {}) {
  const std::vector<int> levels = raw.present_levels();
  const int n = static_cast<int>(levels.size());
  if (n < 2) throw DomainError("gc_correct: fewer than 2 present entries");
  if (opts.window < 1 || opts.window % 2 == 0)
    throw InvalidArgument("gc_correct: median window must be odd and positive");

  std::vector<double> raw_values(n);
  for (int i = 0; i < n; ++i) raw_values[i] = raw.value(levels[i]);
  const int half = opts.window / 2;
  auto filtered = [&](int i) {
    const int r = std::min({half, i, n - 1 - i});
    return detail::median_of(
        std::vector<double>(raw_values.begin() + (i - r), raw_values.begin() + (i + r + 1)));
  };

  std::vector<double> smooth(n);
  const int mid = (n - 1) / 2;
  smooth[mid] = filtered(mid);
  for (int i = mid + 1; i < n; ++i) {
    smooth[i] = filtered(i);
    if (opts.clamp_monotone) smooth[i] = std::max(smooth[i], smooth[i - 1]);
  }
  for (int i = mid - 1; i >= 0; --i) {
    smooth[i] = filtered(i);
    if (opts.clamp_monotone) smooth[i] = std::min(smooth[i], smooth[i + 1]);
  }

  ImfTable t;
  for (int i = 0; i < n; ++i) t.set(levels[i], smooth[i]);
  return complete_table(t, opts.completion);
}

}  // namespace imfkit
