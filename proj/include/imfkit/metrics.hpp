#pragma once

// Image quality scores plus timing and evaluation-record helpers.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "imfkit/error.hpp"
#include "imfkit/image.hpp"

namespace imfkit {

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(255^2 / MSE), MSE pooled over all pixels and channels.
/// Identical images give +infinity.
inline double psnr(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw InvalidArgument("psnr: images differ in shape");
  if (a.pixel_count() == 0) throw InvalidArgument("psnr: empty images");
  double sse = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    const auto pa = a.channel(c).pixels();
    const auto pb = b.channel(c).pixels();
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const int d = int(pa[i]) - int(pb[i]);
      s += static_cast<std::uint64_t>(d * d);
    }
    sse += static_cast<double>(s);
  }
  if (sse == 0.0) return kInfinitePsnr;
  const double mse = sse / (static_cast<double>(a.pixel_count()) * a.channels());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// Constants of the structural similarity index.
struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

namespace detail {

inline std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(size);
  const double centre = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double x = i - centre;
    k[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// 'valid' separable filtering: output is (w - n + 1) x (h - n + 1).
inline std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                        const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

inline double ssim_plane(const ChannelPlane& a, const ChannelPlane& b,
                         const SsimParams& p) {
  const int w = a.width();
  const int h = a.height();
  const std::size_t n = a.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a.pixels()[i];
    y[i] = b.pixels()[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto k = gaussian_kernel(p.window, p.sigma);
  const auto mx = filter_valid(x, w, h, k);
  const auto my = filter_valid(y, w, h, k);
  const auto sxx = filter_valid(xx, w, h, k);
  const auto syy = filter_valid(yy, w, h, k);
  const auto sxy = filter_valid(xy, w, h, k);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double mux = mx[i];
    const double muy = my[i];
    const double vx = sxx[i] - mux * mux;
    const double vy = syy[i] - muy * muy;
    const double cov = sxy[i] - mux * muy;
    total += ((2 * mux * muy + c1) * (2 * cov + c2)) /
             ((mux * mux + muy * muy + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

}  // namespace detail

/// Mean SSIM over all fully-contained Gaussian windows, averaged over channels.
inline double ssim(const Image& a, const Image& b, const SsimParams& params = {}) {
  if (!a.same_shape(b)) throw InvalidArgument("ssim: images differ in shape");
  if (std::min(a.width(), a.height()) < params.window)
    throw InvalidArgument("ssim: image smaller than the " +
                          std::to_string(params.window) + "-pixel window");
  double sum = 0.0;
  for (int c = 0; c < a.channels(); ++c)
    sum += detail::ssim_plane(a.channel(c), b.channel(c), params);
  return sum / a.channels();
}

/// Wall-clock seconds spent in `f`.
template <typename F>
double time_op(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  std::forward<F>(f)();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

struct TimingStats {
  double mean = 0.0;
  double stddev = 0.0;
  int runs = 0;
};

template <typename F>
TimingStats time_repeated(F&& f, int runs) {
  if (runs < 1) throw InvalidArgument("time_repeated: runs must be positive");
  std::vector<double> t;
  for (int i = 0; i < runs; ++i) t.push_back(time_op(f));
  TimingStats s;
  s.runs = runs;
  for (double v : t) s.mean += v;
  s.mean /= runs;
  for (double v : t) s.stddev += (v - s.mean) * (v - s.mean);
  s.stddev = runs > 1 ? std::sqrt(s.stddev / (runs - 1)) : 0.0;
  return s;
}

/// One evaluation row.
struct EvalRecord {
  std::string estimator;
  int n_c = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  double seconds = 0.0;
};

inline constexpr const char* kEvalCsvHeader = "estimator,n_c,psnr,ssim,seconds";

inline std::string to_csv_row(const EvalRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.6f,%.6f", r.estimator.c_str(), r.n_c,
                r.psnr, r.ssim, r.seconds);
  return buf;
}

}  // namespace imfkit
