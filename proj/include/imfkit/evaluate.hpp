#pragma once

// Estimator dispatch and the simulated-misalignment evaluation sweep.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "imfkit/apply.hpp"
#include "imfkit/complete.hpp"
#include "imfkit/error.hpp"
#include "imfkit/estimate.hpp"
#include "imfkit/image.hpp"
#include "imfkit/metrics.hpp"

namespace imfkit {

enum class Method { wha, chm, gc };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::wha: return "wha";
    case Method::chm: return "chm";
    case Method::gc: return "gc";
  }
  return "?";
}

inline Method parse_method(const std::string& name) {
  if (name == "wha") return Method::wha;
  if (name == "chm") return Method::chm;
  if (name == "gc") return Method::gc;
  throw InvalidArgument("unknown method '" + name + "' (wha|chm|gc)");
}

/// Raw per-channel tables from one estimator.
inline ChannelTables estimate_raw(Method m, const Image& overlap_i, const Image& overlap_j) {
  switch (m) {
    case Method::wha: return estimate_wha(overlap_i, overlap_j);
    case Method::chm: return estimate_chm(overlap_i, overlap_j);
    case Method::gc: return estimate_gc(overlap_i, overlap_j);
  }
  throw InvalidArgument("bad method");
}

/// Estimates and fills tables over the full range. GC uses its median
/// empty-value correction only on misaligned overlaps (n_c > 0); aligned
/// overlaps are filled by plain interpolation like WHA.
inline ChannelTables estimate_complete(Method m, const Image& overlap_i,
                                       const Image& overlap_j, int n_c = 0) {
  ChannelTables tables = estimate_raw(m, overlap_i, overlap_j);
  for (auto& t : tables) {
    if (t.is_total()) continue;
    t = (m == Method::gc && n_c > 0) ? gc_correct(t) : complete_table(t);
  }
  return tables;
}

/// An aligned image pair under evaluation.
struct PairInput {
  std::string name;
  Image a;
  Image b;
};

struct SweepOptions {
  std::vector<int> nc_list{0, 2, 4, 6, 8, 10, 12, 14, 16};
  std::vector<Method> methods{Method::wha, Method::chm, Method::gc};
  int threads = 1;
  bool with_ssim = true;
};

struct SweepRow {
  std::string pair;
  std::string direction;  // "a2b": a corrected toward b; "b2a": the reverse
  EvalRecord record;
};

/// Estimates Λ from the simulated overlap of (src, dst), corrects the whole of
/// `src` and scores it against `dst`.
inline EvalRecord evaluate_direction(const Image& src, const Image& dst,
                                     const Image& overlap_src, const Image& overlap_dst,
                                     Method m, int n_c, bool with_ssim = true) {
  Image corrected;
  EvalRecord r;
  r.estimator = to_string(m);
  r.n_c = n_c;
  r.seconds = time_op([&] {
    corrected = apply_imf(src, estimate_complete(m, overlap_src, overlap_dst, n_c));
  });
  r.psnr = psnr(corrected, dst);
  r.ssim = with_ssim ? ssim(corrected, dst) : 0.0;
  return r;
}

/// Worker count from IMFKIT_THREADS, defaulting to the hardware concurrency.
inline int threads_from_env() {
  if (const char* s = std::getenv("IMFKIT_THREADS")) {
    const int n = std::atoi(s);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls `body(i)` for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Runs every (pair, direction, method, n_c) combination. Rows come back in
/// that nesting order regardless of the thread count.
inline std::vector<SweepRow> run_sweep(const std::vector<PairInput>& pairs,
                                       const SweepOptions& opts) {
  if (pairs.empty()) throw InvalidArgument("sweep: no image pairs");
  const std::size_t per_pair = 2 * opts.methods.size() * opts.nc_list.size();
  std::vector<SweepRow> rows(pairs.size() * per_pair);
  parallel_for(pairs.size(), opts.threads, [&](std::size_t p) {
    const auto& in = pairs[p];
    if (!in.a.same_shape(in.b))
      throw InvalidArgument("sweep: pair '" + in.name + "' differs in shape");
    std::size_t slot = p * per_pair;
    for (int dir = 0; dir < 2; ++dir)
      for (Method m : opts.methods)
        for (int n_c : opts.nc_list) {
          const auto [oa, ob] = simulate_overlap(in.a, in.b, n_c);
          SweepRow row;
          row.pair = in.name;
          row.direction = dir == 0 ? "a2b" : "b2a";
          row.record = dir == 0
                           ? evaluate_direction(in.a, in.b, oa, ob, m, n_c, opts.with_ssim)
                           : evaluate_direction(in.b, in.a, ob, oa, m, n_c, opts.with_ssim);
          rows[slot++] = std::move(row);
        }
  });
  return rows;
}

/// Mean PSNR / SSIM / time per (method, n_c), in first-appearance order.
inline std::vector<EvalRecord> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<EvalRecord> out;
  std::vector<int> counts;
  for (const auto& row : rows) {
    const auto& r = row.record;
    auto it = std::find_if(out.begin(), out.end(), [&](const EvalRecord& e) {
      return e.estimator == r.estimator && e.n_c == r.n_c;
    });
    if (it == out.end()) {
      out.push_back({r.estimator, r.n_c, 0.0, 0.0, 0.0});
      counts.push_back(0);
      it = out.end() - 1;
    }
    const auto i = static_cast<std::size_t>(it - out.begin());
    it->psnr += r.psnr;
    it->ssim += r.ssim;
    it->seconds += r.seconds;
    ++counts[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].psnr /= counts[i];
    out[i].ssim /= counts[i];
    out[i].seconds /= counts[i];
  }
  return out;
}

}  // namespace imfkit
