#include <gtest/gtest.h>

#include "imfkit/evaluate.hpp"
#include "imfkit/synth.hpp"

using namespace imfkit;

namespace {

PairInput synthetic_pair(std::uint64_t seed, const std::string& name) {
  synth::Rng rng(seed);
  synth::SceneOptions so;
  so.width = so.height = 64;
  const auto scene = synth::make_scene(so, rng);
  synth::PairOptions po;
  po.hi = 120;
  const auto p = synth::make_pair(scene, synth::make_curve(synth::CurveKind::gamma, 0.6), po, rng);
  return {name, p.dark, p.bright};
}

}  // namespace

TEST(Method, ParseRoundTrip) {
  for (Method m : {Method::wha, Method::chm, Method::gc})
    EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_THROW(parse_method("sift"), InvalidArgument);
}

TEST(EstimateComplete, AlwaysTotal) {
  const auto p = synthetic_pair(1, "p");
  for (Method m : {Method::wha, Method::chm, Method::gc})
    for (int nc : {0, 8}) {
      const auto [oa, ob] = simulate_overlap(p.a, p.b, nc);
      for (const auto& t : estimate_complete(m, oa, ob, nc)) EXPECT_TRUE(t.is_total());
    }
}

TEST(Sweep, RecordCount) {
  SweepOptions o;
  o.methods = {Method::wha, Method::gc};
  o.with_ssim = false;
  const auto rows = run_sweep({synthetic_pair(2, "p0")}, o);
  ASSERT_EQ(rows.size(), 36u);
  EXPECT_EQ(rows.front().direction, "a2b");
  EXPECT_EQ(rows.front().record.estimator, "wha");
  EXPECT_EQ(rows.front().record.n_c, 0);
  EXPECT_EQ(rows[8].record.n_c, 16);
  EXPECT_EQ(rows[9].record.estimator, "gc");
  EXPECT_EQ(rows[18].direction, "b2a");
  const auto agg = aggregate(rows);
  EXPECT_EQ(agg.size(), 18u);
}

TEST(Sweep, IdenticalAcrossThreadCounts) {
  const std::vector<PairInput> pairs{synthetic_pair(3, "p0"), synthetic_pair(4, "p1"),
                                     synthetic_pair(5, "p2")};
  SweepOptions o;
  o.nc_list = {0, 6};
  const auto one = run_sweep(pairs, o);
  o.threads = 3;
  const auto three = run_sweep(pairs, o);
  ASSERT_EQ(one.size(), three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].pair, three[i].pair);
    EXPECT_EQ(one[i].direction, three[i].direction);
    EXPECT_EQ(one[i].record.estimator, three[i].record.estimator);
    EXPECT_EQ(one[i].record.n_c, three[i].record.n_c);
    EXPECT_EQ(one[i].record.psnr, three[i].record.psnr);
    EXPECT_EQ(one[i].record.ssim, three[i].record.ssim);
  }
}

TEST(Sweep, ErrorsPropagate) {
  EXPECT_THROW(run_sweep({}, {}), InvalidArgument);
  PairInput bad{"bad", Image(32, 32, 3), Image(32, 31, 3)};
  SweepOptions o;
  o.threads = 2;
  EXPECT_THROW(run_sweep({synthetic_pair(6, "ok"), bad}, o), InvalidArgument);
}

TEST(Aggregate, Means) {
  std::vector<SweepRow> rows{{"p", "a2b", {"wha", 0, 30, 0.8, 1}},
                             {"p", "b2a", {"wha", 0, 34, 0.9, 3}},
                             {"p", "a2b", {"gc", 0, 20, 0.5, 2}}};
  const auto agg = aggregate(rows);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].estimator, "wha");
  EXPECT_DOUBLE_EQ(agg[0].psnr, 32);
  EXPECT_DOUBLE_EQ(agg[0].ssim, 0.85);
  EXPECT_DOUBLE_EQ(agg[0].seconds, 2);
  EXPECT_DOUBLE_EQ(agg[1].psnr, 20);
}

TEST(Threads, ParallelForVisitsEveryIndexOnce) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
}
