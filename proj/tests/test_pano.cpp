#include <gtest/gtest.h>

#include <cmath>

#include "imfkit/pano.hpp"
#include "imfkit/synth.hpp"
#include "oracles.hpp"

using namespace imfkit;

namespace {

constexpr int kTile = 96;
constexpr int kOverlap = 40;
constexpr int kStep = kTile - kOverlap;

std::vector<OverlapPair> strip_overlaps(int n, int height) {
  std::vector<OverlapPair> o;
  for (int l = 0; l + 1 < n; ++l)
    o.push_back({{kStep, 0, kOverlap, height}, {0, 0, kOverlap, height}});
  return o;
}

Image tile(const Image& master, int l) {
  return crop(master, {l * kStep, 0, kTile, master.height()});
}

Image shifted(const Image& img, int d) {
  Image out = img;
  for (int c = 0; c < out.channels(); ++c)
    for (auto& v : out.channel(c).pixels()) v = static_cast<std::uint8_t>(v + d);
  return out;
}

double mean(const Image& img) {
  double s = 0;
  for (int c = 0; c < img.channels(); ++c)
    for (auto v : img.channel(c).pixels()) s += v;
  return s / (static_cast<double>(img.pixel_count()) * img.channels());
}

// Gains 0.5, 1, 2 over a scene whose radiance tops out at `peak`.
synth::StitchSet bracketed_set(std::uint64_t seed, double peak = 1.0) {
  synth::Rng rng(seed);
  synth::StitchOptions o;
  o.tile_width = 96;
  o.height = 64;
  o.overlap = 40;
  synth::Scene scene =
      synth::make_scene({(3 - 1) * (o.tile_width - o.overlap) + o.tile_width, o.height, 3, 2}, rng);
  for (auto& ch : scene.channels)
    for (auto& v : ch) v *= peak;
  return synth::make_stitch_set(scene, o, rng);
}

std::vector<OverlapPair> set_overlaps(const synth::StitchSet& s) {
  std::vector<OverlapPair> o;
  for (std::size_t l = 0; l < s.a_rects.size(); ++l) o.push_back({s.a_rects[l], s.b_rects[l]});
  return o;
}

}  // namespace

TEST(Pairwise, ChainLengths) {
  synth::Rng rng(71);
  const Image m = oracle::random_image(rng, 2 * kStep + kTile, 32, 3);
  const auto two = estimate_pairwise({tile(m, 0), tile(m, 1)}, strip_overlaps(2, 32));
  EXPECT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].forward.size(), 3u);
  EXPECT_EQ(two[0].backward.size(), 3u);
  const auto three =
      estimate_pairwise({tile(m, 0), tile(m, 1), tile(m, 2)}, strip_overlaps(3, 32));
  EXPECT_EQ(three.size(), 2u);
}

TEST(Pairwise, IdenticalNeighboursGiveIdentity) {
  synth::Rng rng(72);
  const Image img = oracle::random_image(rng, 40, 40, 3, 30, 200);
  const std::vector<OverlapPair> full{{{0, 0, 40, 40}, {0, 0, 40, 40}}};
  const auto chain = estimate_pairwise({img, img}, full);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(chain[0].forward[c], ImfTable::identity());
    EXPECT_EQ(chain[0].backward[c], ImfTable::identity());
  }
}

TEST(Pairwise, SmallOverlapRefused) {
  const Image img(20, 20, 1, 5);
  const std::vector<OverlapPair> tiny{{{0, 0, 15, 15}, {0, 0, 15, 15}}};
  EXPECT_THROW(estimate_pairwise({img, img}, tiny), DomainError);
}

TEST(Pairwise, MissingOverlapMetadata) {
  const Image img(20, 20, 1, 5);
  EXPECT_THROW(estimate_pairwise({img, img, img}, {{{0, 0, 20, 20}, {0, 0, 20, 20}}}),
               InvalidArgument);
  EXPECT_THROW(stitch_hdr({img, img}, {}, 4), InvalidArgument);
  const std::vector<OverlapPair> outside{{{10, 0, 20, 20}, {0, 0, 20, 20}}};
  EXPECT_THROW(estimate_pairwise({img, img}, outside), InvalidArgument);
}

TEST(Pairwise, ChainConsistency) {
  // Clipped highlights cannot be mapped back, so the brightest exposure is
  // kept below saturation here.
  const auto set = bracketed_set(73, 0.45);
  const auto overlaps = set_overlaps(set);
  const auto chain = estimate_pairwise(set.images, overlaps);
  for (std::size_t l = 0; l < chain.size(); ++l) {
    const Image oa = crop(set.images[l], overlaps[l].a_rect);
    for (int c = 0; c < 3; ++c) {
      const auto round = compose_imf(chain[l].backward[c], chain[l].forward[c]);
      const auto h = histogram(oa.channel(c));
      double dev = 0;
      int n = 0;
      for (int z = 0; z < 256; ++z)
        if (h.bins[z] >= 10) {
          dev += std::abs(round.value(z) - z);
          ++n;
        }
      ASSERT_GT(n, 0);
      EXPECT_LE(dev / n, 2.0) << "hop " << l << " channel " << c;
    }
  }
}

TEST(Benchmark, ComposesThroughAdjacentHops) {
  const auto set = bracketed_set(74);
  const auto chain = estimate_pairwise(set.images, set_overlaps(set));
  EXPECT_EQ(table_to_benchmark(chain, 2, 0, 3),
            compose_imf(chain[0].backward, chain[1].backward));
  EXPECT_EQ(table_to_benchmark(chain, 0, 2, 3),
            compose_imf(chain[1].forward, chain[0].forward));
  EXPECT_EQ(table_to_benchmark(chain, 1, 1, 3), identity_tables(3));
  EXPECT_THROW(table_to_benchmark(chain, 3, 0, 3), InvalidArgument);
}

TEST(Benchmark, IdenticalInputsGivePlainMosaic) {
  synth::Rng rng(75);
  const Image img = oracle::random_image(rng, 60, 40, 3);
  const std::vector<Image> images{img, img};
  const std::vector<OverlapPair> full{{{0, 0, 60, 40}, {0, 0, 60, 40}}};
  const auto chain = estimate_pairwise(images, full);
  EXPECT_EQ(synthesize_benchmark(images, full, 8, chain, 0), mosaic(images, full, 8));
  const auto panos = synthesize_all(images, full, 8, chain);
  ASSERT_EQ(panos.size(), 2u);
  EXPECT_EQ(panos[0], panos[1]);
}

TEST(Benchmark, ShiftedTripleRecoversMaster) {
  // Z2 = Z1 + 40 and Z3 = Z2 + 50 on a master whose levels all occur in
  // every overlap, so the benchmark-1 panorama should be the master.
  synth::Rng rng(76);
  const Image master = oracle::random_image(rng, 2 * kStep + kTile, 64, 3, 30, 100);
  const std::vector<Image> images{tile(master, 0), shifted(tile(master, 1), 40),
                                  shifted(tile(master, 2), 90)};
  const auto overlaps = strip_overlaps(3, 64);
  const auto chain = estimate_pairwise(images, overlaps);
  const Image pano = synthesize_benchmark(images, overlaps, 16, chain, 0);
  ASSERT_TRUE(pano.same_shape(master));
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < master.width(); ++x)
        ASSERT_LE(std::abs(pano.at(x, y, c) - master.at(x, y, c)), 1);
}

TEST(Benchmark, CurvedTripleWithinOneLevel) {
  // Quadratic curves with slope above 1 never merge two levels.
  auto quad = [](double a, double b, double z0) {
    ImfTable t;
    for (int z = 0; z < 256; ++z) t.set(z, std::clamp(a * z + b * (z - z0) * (z - z0), 0.0, 255.0));
    return synth::curve_lut(t);
  };
  synth::Rng rng(77);
  const Image master = oracle::random_image(rng, 2 * kStep + kTile, 64, 1, 20, 120);
  const auto g = quad(1.2, 0.003, 0);
  const auto h = quad(1.0, 0.002, 25);
  for (int z = 21; z <= 120; ++z) ASSERT_LT(g[z - 1], g[z]);
  for (int z = g[20] + 1; z <= g[120]; ++z) ASSERT_LT(h[z - 1], h[z]);
  const std::vector<Image> images{tile(master, 0), synth::apply_lut(tile(master, 1), g),
                                  synth::apply_lut(synth::apply_lut(tile(master, 2), g), h)};
  const auto overlaps = strip_overlaps(3, 64);
  const auto chain = estimate_pairwise(images, overlaps);
  const Image pano = synthesize_benchmark(images, overlaps, 16, chain, 0);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < master.width(); ++x)
      ASSERT_LE(std::abs(pano.at(x, y, 0) - master.at(x, y, 0)), 1) << x << "," << y;
}

TEST(Benchmark, FootprintUntouchedOutsideFeather) {
  const auto set = bracketed_set(78);
  const auto overlaps = set_overlaps(set);
  const int feather = 12;
  const auto chain = estimate_pairwise(set.images, overlaps);
  const auto panos = synthesize_all(set.images, overlaps, feather, chain);
  ASSERT_EQ(panos.size(), 3u);
  const Layout lay = compute_layout(set.images, overlaps);
  for (int l = 0; l < 3; ++l) {
    EXPECT_TRUE(panos[l].same_shape(panos[0]));
    const auto [ox, oy] = lay.origin[l];
    for (int y = 0; y < set.images[l].height(); ++y)
      for (int x = 0; x < set.images[l].width(); ++x) {
        const int cx = ox + x;
        // Feather bands sit centred in each overlap.
        bool in_band = false;
        for (int k = 1; k < 3; ++k) {
          const double centre = lay.origin[k].first + kOverlap / 2.0;
          if (std::abs(cx + 0.5 - centre) < feather / 2.0 + 0.5) in_band = true;
        }
        if (in_band) continue;
        // Outside the bands the benchmark owns its pixels only where it is
        // the image on that side of each seam.
        const double left_seam = l > 0 ? lay.origin[l].first + kOverlap / 2.0 : -1e9;
        const double right_seam =
            l < 2 ? lay.origin[l + 1].first + kOverlap / 2.0 : 1e9;
        if (cx + 0.5 < left_seam || cx + 0.5 > right_seam) continue;
        for (int c = 0; c < 3; ++c)
          ASSERT_EQ(panos[l].at(cx, oy + y, c), set.images[l].at(x, y, c));
      }
  }
}

TEST(Benchmark, MeansOrderedByExposure) {
  const auto set = bracketed_set(79);
  const auto overlaps = set_overlaps(set);
  const auto panos = synthesize_all(set.images, overlaps, 16,
                                    estimate_pairwise(set.images, overlaps));
  EXPECT_LT(mean(panos[0]), mean(panos[1]));
  EXPECT_LT(mean(panos[1]), mean(panos[2]));
}

TEST(Layout, OriginsFromOverlaps) {
  const std::vector<Image> images(3, Image(kTile, 20, 1));
  const Layout lay = compute_layout(images, strip_overlaps(3, 20));
  EXPECT_EQ(lay.origin[1], std::make_pair(kStep, 0));
  EXPECT_EQ(lay.origin[2], std::make_pair(2 * kStep, 0));
  EXPECT_EQ(lay.width, 2 * kStep + kTile);
  EXPECT_EQ(lay.height, 20);
}

TEST(Mosaic, UncoveredCanvasIsBlack) {
  // Second image sits lower right, leaving two uncovered corners.
  const std::vector<Image> images{Image(30, 30, 1, 100), Image(30, 30, 1, 100)};
  const std::vector<OverlapPair> o{{{10, 10, 20, 20}, {0, 0, 20, 20}}};
  const Image m = mosaic(images, o, 4);
  EXPECT_EQ(m.width(), 40);
  EXPECT_EQ(m.height(), 40);
  EXPECT_EQ(m.at(39, 0, 0), 0);
  EXPECT_EQ(m.at(0, 39, 0), 0);
  EXPECT_EQ(m.at(20, 20, 0), 100);
}

TEST(Fusion, IdenticalLayersReproduceInput) {
  synth::Rng rng(80);
  const Image img = oracle::random_image(rng, 64, 48, 3);
  EXPECT_EQ(fuse_exposures({img, img}), img);
  const Image g = oracle::random_image(rng, 40, 40, 1);
  EXPECT_EQ(fuse_exposures({g, g, g}), g);
}

TEST(Fusion, BlackAndGray) {
  for (int channels : {1, 3}) {
    const Image black(64, 64, channels, 0);
    const Image gray(64, 64, channels, 128);
    const Image out = fuse_exposures({black, gray});
    for (int c = 0; c < channels; ++c)
      for (int y = 8; y < 56; ++y)
        for (int x = 8; x < 56; ++x) ASSERT_LE(std::abs(out.at(x, y, c) - 128), 1);
  }
}

TEST(Fusion, WeightsNormalized) {
  const auto set = bracketed_set(81);
  std::vector<Image> layers;
  for (const auto& img : set.images) layers.push_back(img);
  const auto w = fusion_weights(layers);
  for (std::size_t i = 0; i < w[0].v.size(); ++i) {
    double s = 0;
    for (const auto& p : w) s += p.v[i];
    ASSERT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(Fusion, MeanBetweenExtremes) {
  const auto set = bracketed_set(82);
  const auto overlaps = set_overlaps(set);
  const auto r = stitch_hdr(set.images, overlaps, 16);
  const double m = mean(r.fused);
  EXPECT_GT(m, mean(r.panos.front()));
  EXPECT_LT(m, mean(r.panos.back()));
}

TEST(Fusion, ShapeMismatchAndCount) {
  EXPECT_THROW(fuse_exposures({Image(8, 8, 1), Image(8, 9, 1)}), InvalidArgument);
  EXPECT_THROW(fuse_exposures({Image(8, 8, 1)}), InvalidArgument);
}

TEST(Fusion, Levels) {
  EXPECT_EQ(fusion_levels(256, 256), 6);
  EXPECT_EQ(fusion_levels(1600, 1000), 7);
  EXPECT_EQ(fusion_levels(4, 4), 1);
}

TEST(Stitch, TwoIdenticalFullOverlapInputs) {
  synth::Rng rng(83);
  const Image img = oracle::random_image(rng, 48, 40, 3);
  const std::vector<OverlapPair> full{{{0, 0, 48, 40}, {0, 0, 48, 40}}};
  EXPECT_EQ(stitch_hdr({img, img}, full, 8).fused, img);
}

TEST(Stitch, DetailFromBothEnds) {
  const auto set = bracketed_set(84);
  const auto r = stitch_hdr(set.images, set_overlaps(set), 16);
  EXPECT_EQ(r.panos.size(), 3u);
  EXPECT_TRUE(r.fused.same_shape(r.panos[0]));
}

TEST(Spec, ParsesAndResolvesPaths) {
  const auto j = nlohmann::json::parse(R"({
    "inputs": ["a.png", "/abs/b.png"],
    "overlaps": [{"a_rect": [56, 0, 40, 64], "b_rect": [0, 0, 40, 64]}],
    "feather": 12
  })");
  const auto spec = parse_stitch_spec(j, "/data");
  EXPECT_EQ(spec.inputs[0], std::filesystem::path("/data/a.png"));
  EXPECT_EQ(spec.inputs[1], std::filesystem::path("/abs/b.png"));
  EXPECT_EQ(spec.overlaps[0].a_rect.x0, 56);
  EXPECT_EQ(spec.feather, 12);
  EXPECT_EQ(parse_stitch_spec(stitch_spec_to_json(spec)).inputs, spec.inputs);
}

TEST(Spec, Errors) {
  using nlohmann::json;
  EXPECT_THROW(parse_stitch_spec(json::array()), InvalidArgument);
  EXPECT_THROW(parse_stitch_spec(json::parse(R"({"inputs": ["a"], "overlaps": []})")),
               InvalidArgument);
  EXPECT_THROW(parse_stitch_spec(json::parse(R"({"inputs": ["a", "b"], "overlaps": []})")),
               InvalidArgument);
  EXPECT_THROW(parse_stitch_spec(json::parse(
                   R"({"inputs": ["a", "b"], "overlaps": [{"a_rect": [0,0,4,4], "b_rect": [0,0,4,5]}]})")),
               InvalidArgument);
  EXPECT_THROW(parse_stitch_spec(json::parse(
                   R"({"inputs": ["a", "b"], "overlaps": [{"a_rect": [0,0,4], "b_rect": [0,0,4,4]}]})")),
               InvalidArgument);
  EXPECT_THROW(parse_stitch_spec(json::parse(
                   R"({"inputs": ["a", "b"], "overlaps": [{"a_rect": [0,0,4,4], "b_rect": [0,0,4,4]}], "feather": -1})")),
               InvalidArgument);
}
