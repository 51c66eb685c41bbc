#include <doctest.h>

#include <cmath>
#include <set>

#include "../oracles/oracles.hpp"
#include "../support.hpp"
#include "tpsr/error.hpp"
#include "tpsr/image.hpp"
#include "tpsr/patch.hpp"
#include "tpsr/png_io.hpp"
#include "tpsr/resize.hpp"

using namespace tpsr;

TEST_SUITE("imaging") {

TEST_CASE("load_image scales 8-bit samples to [0,1]") {
  testing::TempDir dir;
  png::write_u8(dir / "px.png", 3, 1, 1, {255, 0, 128});
  const ImageTensor img = load_image(dir / "px.png");
  REQUIRE(img.height() == 1);
  REQUIRE(img.width() == 3);
  for (int c = 0; c < 3; ++c) {
    CHECK(img(0, 0, c) == 1.0f);
    CHECK(img(0, 1, c) == 0.0f);
    CHECK(img(0, 2, c) == static_cast<float>(128.0 / 255.0));
  }
}

TEST_CASE("load_image reads 16-bit PNGs and rejects alpha layouts") {
  testing::TempDir dir;
  // 16-bit RGB, one pixel: 65535, 0, 32768
  testing::write_raw_png(dir / "deep.png", 1, 1, 2, 16, {0xff, 0xff, 0x00, 0x00, 0x80, 0x00});
  const ImageTensor img = load_image(dir / "deep.png");
  CHECK(img(0, 0, 0) == 1.0f);
  CHECK(img(0, 0, 1) == 0.0f);
  CHECK(img(0, 0, 2) == doctest::Approx(32768.0 / 65535.0).epsilon(1e-7));

  testing::write_raw_png(dir / "ga.png", 1, 1, 4, 8, {10, 255});
  CHECK_THROWS_AS(load_image(dir / "ga.png"), DataError);
}

TEST_CASE("load_image errors name the path") {
  testing::TempDir dir;
  const auto missing = dir / "nope.png";
  try {
    load_image(missing);
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("nope.png") != std::string::npos);
  }
  std::ofstream(dir / "junk.png") << "not a png";
  try {
    load_image(dir / "junk.png");
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("junk.png") != std::string::npos);
  }
}

TEST_CASE("save_image quantizes with round-half-away and clamps") {
  testing::TempDir dir;
  ImageTensor half(2, 2, 0.5f);
  save_image(half, dir / "half.png");
  const auto decoded = png::read(dir / "half.png");
  CHECK(decoded.bit_depth == 8);
  CHECK(decoded.channels == 3);
  for (auto s : decoded.samples) CHECK(s == 128);

  ImageTensor hot(1, 1, 1.2f);
  save_image(hot, dir / "hot.png");
  for (auto s : png::read(dir / "hot.png").samples) CHECK(s == 255);
  CHECK(quantize_u8(-0.3f) == 0);
}

TEST_CASE("save/load round trip stays within one quantization step") {
  testing::TempDir dir;
  std::mt19937_64 rng(3);
  const ImageTensor img = testing::random_image(17, 23, rng);
  save_image(img, dir / "rt.png");
  const ImageTensor back = load_image(dir / "rt.png");
  REQUIRE(back.same_shape(img));
  double worst = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) worst = std::max(worst, std::abs(double(img.values()[i]) - back.values()[i]));
  CHECK(worst <= 1.0 / 255.0 + 1e-7);
}

TEST_CASE("rgb_to_luma uses BT.601 weights") {
  ImageTensor img(1, 3);
  for (int c = 0; c < 3; ++c) img(0, 0, c) = 1.0f;
  img(0, 1, 0) = 1.0f;
  img(0, 2, 0) = 0.2f;
  img(0, 2, 1) = 0.7f;
  img(0, 2, 2) = 0.4f;
  const auto y = rgb_to_luma(img);
  CHECK(y(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(y(0, 1) == doctest::Approx(0.299).epsilon(1e-7));
  CHECK(y(0, 2) == doctest::Approx(0.299 * 0.2f + 0.587 * 0.7f + 0.114 * 0.4f).epsilon(1e-6));
}

TEST_CASE("cubic kernel and output extents") {
  CHECK(cubic_kernel(0.0) == 1.0);
  CHECK(cubic_kernel(1.0) == 0.0);
  CHECK(cubic_kernel(2.0) == 0.0);
  CHECK(cubic_kernel(0.5) == doctest::Approx(0.5625));
  CHECK(cubic_kernel(1.5) == doctest::Approx(-0.0625));
  CHECK(resized_extent(96, 0.25) == 24);
  CHECK(resized_extent(10, 0.25) == 3);
  CHECK(resized_extent(24, 4.0) == 96);
  CHECK_THROWS_AS(resize_bicubic(ImageTensor(4, 4), {0.0, true}), DataError);
}

TEST_CASE("resize preserves constants and scale 1 is the identity") {
  std::mt19937_64 rng(11);
  for (double scale : {0.25, 0.5, 0.75, 1.5, 2.0, 4.0}) {
    for (bool aa : {true, false}) {
      const ImageTensor c(13, 9, 0.3721f);
      const ImageTensor out = resize_bicubic(c, {scale, aa});
      for (float v : out.values()) CHECK(v == doctest::Approx(0.3721).epsilon(1e-6));
    }
  }
  const ImageTensor img = testing::random_image(7, 12, rng);
  const ImageTensor same = resize_bicubic(img, {1.0, true});
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(same.values()[i] == doctest::Approx(img.values()[i]).epsilon(1e-6));
}

TEST_CASE("8x8 horizontal ramp downscaled by 4 matches the dense-matrix oracle") {
  ImageTensor ramp(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      for (int c = 0; c < 3; ++c) ramp(y, x, c) = static_cast<float>(x / 7.0);
  const ImageTensor got = resize_bicubic(ramp, {0.25, true});
  const ImageTensor want = oracle::resize(ramp, 0.25, true);
  REQUIRE(got.height() == 2);
  REQUIRE(got.width() == 2);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got.values()[i] - want.values()[i]) <= 1e-6);
  // Rows are identical for a horizontal ramp; the right column is brighter.
  CHECK(got(0, 0, 0) == got(1, 0, 0));
  CHECK(got(0, 1, 0) > got(0, 0, 0));
}

TEST_CASE("resize matches the dense-matrix oracle on random small images") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> side(1, 16);
  const double scales[] = {0.25, 0.5, 0.75, 1.5, 2.0, 3.0, 4.0};
  for (int trial = 0; trial < 60; ++trial) {
    const ImageTensor img = testing::random_image(side(rng), side(rng), rng);
    const double scale = scales[trial % 7];
    const bool aa = trial % 2 == 0;
    const ImageTensor got = resize_bicubic(img, {scale, aa});
    const ImageTensor want = oracle::resize(img, scale, aa);
    REQUIRE(got.same_shape(want));
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, double(std::abs(got.values()[i] - want.values()[i])));
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("antialias widens the kernel only on downscale") {
  const AxisWeights down = axis_weights(32, 8, 0.25, true);
  const AxisWeights plain = axis_weights(32, 8, 0.25, false);
  CHECK(down.indices.front().size() > plain.indices.front().size());
  const AxisWeights up_aa = axis_weights(8, 32, 4.0, true);
  const AxisWeights up = axis_weights(8, 32, 4.0, false);
  CHECK(up_aa.weights == up.weights);
  for (const auto& row : down.weights) {
    double s = 0.0;
    for (double w : row) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("bicubic degradation lands on the 8-bit grid") {
  std::mt19937_64 rng(8);
  const ImageTensor hr = testing::random_image(32, 24, rng);
  const ImageTensor lr = bicubic_degrade(hr, 4);
  CHECK(lr.height() == 8);
  CHECK(lr.width() == 6);
  for (float v : lr.values()) CHECK(std::abs(v * 255.0 - std::round(v * 255.0)) < 1e-4);
  CHECK(bicubic_round_trip(hr, 4).same_shape(hr));
}

TEST_CASE("patch sampling: single placement, determinism, coverage, invariants") {
  std::mt19937_64 rng(1);
  const ImageTensor small = testing::random_image(96, 96, rng);
  ObbLabel small_obb(96, 96, Region::kBackground);
  const PatchPair only = sample_patch_pair(small, small_obb, std::uint64_t{42});
  CHECK(only.y0 == 0);
  CHECK(only.x0 == 0);
  CHECK(only.hr == small);

  const ImageTensor big = testing::random_image(256, 256, rng);
  ObbLabel big_obb(256, 256);
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) big_obb(y, x) = static_cast<Region>((y / 7 + x / 5) % 3);
  const PatchPair a = sample_patch_pair(big, big_obb, std::uint64_t{9});
  const PatchPair b = sample_patch_pair(big, big_obb, std::uint64_t{9});
  CHECK(a.y0 == b.y0);
  CHECK(a.x0 == b.x0);
  CHECK(a.hr == b.hr);
  CHECK(a.lr == b.lr);
  CHECK(a.obb == b.obb);

  std::mt19937_64 draws(77);
  std::set<std::pair<int, int>> offsets;
  for (int i = 0; i < 1000; ++i) {
    const PatchPair p = sample_patch_pair(big, big_obb, draws);
    CHECK(p.y0 % 4 == 0);
    CHECK(p.x0 % 4 == 0);
    offsets.emplace(p.y0, p.x0);
    if (i < 5) {
      CHECK(p.hr.height() == 96);
      CHECK(p.lr.height() == 24);
      CHECK(p.lr.width() == 24);
      CHECK(p.lr == resize_bicubic(p.hr, {0.25, true}));
      CHECK(p.obb.height() == p.hr.height());
      CHECK(p.obb(3, 5) == big_obb(p.y0 + 3, p.x0 + 5));
      CHECK(p.hr(10, 20, 1) == big(p.y0 + 10, p.x0 + 20, 1));
    }
  }
  CHECK(offsets.size() > 50);

  CHECK_THROWS_AS(sample_patch_pair(testing::random_image(64, 128, rng), ObbLabel(64, 128), std::uint64_t{1}), DataError);
}

}  // TEST_SUITE
