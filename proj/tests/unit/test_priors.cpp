#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "segdecide/error.hpp"
#include "segdecide/priors.hpp"
#include "support.hpp"

using namespace segdecide;

namespace {

/// Two-class raw stack whose class-1 channel is `ch` (values in [0, 1]).
PriorStack two_class_stack(std::uint32_t h, std::uint32_t w, const std::vector<double>& ch) {
  std::vector<float> data;
  for (double v : ch) {
    data.push_back(static_cast<float>(1.0 - v));
    data.push_back(static_cast<float>(v));
  }
  return PriorStack(h, w, 2, std::move(data), false, 0.0f);
}

}  // namespace

TEST_CASE("pixel priors count label occurrences") {
  const std::vector<LabelMap> maps = {LabelMap(1, 1, 3, {1}), LabelMap(1, 1, 3, {2})};
  const PriorStack p = compute_pixel_priors(maps, 3);
  CHECK(p.at(0, 0, 0) == 0.0f);
  CHECK(p.at(0, 0, 1) == 0.5f);
  CHECK(p.at(0, 0, 2) == 0.5f);
  CHECK_FALSE(p.smoothed());
}

TEST_CASE("all-background corpus gives a one-hot prior everywhere") {
  const std::vector<LabelMap> maps(3, LabelMap::filled(4, 5, 3, 0));
  const PriorStack p = compute_pixel_priors(maps, 3);
  for (std::size_t i = 0; i < p.pixel_count(); ++i) {
    CHECK(p.pixel(i)[0] == 1.0f);
    CHECK(p.pixel(i)[1] == 0.0f);
    CHECK(p.pixel(i)[2] == 0.0f);
  }
}

TEST_CASE("pixel priors match a per-pixel histogram oracle") {
  testing::Rng rng(201);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LabelMap> maps;
    for (int i = 0; i < 20; ++i) maps.push_back(testing::random_labels(rng, 5, 5, 4));
    const PriorStack p = compute_pixel_priors(maps, 4);
    for (std::uint32_t r = 0; r < 5; ++r) {
      for (std::uint32_t c = 0; c < 5; ++c) {
        int hist[4] = {0, 0, 0, 0};
        for (const auto& m : maps) ++hist[m.at(r, c)];
        double sum = 0.0;
        for (int k = 0; k < 4; ++k) {
          CHECK(p.at(r, c, k) == static_cast<float>(hist[k] / 20.0));
          sum += p.at(r, c, k);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-6);
      }
    }
  }
}

TEST_CASE("prior estimation rejects bad corpora") {
  const std::vector<LabelMap> none;
  CHECK_THROWS_AS(compute_pixel_priors(none, 2), ConfigError);
  CHECK_THROWS_AS(compute_global_priors(none, 2), ConfigError);
  const std::vector<LabelMap> mixed = {LabelMap::filled(2, 2, 2, 0), LabelMap::filled(2, 3, 2, 0)};
  try {
    (void)compute_pixel_priors(mixed, 2);
    FAIL("expected a shape error");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("label map 1") != std::string::npos);
  }
}

TEST_CASE("prior config validation") {
  PriorConfig c;
  CHECK_NOTHROW(c.validate(4));
  c.cutoff = 0.25;
  CHECK_THROWS_AS(c.validate(4), ConfigError);
  c = PriorConfig{};
  c.sigma = -1;
  CHECK_THROWS_AS(c.validate(4), ConfigError);
  c = PriorConfig{};
  c.kernel_radius_sigmas = 0.5;
  CHECK_THROWS_AS(c.validate(4), ConfigError);
}

TEST_CASE("smoothing leaves constant channels unchanged") {
  for (double sigma : {0.0, 0.7, 3.0, 80.0}) {
    const PriorStack raw = two_class_stack(6, 9, std::vector<double>(54, 0.25));
    PriorConfig cfg;
    cfg.sigma = sigma;
    const PriorStack s = smooth_priors(raw, cfg);
    CHECK(s.smoothed());
    for (std::size_t i = 0; i < s.pixel_count(); ++i) {
      CHECK(s.pixel(i)[1] == doctest::Approx(0.25).epsilon(1e-6));
      CHECK(s.pixel(i)[0] == doctest::Approx(0.75).epsilon(1e-6));
    }
  }
}

TEST_CASE("zero channel is floored at the cutoff") {
  const PriorStack raw = two_class_stack(5, 5, std::vector<double>(25, 0.0));
  PriorConfig cfg;
  cfg.sigma = 2;
  const PriorStack s = smooth_priors(raw, cfg);
  for (std::size_t i = 0; i < s.pixel_count(); ++i) CHECK(s.pixel(i)[1] == static_cast<float>(1e-5));
  CHECK(s.cutoff() == static_cast<float>(1e-5));
}

TEST_CASE("impulse smoothing matches dense 2-D convolution") {
  std::vector<double> ch(33 * 33, 0.0);
  ch[16 * 33 + 16] = 1.0;
  PriorConfig cfg;
  cfg.sigma = 2;
  const PriorStack s = smooth_priors(two_class_stack(33, 33, ch), cfg);
  const auto dense = oracle::dense_gaussian(ch, 33, 33, 2.0, 3.0);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    CHECK(std::abs(s.pixel(i)[1] - std::max(dense[i], 1e-5)) <= 1e-6);
  }
}

TEST_CASE("random channels match dense convolution with mirror borders") {
  testing::Rng rng(202);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = static_cast<std::uint32_t>(rng.between(1, 14));
    const auto w = static_cast<std::uint32_t>(rng.between(1, 14));
    std::vector<double> ch(static_cast<std::size_t>(h) * w);
    for (auto& v : ch) v = static_cast<float>(rng.unit());
    PriorConfig cfg;
    cfg.sigma = rng.uniform(0.3, 6.0);
    cfg.kernel_radius_sigmas = rng.uniform(1.0, 4.0);
    const PriorStack s = smooth_priors(two_class_stack(h, w, ch), cfg);
    const auto dense = oracle::dense_gaussian(ch, h, w, cfg.sigma, cfg.kernel_radius_sigmas);
    for (std::size_t i = 0; i < dense.size(); ++i) {
      CHECK(std::abs(s.pixel(i)[1] - std::max(dense[i], 1e-5)) <= 1e-6);
    }
  }
}

TEST_CASE("smoothing preserves interior mass and respects the cutoff") {
  testing::Rng rng(203);
  for (int trial = 0; trial < 10; ++trial) {
    const double sigma = rng.uniform(0.5, 2.0);
    const int radius = static_cast<int>(std::ceil(3 * sigma));
    const std::uint32_t n = 40;
    std::vector<double> ch(n * n, 0.0);
    for (std::uint32_t r = 2 * radius; r < n - 2 * radius; ++r) {
      for (std::uint32_t c = 2 * radius; c < n - 2 * radius; ++c) ch[r * n + c] = static_cast<float>(rng.unit());
    }
    PriorConfig cfg;
    cfg.sigma = sigma;
    cfg.cutoff = 1e-12;
    const PriorStack s = smooth_priors(two_class_stack(n, n, ch), cfg);
    double before = 0, after = 0;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      before += ch[i];
      after += s.pixel(i)[1];
      CHECK(s.pixel(i)[1] >= static_cast<float>(cfg.cutoff));
    }
    CHECK(std::abs(after - before) / ch.size() <= 1e-6);
  }
}

TEST_CASE("smoothing an already smoothed stack fails") {
  const PriorStack raw = two_class_stack(2, 2, {0, 0, 0, 0});
  const PriorStack s = smooth_priors(raw, PriorConfig{});
  CHECK_THROWS_AS(smooth_priors(s, PriorConfig{}), ConfigError);
}

TEST_CASE("kernel radius wider than the image is handled by reflection") {
  const PriorStack raw = two_class_stack(3, 2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  PriorConfig cfg;
  cfg.sigma = 80;
  const PriorStack s = smooth_priors(raw, cfg);
  const auto dense = oracle::dense_gaussian({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, 3, 2, 80, 3);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(s.pixel(i)[1] - dense[i]) <= 1e-6);
}

TEST_CASE("reflect_index mirrors with period 2n") {
  CHECK(reflect_index(-1, 4) == 0);
  CHECK(reflect_index(-2, 4) == 1);
  CHECK(reflect_index(4, 4) == 3);
  CHECK(reflect_index(5, 4) == 2);
  CHECK(reflect_index(8, 4) == 0);
  CHECK(reflect_index(-9, 4) == 0);
  CHECK(reflect_index(3, 1) == 0);
}

TEST_CASE("global priors") {
  SUBCASE("half and half") {
    const std::vector<LabelMap> maps = {LabelMap(1, 2, 2, {0, 1})};
    const GlobalPriors g = compute_global_priors(maps, 2);
    CHECK(g[0] == 0.5);
    CHECK(g[1] == 0.5);
  }
  SUBCASE("mean of the pixel priors") {
    testing::Rng rng(204);
    std::vector<LabelMap> maps;
    for (int i = 0; i < 15; ++i) maps.push_back(testing::blocky_labels(rng, 9, 11, 4, 5));
    const PriorStack p = compute_pixel_priors(maps, 4);
    const GlobalPriors g = compute_global_priors(maps, 4);
    for (int k = 0; k < 4; ++k) {
      double mean = 0.0;
      for (std::size_t i = 0; i < p.pixel_count(); ++i) mean += p.pixel(i)[k];
      mean /= static_cast<double>(p.pixel_count());
      CHECK(std::abs(mean - g[k]) <= 1e-6);
    }
  }
}

TEST_CASE("prior comparison sets") {
  SUBCASE("local equal to global puts every pixel in mask_leq") {
    const GlobalPriors g({0.7, 0.3});
    const PriorStack local = broadcast_global_priors(g, 4, 4, 1e-5f);
    const auto sets = prior_comparison_sets(local, g, 1);
    for (std::size_t i = 0; i < 16; ++i) {
      CHECK(sets.mask_leq[i] == 1);
      CHECK(sets.mask_gt[i] == 0);
    }
  }
  SUBCASE("split exactly at the half") {
    const GlobalPriors g({0.5, 0.5});
    std::vector<double> ch;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 3; ++c) ch.push_back(r < 2 ? 0.5 + 0.01 : 0.5 - 0.01);
    }
    const auto sets = prior_comparison_sets(two_class_stack(4, 3, ch), g, 1);
    for (std::size_t i = 0; i < 12; ++i) CHECK(sets.mask_leq[i] == (i < 6 ? 1 : 0));
  }
  SUBCASE("random stacks agree with elementwise comparison and partition the image") {
    testing::Rng rng(205);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> ch(30);
      for (auto& v : ch) v = static_cast<float>(rng.unit());
      const double gv = rng.unit();
      const GlobalPriors g({1.0 - gv, gv});
      const PriorStack local = two_class_stack(5, 6, ch);
      for (int k = 0; k < 2; ++k) {
        const auto sets = prior_comparison_sets(local, g, k);
        for (std::size_t i = 0; i < 30; ++i) {
          CHECK(sets.mask_leq[i] + sets.mask_gt[i] == 1);
          CHECK(sets.mask_leq[i] == (static_cast<float>(g[k]) <= local.pixel(i)[k] ? 1 : 0));
        }
      }
    }
  }
  SUBCASE("class out of range") {
    const GlobalPriors g({0.5, 0.5});
    CHECK_THROWS_AS(prior_comparison_sets(two_class_stack(1, 1, {0.5}), g, 2), ConfigError);
  }
}
