#include <algorithm>
#include <array>

#include "doctest.h"
#include "oracles.hpp"
#include "segdecide/components.hpp"
#include "support.hpp"

using namespace segdecide;

namespace {

LabelMap paint(std::uint32_t h, std::uint32_t w, int n,
               std::initializer_list<std::array<std::uint32_t, 5>> rects) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w, 0);
  for (const auto& [cls, top, left, rh, rw] : rects) {
    for (std::uint32_t r = top; r < top + rh; ++r) {
      for (std::uint32_t c = left; c < left + rw; ++c) data[r * w + c] = static_cast<std::uint8_t>(cls);
    }
  }
  return LabelMap(h, w, n, std::move(data));
}

std::vector<oracle::PixelSet> of_class(std::vector<oracle::PixelSet> sets, int cls) {
  std::erase_if(sets, [cls](const oracle::PixelSet& s) { return s.class_id != cls; });
  return sets;
}

void check_segment_invariants(const ComponentSet& set, const LabelMap& labels) {
  for (const auto& seg : set.segments) {
    std::uint64_t size = 0;
    for (std::size_t i = 0; i < seg.runs.size(); ++i) {
      const auto& run = seg.runs[i];
      size += run.length();
      CHECK(run.row >= seg.bbox.min_row);
      CHECK(run.row <= seg.bbox.max_row);
      CHECK(run.col_begin >= seg.bbox.min_col);
      CHECK(run.col_end <= seg.bbox.max_col);
      for (std::uint32_t c = run.col_begin; c <= run.col_end; ++c) CHECK(labels.at(run.row, c) == seg.class_id);
      if (i > 0) {
        const auto& prev = seg.runs[i - 1];
        CHECK((prev.row < run.row || prev.col_end + 1 < run.col_begin));
      }
    }
    CHECK(size == seg.size);
    CHECK(size >= 1);
  }
  const auto index = render_index(set);
  std::uint64_t covered = 0;
  for (auto i : index) covered += i >= 0 ? 1 : 0;
  std::uint64_t total = 0;
  for (const auto& seg : set.segments) total += seg.size;
  CHECK(covered == total);  // pairwise disjoint
}

}  // namespace

TEST_CASE("single-class map is one segment") {
  const auto set = label_components(LabelMap::filled(7, 9, 2, 1), Connectivity::eight);
  REQUIRE(set.segments.size() == 1);
  CHECK(set.segments[0].size == 63);
  CHECK(set.segments[0].class_id == 1);
  CHECK(set.segments[0].bbox == BoundingBox{0, 0, 6, 8});
}

TEST_CASE("checkerboard") {
  std::vector<std::uint8_t> data;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 5; ++c) data.push_back(static_cast<std::uint8_t>((r + c) % 2));
  }
  const LabelMap m(6, 5, 2, data);
  CHECK(label_components(m, Connectivity::four).segments.size() == 30);
  CHECK(label_components(m, Connectivity::eight).segments.size() == 2);
}

TEST_CASE("labeling matches recursive flood fill") {
  testing::Rng rng(401);
  for (int trial = 0; trial < 300; ++trial) {
    const auto h = static_cast<std::uint32_t>(rng.between(1, 12));
    const auto w = static_cast<std::uint32_t>(rng.between(1, 12));
    const int n = rng.between(1, 3);
    const LabelMap m = trial % 2 ? testing::random_labels(rng, h, w, n)
                                 : testing::blocky_labels(rng, h, w, n, rng.between(0, 6));
    for (int conn : {4, 8}) {
      const auto set = label_components(m, static_cast<Connectivity>(conn));
      CHECK(oracle::pixel_sets(set) == oracle::flood_fill(m, conn));
      check_segment_invariants(set, m);
      std::uint64_t total = 0;
      for (const auto& s : set.segments) total += s.size;
      CHECK(total == m.pixel_count());
    }
  }
}

TEST_CASE("segments are ordered by their first pixel") {
  testing::Rng rng(402);
  const LabelMap m = testing::random_labels(rng, 10, 10, 3);
  const auto set = label_components(m, Connectivity::eight);
  for (std::size_t i = 1; i < set.segments.size(); ++i) {
    const auto& a = set.segments[i - 1].runs.front();
    const auto& b = set.segments[i].runs.front();
    CHECK(std::pair(a.row, a.col_begin) < std::pair(b.row, b.col_begin));
  }
}

TEST_CASE("small components are dropped below min_size") {
  const LabelMap m = paint(10, 20, 3, {{1, 0, 0, 3, 3}, {2, 5, 5, 2, 5}});
  const auto filtered = filter_small_components(label_components(m, Connectivity::eight), 10);
  CHECK(filtered.provenance == Provenance::filtered);
  CHECK(std::none_of(filtered.segments.begin(), filtered.segments.end(),
                     [](const Segment& s) { return s.class_id == 1; }));
  CHECK(std::count_if(filtered.segments.begin(), filtered.segments.end(),
                      [](const Segment& s) { return s.class_id == 2 && s.size == 10; }) == 1);

  ComponentSet empty;
  CHECK(filter_small_components(empty).segments.empty());

  testing::Rng rng(403);
  for (int trial = 0; trial < 50; ++trial) {
    const LabelMap r = testing::random_labels(rng, 10, 10, 2);
    const auto raw = label_components(r, Connectivity::four);
    const std::uint64_t min_size = rng.below(8);
    const auto f = filter_small_components(raw, min_size);
    std::vector<Segment> expected;
    for (const auto& s : raw.segments) {
      if (s.size >= min_size) expected.push_back(s);
    }
    CHECK(f.segments == expected);
    CHECK(filter_small_components(f, min_size).segments == f.segments);
  }
}

TEST_CASE("merging nearby same-class segments") {
  SUBCASE("5 pixels in between merge") {
    const LabelMap m = paint(5, 20, 2, {{1, 0, 0, 3, 3}, {1, 0, 8, 3, 3}});
    const auto merged = merge_nearby_components(label_components(m, Connectivity::eight), 10);
    CHECK(merged.provenance == Provenance::merged);
    CHECK(std::count_if(merged.segments.begin(), merged.segments.end(),
                        [](const Segment& s) { return s.class_id == 1; }) == 1);
  }
  SUBCASE("15 pixels in between stay apart") {
    const LabelMap m = paint(5, 30, 2, {{1, 0, 0, 3, 3}, {1, 0, 18, 3, 3}});
    const auto merged = merge_nearby_components(label_components(m, Connectivity::eight), 10);
    CHECK(std::count_if(merged.segments.begin(), merged.segments.end(),
                        [](const Segment& s) { return s.class_id == 1; }) == 2);
  }
  SUBCASE("boundary: 9 in between merge, 10 do not") {
    const LabelMap a = paint(3, 20, 2, {{1, 0, 0, 1, 1}, {1, 0, 10, 1, 1}});
    const LabelMap b = paint(3, 20, 2, {{1, 0, 0, 1, 1}, {1, 0, 11, 1, 1}});
    CHECK(of_class(oracle::pixel_sets(merge_nearby_components(label_components(a, Connectivity::eight), 10)), 1).size() == 1);
    CHECK(of_class(oracle::pixel_sets(merge_nearby_components(label_components(b, Connectivity::eight), 10)), 1).size() == 2);
  }
  SUBCASE("chains merge transitively") {
    const LabelMap m = paint(3, 40, 2, {{1, 0, 0, 2, 2}, {1, 0, 10, 2, 2}, {1, 0, 20, 2, 2}});
    const auto merged = merge_nearby_components(label_components(m, Connectivity::eight), 10);
    const auto ones = of_class(oracle::pixel_sets(merged), 1);
    REQUIRE(ones.size() == 1);
    CHECK(ones[0].pixels.size() == 12);
  }
  SUBCASE("different classes never merge") {
    const LabelMap m = paint(3, 10, 3, {{1, 0, 0, 1, 1}, {2, 0, 2, 1, 1}});
    const auto merged = merge_nearby_components(label_components(m, Connectivity::eight), 10);
    CHECK(of_class(oracle::pixel_sets(merged), 1).size() == 1);
    CHECK(of_class(oracle::pixel_sets(merged), 2).size() == 1);
  }
}

TEST_CASE("merge matches the all-pairs Chebyshev oracle") {
  testing::Rng rng(404);
  for (int trial = 0; trial < 150; ++trial) {
    const auto h = static_cast<std::uint32_t>(rng.between(1, 20));
    const auto w = static_cast<std::uint32_t>(rng.between(1, 20));
    const LabelMap m = testing::blocky_labels(rng, h, w, 3, rng.between(1, 8));
    const auto conn = trial % 2 ? Connectivity::four : Connectivity::eight;
    const auto raw = label_components(m, conn);
    const std::uint32_t gap = rng.below(6);
    const auto merged = merge_nearby_components(raw, gap);
    const auto got = oracle::pixel_sets(merged);
    CHECK(got == oracle::merge_all_pairs(oracle::pixel_sets(raw), gap));

    // Per-class pixel unions unchanged, result idempotent, no two survivors within the gap.
    for (int k = 0; k < 3; ++k) {
      std::vector<oracle::Pixel> before, after;
      for (const auto& s : of_class(oracle::pixel_sets(raw), k)) before.insert(before.end(), s.pixels.begin(), s.pixels.end());
      for (const auto& s : of_class(got, k)) after.insert(after.end(), s.pixels.begin(), s.pixels.end());
      std::sort(before.begin(), before.end());
      std::sort(after.begin(), after.end());
      CHECK(before == after);
    }
    CHECK(oracle::pixel_sets(merge_nearby_components(merged, gap)) == got);
    for (std::size_t i = 0; i < got.size(); ++i) {
      for (std::size_t j = i + 1; j < got.size(); ++j) {
        if (got[i].class_id == got[j].class_id) CHECK(oracle::chebyshev(got[i], got[j]) >= gap + 1);
      }
    }
    check_segment_invariants(merged, m);
  }
}

TEST_CASE("postprocess filters before merging") {
  // 3x3 blob and a 5x10 blob of class 1, four empty columns between them.
  const LabelMap m = paint(12, 30, 3, {{1, 0, 0, 3, 3}, {1, 0, 7, 5, 10}});
  const auto set = postprocess(m, PostprocessParams{});
  const auto ones = of_class(oracle::pixel_sets(set), 1);
  REQUIRE(ones.size() == 1);
  CHECK(ones[0].pixels.size() == 50);
  CHECK(of_class(oracle::pixel_sets(set), 2).empty());
}

TEST_CASE("postprocess with neutral parameters equals labeling") {
  testing::Rng rng(405);
  for (int trial = 0; trial < 50; ++trial) {
    const LabelMap m = testing::random_labels(rng, 12, 12, 3);
    for (auto conn : {Connectivity::four, Connectivity::eight}) {
      CHECK(oracle::pixel_sets(postprocess(m, {conn, 1, 0})) ==
            oracle::pixel_sets(label_components(m, conn)));
    }
  }
}

TEST_CASE("postprocess stages are idempotent") {
  testing::Rng rng(406);
  for (int trial = 0; trial < 40; ++trial) {
    const LabelMap m = testing::blocky_labels(rng, 30, 30, 3, 10);
    const PostprocessParams params{Connectivity::eight, 10, 10};
    const auto once = postprocess(m, params);
    const auto again = merge_nearby_components(filter_small_components(once, params.min_size), params.max_gap);
    CHECK(oracle::pixel_sets(again) == oracle::pixel_sets(once));
  }
}

TEST_CASE("make_segment coalesces touching runs") {
  const Segment s = make_segment(2, {{1, 4, 6}, {0, 0, 1}, {1, 0, 3}, {0, 2, 2}});
  CHECK(s.runs == std::vector<Run>{{0, 0, 2}, {1, 0, 6}});
  CHECK(s.size == 10);
  CHECK(s.bbox == BoundingBox{0, 0, 1, 6});
}

TEST_CASE("count_by_class") {
  const LabelMap m = paint(5, 20, 3, {{1, 0, 0, 1, 1}, {1, 3, 10, 1, 1}, {2, 0, 5, 1, 1}});
  const auto counts = count_by_class(label_components(m, Connectivity::four), 3);
  CHECK(counts == std::vector<std::uint64_t>{1, 2, 1});
}
