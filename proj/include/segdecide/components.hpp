#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segdecide/tensor.hpp"

namespace segdecide {

/// Horizontal pixel run [col_begin, col_end] (inclusive) on one row.
struct Run {
  std::uint32_t row = 0;
  std::uint32_t col_begin = 0;
  std::uint32_t col_end = 0;

  std::uint32_t length() const { return col_end - col_begin + 1; }
  friend bool operator==(const Run&, const Run&) = default;
};

struct BoundingBox {
  std::uint32_t min_row = 0;
  std::uint32_t min_col = 0;
  std::uint32_t max_row = 0;
  std::uint32_t max_col = 0;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// One connected component. Runs are sorted by (row, col_begin) and never
/// touch or overlap.
struct Segment {
  int class_id = 0;
  std::vector<Run> runs;
  std::uint64_t size = 0;
  BoundingBox bbox;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Builds a segment from arbitrary runs: sorts, coalesces touching runs and
/// recomputes size and bounding box.
Segment make_segment(int class_id, std::vector<Run> runs);

enum class Connectivity { four = 4, eight = 8 };
enum class Provenance { raw, filtered, merged };

const char* to_string(Provenance p);

/// Segments of one image, ordered by their first pixel in raster order.
struct ComponentSet {
  std::string image_id;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  Connectivity connectivity = Connectivity::eight;
  Provenance provenance = Provenance::raw;
  std::vector<Segment> segments;
};

/// Maximal same-class connected pixel sets. Every pixel lands in exactly one segment.
ComponentSet label_components(const LabelMap& labels, Connectivity connectivity,
                              std::string image_id = {});

/// Drops segments with fewer than min_size pixels.
ComponentSet filter_small_components(const ComponentSet& set, std::uint64_t min_size = 10);

/// Unions same-class segments with fewer than max_gap pixels in between,
/// i.e. minimum Chebyshev distance - 1 < max_gap. The union is transitive.
ComponentSet merge_nearby_components(const ComponentSet& set, std::uint32_t max_gap = 10);

struct PostprocessParams {
  Connectivity connectivity = Connectivity::eight;
  std::uint64_t min_size = 10;
  std::uint32_t max_gap = 10;
};

/// label_components -> filter_small_components -> merge_nearby_components.
ComponentSet postprocess(const LabelMap& labels, const PostprocessParams& params,
                         std::string image_id = {});

/// Per-pixel index of the owning segment, -1 where no segment covers the pixel.
std::vector<std::int32_t> render_index(const ComponentSet& set);

/// Number of segments of each class.
std::vector<std::uint64_t> count_by_class(const ComponentSet& set, int num_classes);

}  // namespace segdecide
