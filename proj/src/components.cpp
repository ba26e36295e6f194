#include "segdecide/components.hpp"

#include <algorithm>
#include <numeric>

#include "segdecide/error.hpp"

namespace segdecide {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root wins, so a group's root is its earliest member.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool raster_before(const Segment& a, const Segment& b) {
  const Run& ra = a.runs.front();
  const Run& rb = b.runs.front();
  return ra.row != rb.row ? ra.row < rb.row : ra.col_begin < rb.col_begin;
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::raw:
      return "raw";
    case Provenance::filtered:
      return "filtered";
    case Provenance::merged:
      return "merged";
  }
  return "raw";
}

Segment make_segment(int class_id, std::vector<Run> runs) {
  if (runs.empty()) throw InvariantError("a segment needs at least one pixel");
  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
    return a.row != b.row ? a.row < b.row : a.col_begin < b.col_begin;
  });
  Segment seg;
  seg.class_id = class_id;
  for (const Run& r : runs) {
    if (!seg.runs.empty()) {
      Run& last = seg.runs.back();
      if (last.row == r.row && r.col_begin <= last.col_end + 1) {
        last.col_end = std::max(last.col_end, r.col_end);
        continue;
      }
    }
    seg.runs.push_back(r);
  }
  seg.bbox = {seg.runs.front().row, seg.runs.front().col_begin, seg.runs.back().row,
              seg.runs.front().col_end};
  for (const Run& r : seg.runs) {
    seg.size += r.length();
    seg.bbox.min_col = std::min(seg.bbox.min_col, r.col_begin);
    seg.bbox.max_col = std::max(seg.bbox.max_col, r.col_end);
  }
  return seg;
}

ComponentSet label_components(const LabelMap& labels, Connectivity connectivity,
                              std::string image_id) {
  ComponentSet set;
  set.image_id = std::move(image_id);
  set.height = labels.height();
  set.width = labels.width();
  set.connectivity = connectivity;
  set.provenance = Provenance::raw;
  if (labels.pixel_count() == 0) return set;

  std::vector<Run> runs;
  std::vector<std::uint8_t> run_class;
  std::vector<std::size_t> row_begin(labels.height() + 1, 0);
  for (std::uint32_t r = 0; r < labels.height(); ++r) {
    row_begin[r] = runs.size();
    std::uint32_t c = 0;
    while (c < labels.width()) {
      const std::uint8_t cls = labels.at(r, c);
      const std::uint32_t start = c;
      while (c < labels.width() && labels.at(r, c) == cls) ++c;
      runs.push_back({r, start, c - 1});
      run_class.push_back(cls);
    }
  }
  row_begin[labels.height()] = runs.size();

  // Runs on consecutive rows connect if their column ranges overlap; with
  // 8-connectivity a diagonal touch (slack of one column) is enough.
  const std::uint32_t slack = connectivity == Connectivity::eight ? 1 : 0;
  DisjointSet ds(runs.size());
  for (std::uint32_t r = 1; r < labels.height(); ++r) {
    std::size_t j0 = row_begin[r - 1];
    const std::size_t prev_end = row_begin[r];
    for (std::size_t i = row_begin[r]; i < row_begin[r + 1]; ++i) {
      const Run& cur = runs[i];
      for (std::size_t j = j0; j < prev_end; ++j) {
        const Run& prev = runs[j];
        if (prev.col_end + slack < cur.col_begin) {
          j0 = j + 1;
          continue;
        }
        if (prev.col_begin > cur.col_end + slack) break;
        if (run_class[i] == run_class[j]) ds.unite(i, j);
      }
    }
  }

  std::vector<std::size_t> segment_of(runs.size());
  std::vector<std::vector<Run>> grouped;
  std::vector<int> grouped_class;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::size_t root = ds.find(i);
    if (root == i) {
      segment_of[i] = grouped.size();
      grouped.emplace_back();
      grouped_class.push_back(run_class[i]);
    } else {
      segment_of[i] = segment_of[root];
    }
    grouped[segment_of[i]].push_back(runs[i]);
  }
  set.segments.reserve(grouped.size());
  for (std::size_t s = 0; s < grouped.size(); ++s) {
    set.segments.push_back(make_segment(grouped_class[s], std::move(grouped[s])));
  }
  return set;
}

ComponentSet filter_small_components(const ComponentSet& set, std::uint64_t min_size) {
  ComponentSet out = set;
  out.provenance = Provenance::filtered;
  std::erase_if(out.segments, [min_size](const Segment& s) { return s.size < min_size; });
  return out;
}

ComponentSet merge_nearby_components(const ComponentSet& set, std::uint32_t max_gap) {
  ComponentSet out = set;
  out.provenance = Provenance::merged;
  if (max_gap == 0 || set.segments.size() < 2) return out;

  const auto index = render_index(set);
  const auto height = static_cast<std::int64_t>(set.height);
  const auto width = static_cast<std::int64_t>(set.width);
  const auto gap = static_cast<std::int64_t>(max_gap);
  auto owner = [&](std::int64_t r, std::int64_t c) {
    return index[static_cast<std::size_t>(r * width + c)];
  };

  DisjointSet ds(set.segments.size());
  for (std::size_t s = 0; s < set.segments.size(); ++s) {
    const auto self = static_cast<std::int32_t>(s);
    const int cls = set.segments[s].class_id;
    for (const Run& run : set.segments[s].runs) {
      const auto r = static_cast<std::int64_t>(run.row);
      for (auto c = static_cast<std::int64_t>(run.col_begin);
           c <= static_cast<std::int64_t>(run.col_end); ++c) {
        // The closest pixel of a segment to any outside pixel lies on its
        // 8-boundary, so interior pixels can be skipped.
        bool boundary = false;
        for (std::int64_t dr = -1; dr <= 1 && !boundary; ++dr) {
          for (std::int64_t dc = -1; dc <= 1 && !boundary; ++dc) {
            const std::int64_t rr = r + dr;
            const std::int64_t cc = c + dc;
            boundary = rr < 0 || cc < 0 || rr >= height || cc >= width || owner(rr, cc) != self;
          }
        }
        if (!boundary) continue;
        // Chebyshev distance d <= max_gap  <=>  d - 1 < max_gap.
        const std::int64_t r0 = std::max<std::int64_t>(0, r - gap);
        const std::int64_t r1 = std::min(height - 1, r + gap);
        const std::int64_t c0 = std::max<std::int64_t>(0, c - gap);
        const std::int64_t c1 = std::min(width - 1, c + gap);
        for (std::int64_t rr = r0; rr <= r1; ++rr) {
          for (std::int64_t cc = c0; cc <= c1; ++cc) {
            const std::int32_t t = owner(rr, cc);
            if (t < 0 || t == self) continue;
            if (set.segments[static_cast<std::size_t>(t)].class_id != cls) continue;
            ds.unite(s, static_cast<std::size_t>(t));
          }
        }
      }
    }
  }

  std::vector<std::vector<Run>> grouped(set.segments.size());
  for (std::size_t s = 0; s < set.segments.size(); ++s) {
    auto& dst = grouped[ds.find(s)];
    dst.insert(dst.end(), set.segments[s].runs.begin(), set.segments[s].runs.end());
  }
  out.segments.clear();
  for (std::size_t s = 0; s < grouped.size(); ++s) {
    if (grouped[s].empty()) continue;
    out.segments.push_back(make_segment(set.segments[s].class_id, std::move(grouped[s])));
  }
  std::stable_sort(out.segments.begin(), out.segments.end(), raster_before);
  return out;
}

ComponentSet postprocess(const LabelMap& labels, const PostprocessParams& params,
                         std::string image_id) {
  const auto raw = label_components(labels, params.connectivity, std::move(image_id));
  return merge_nearby_components(filter_small_components(raw, params.min_size), params.max_gap);
}

std::vector<std::int32_t> render_index(const ComponentSet& set) {
  std::vector<std::int32_t> index(static_cast<std::size_t>(set.height) * set.width, -1);
  for (std::size_t s = 0; s < set.segments.size(); ++s) {
    for (const Run& run : set.segments[s].runs) {
      if (run.row >= set.height || run.col_end >= set.width || run.col_begin > run.col_end) {
        throw InvariantError("segment run lies outside the image");
      }
      const std::size_t base = static_cast<std::size_t>(run.row) * set.width;
      for (std::uint32_t c = run.col_begin; c <= run.col_end; ++c) {
        index[base + c] = static_cast<std::int32_t>(s);
      }
    }
  }
  return index;
}

std::vector<std::uint64_t> count_by_class(const ComponentSet& set, int num_classes) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (const auto& seg : set.segments) {
    if (seg.class_id >= 0 && seg.class_id < num_classes) {
      ++counts[static_cast<std::size_t>(seg.class_id)];
    }
  }
  return counts;
}

}  // namespace segdecide
