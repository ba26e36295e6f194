#pragma once

// Slow, direct re-implementations used as test oracles. Nothing here calls
// into the library's algorithms; only plain containers are shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "segdecide/analysis.hpp"
#include "segdecide/components.hpp"
#include "segdecide/metrics.hpp"
#include "segdecide/tensor.hpp"

namespace oracle {

using Pixel = std::pair<std::uint32_t, std::uint32_t>;  // (row, col)

struct PixelSet {
  int class_id = 0;
  std::vector<Pixel> pixels;  // sorted
  friend bool operator==(const PixelSet&, const PixelSet&) = default;
  friend bool operator<(const PixelSet& a, const PixelSet& b) { return a.pixels < b.pixels; }
};

inline void fill_from(const segdecide::LabelMap& m, int conn, std::uint32_t r, std::uint32_t c,
                      std::vector<std::uint8_t>& seen, PixelSet& out) {
  const std::size_t i = static_cast<std::size_t>(r) * m.width() + c;
  if (seen[i] || m.at(r, c) != out.class_id) return;
  seen[i] = 1;
  out.pixels.emplace_back(r, c);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      if (conn == 4 && dr != 0 && dc != 0) continue;
      const long nr = static_cast<long>(r) + dr;
      const long nc = static_cast<long>(c) + dc;
      if (nr < 0 || nc < 0 || nr >= m.height() || nc >= m.width()) continue;
      fill_from(m, conn, static_cast<std::uint32_t>(nr), static_cast<std::uint32_t>(nc), seen, out);
    }
  }
}

/// Recursive flood fill; components sorted by their pixel lists.
inline std::vector<PixelSet> flood_fill(const segdecide::LabelMap& m, int conn) {
  std::vector<std::uint8_t> seen(m.pixel_count(), 0);
  std::vector<PixelSet> out;
  for (std::uint32_t r = 0; r < m.height(); ++r) {
    for (std::uint32_t c = 0; c < m.width(); ++c) {
      if (seen[static_cast<std::size_t>(r) * m.width() + c]) continue;
      PixelSet s{m.at(r, c), {}};
      fill_from(m, conn, r, c, seen, s);
      std::sort(s.pixels.begin(), s.pixels.end());
      out.push_back(std::move(s));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline PixelSet pixels_of(const segdecide::Segment& seg) {
  PixelSet s{seg.class_id, {}};
  for (const auto& run : seg.runs) {
    for (std::uint32_t c = run.col_begin; c <= run.col_end; ++c) s.pixels.emplace_back(run.row, c);
  }
  std::sort(s.pixels.begin(), s.pixels.end());
  return s;
}

inline std::vector<PixelSet> pixel_sets(const segdecide::ComponentSet& set) {
  std::vector<PixelSet> out;
  for (const auto& seg : set.segments) out.push_back(pixels_of(seg));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::uint32_t chebyshev(const PixelSet& a, const PixelSet& b) {
  std::uint32_t best = UINT32_MAX;
  for (const auto& p : a.pixels) {
    for (const auto& q : b.pixels) {
      const auto dr = p.first > q.first ? p.first - q.first : q.first - p.first;
      const auto dc = p.second > q.second ? p.second - q.second : q.second - p.second;
      best = std::min(best, std::max(dr, dc));
    }
  }
  return best;
}

/// All-pairs merge: same-class sets with Chebyshev distance - 1 < gap share a
/// group; groups are closed transitively by label propagation.
inline std::vector<PixelSet> merge_all_pairs(const std::vector<PixelSet>& sets, std::uint32_t gap) {
  const std::size_t n = sets.size();
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = i;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sets[i].class_id != sets[j].class_id) continue;
      const std::uint32_t d = chebyshev(sets[i], sets[j]);
      if (static_cast<long>(d) - 1 < static_cast<long>(gap)) edges.emplace_back(i, j);
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [i, j] : edges) {
      const std::size_t m = std::min(label[i], label[j]);
      if (label[i] != m || label[j] != m) {
        label[i] = label[j] = m;
        changed = true;
      }
    }
  }
  std::map<std::size_t, PixelSet> groups;
  for (std::size_t i = 0; i < n; ++i) {
    auto& g = groups[label[i]];
    g.class_id = sets[i].class_id;
    g.pixels.insert(g.pixels.end(), sets[i].pixels.begin(), sets[i].pixels.end());
  }
  std::vector<PixelSet> out;
  for (auto& [_, g] : groups) {
    std::sort(g.pixels.begin(), g.pixels.end());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Dense 2-D convolution with a square, normalized Gaussian window and mirror
/// borders (the sample at -1 is the sample at 0).
inline std::vector<double> dense_gaussian(const std::vector<double>& ch, std::uint32_t h,
                                          std::uint32_t w, double sigma, double radius_sigmas) {
  if (sigma == 0.0) return ch;
  const int radius = static_cast<int>(std::ceil(radius_sigmas * sigma));
  auto mirror = [](long i, long n) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -i - 1;
      if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
  };
  double norm = 0.0;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      norm += std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
    }
  }
  std::vector<double> out(ch.size(), 0.0);
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const double wt = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma)) / norm;
          acc += wt * ch[static_cast<std::size_t>(mirror(r + dy, h) * w + mirror(c + dx, w))];
        }
      }
      out[static_cast<std::size_t>(r * w + c)] = acc;
    }
  }
  return out;
}

inline std::vector<std::vector<std::uint64_t>> confusion(const segdecide::LabelMap& pred,
                                                         const segdecide::LabelMap& gt, int n) {
  std::vector<std::vector<std::uint64_t>> cm(n, std::vector<std::uint64_t>(n, 0));
  for (std::uint32_t r = 0; r < gt.height(); ++r) {
    for (std::uint32_t c = 0; c < gt.width(); ++c) ++cm[gt.at(r, c)][pred.at(r, c)];
  }
  return cm;
}

struct Scores {
  std::vector<double> precision, recall, iou;  // NaN where undefined
};

inline Scores scores(const std::vector<std::vector<std::uint64_t>>& cm) {
  const std::size_t n = cm.size();
  Scores s;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0, row = 0;
    for (std::size_t k = 0; k < n; ++k) {
      col += static_cast<double>(cm[k][j]);
      row += static_cast<double>(cm[j][k]);
    }
    const double tp = static_cast<double>(cm[j][j]);
    s.precision.push_back(col > 0 ? tp / col : NAN);
    s.recall.push_back(row > 0 ? tp / row : NAN);
    s.iou.push_back(row + col - tp > 0 ? tp / (row + col - tp) : NAN);
  }
  return s;
}

struct SegmentOracle {
  bool matched = false;
  double own = 0;          // |S & other| / |S|
  double counterpart = 0;  // |S & U| / |U|, 0 when U is empty
  double iou = 0;
};

/// Scores each set in `side` against the same-class sets in `other` with
/// explicit set algebra.
inline std::vector<SegmentOracle> score_sets(const std::vector<PixelSet>& side,
                                             const std::vector<PixelSet>& other) {
  std::vector<SegmentOracle> out;
  for (const auto& s : side) {
    const std::set<Pixel> mine(s.pixels.begin(), s.pixels.end());
    std::set<Pixel> all_other, touching;
    for (const auto& o : other) {
      if (o.class_id != s.class_id) continue;
      bool touches = false;
      for (const auto& p : o.pixels) {
        all_other.insert(p);
        if (mine.count(p)) touches = true;
      }
      if (touches) touching.insert(o.pixels.begin(), o.pixels.end());
    }
    std::size_t inter_all = 0, inter_touch = 0;
    for (const auto& p : mine) {
      inter_all += all_other.count(p);
      inter_touch += touching.count(p);
    }
    std::set<Pixel> uni = mine;
    uni.insert(touching.begin(), touching.end());
    SegmentOracle r;
    r.matched = inter_all > 0;
    r.own = static_cast<double>(inter_all) / static_cast<double>(mine.size());
    r.counterpart = touching.empty() ? 0.0 : static_cast<double>(inter_touch) / static_cast<double>(touching.size());
    r.iou = static_cast<double>(inter_touch) / static_cast<double>(uni.size());
    out.push_back(r);
  }
  return out;
}

inline double cdf(const std::vector<double>& samples, double x) {
  std::size_t count = 0;
  for (double v : samples) count += v <= x ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(samples.size());
}

/// Bin index with an underflow bin below edges[0] and an overflow bin at or above edges.back().
inline std::size_t bin(const std::vector<double>& edges, double size) {
  std::size_t b = 0;
  while (b < edges.size() && size >= edges[b]) ++b;
  return b;
}

/// Pixel- and object-level non-detection counts for one image.
inline void heatmap_add(std::vector<std::uint32_t>& pixel, std::vector<std::uint32_t>& object,
                        const segdecide::ComponentSet& gt, const segdecide::ComponentSet& pred,
                        int class_id) {
  std::set<Pixel> predicted;
  for (const auto& seg : pred.segments) {
    if (seg.class_id != class_id) continue;
    const auto p = pixels_of(seg);
    predicted.insert(p.pixels.begin(), p.pixels.end());
  }
  for (const auto& seg : gt.segments) {
    if (seg.class_id != class_id) continue;
    const auto p = pixels_of(seg);
    bool hit = false;
    for (const auto& px : p.pixels) {
      if (predicted.count(px)) {
        hit = true;
      } else {
        ++pixel[px.first * gt.width + px.second];
      }
    }
    if (!hit) {
      for (const auto& px : p.pixels) ++object[px.first * gt.width + px.second];
    }
  }
}

}  // namespace oracle
