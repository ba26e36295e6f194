#include "segdecide/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "segdecide/error.hpp"
#include "segdecide/tensor_io.hpp"

namespace segdecide {

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw ConfigError("empirical CDF needs at least one sample");
  for (double v : sorted_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError("empirical CDF sample " + std::to_string(v) + " outside [0, 1]");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

DominanceResult dominates_first_order(const EmpiricalCdf& f1, const EmpiricalCdf& f2) {
  DominanceResult result;
  double worst = 0.0;
  auto check = [&](std::span<const double> points) {
    for (double x : points) worst = std::max(worst, f2(x) - f1(x));
  };
  check(f1.samples());
  check(f2.samples());
  result.violation = worst;
  result.dominated = worst <= 0.0;
  return result;
}

SizeHistogram::SizeHistogram(std::vector<double> e)
    : edges(std::move(e)), bayes(edges.size() + 1, 0), ml(edges.size() + 1, 0) {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ConfigError("histogram edges must strictly increase");
  }
}

std::size_t SizeHistogram::bin_of(double size) const {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), size) -
                                  edges.begin());
}

double SizeHistogram::bin_low(std::size_t bin) const { return bin == 0 ? 0.0 : edges[bin - 1]; }

double SizeHistogram::bin_high(std::size_t bin) const {
  return bin < edges.size() ? edges[bin] : std::numeric_limits<double>::infinity();
}

std::optional<double> SizeHistogram::ratio(std::size_t bin) const {
  if (ml[bin] == 0) return std::nullopt;
  return static_cast<double>(bayes[bin]) / static_cast<double>(ml[bin]);
}

std::uint64_t SizeHistogram::bayes_total() const {
  return std::accumulate(bayes.begin(), bayes.end(), std::uint64_t{0});
}

std::uint64_t SizeHistogram::ml_total() const {
  return std::accumulate(ml.begin(), ml.end(), std::uint64_t{0});
}

std::vector<double> default_size_edges() {
  std::vector<double> edges = {10.0};
  for (double e = 16.0; e <= 4096.0; e *= 2.0) edges.push_back(e);
  return edges;
}

DetectionHistograms detection_histograms(const SegmentMatch& bayes, const SegmentMatch& ml,
                                         int class_id, std::span<const double> edges) {
  const std::vector<double> e(edges.begin(), edges.end());
  DetectionHistograms h{SizeHistogram(e), SizeHistogram(e)};
  auto fill = [&](const SegmentMatch& m, std::vector<std::uint64_t>& fd,
                  std::vector<std::uint64_t>& nd) {
    for (const auto& s : m.predicted) {
      if (s.class_id == class_id && !s.matched) {
        ++fd[h.false_detection.bin_of(static_cast<double>(s.size))];
      }
    }
    for (const auto& s : m.ground_truth) {
      if (s.class_id == class_id && !s.matched) {
        ++nd[h.non_detection.bin_of(static_cast<double>(s.size))];
      }
    }
  };
  fill(bayes, h.false_detection.bayes, h.non_detection.bayes);
  fill(ml, h.false_detection.ml, h.non_detection.ml);
  return h;
}

Heatmap::Heatmap(std::uint32_t h, std::uint32_t w, HeatmapKind k)
    : height(h), width(w), kind(k), counts(static_cast<std::size_t>(h) * w, 0) {}

Heatmap& Heatmap::operator+=(const Heatmap& other) {
  if (other.height != height || other.width != width) {
    throw ShapeError("cannot add heatmaps of different shapes");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

std::uint32_t Heatmap::max_count() const {
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

void accumulate_nondetection(NondetectionHeatmaps& maps, const ComponentSet& gt,
                             const ComponentSet& pred, int class_id) {
  if (gt.height != pred.height || gt.width != pred.width) {
    throw ShapeError("ground-truth and predicted component sets differ in shape");
  }
  if (maps.pixel_level.counts.empty()) {
    maps.pixel_level = Heatmap(gt.height, gt.width, HeatmapKind::pixel_level);
    maps.object_level = Heatmap(gt.height, gt.width, HeatmapKind::object_level);
  }
  if (maps.pixel_level.height != gt.height || maps.pixel_level.width != gt.width) {
    throw ShapeError("heatmap shape differs from the component sets");
  }
  std::vector<std::uint8_t> predicted(static_cast<std::size_t>(gt.height) * gt.width, 0);
  for (const auto& seg : pred.segments) {
    if (seg.class_id != class_id) continue;
    for (const Run& run : seg.runs) {
      const std::size_t base = static_cast<std::size_t>(run.row) * gt.width;
      std::fill(predicted.begin() + static_cast<std::ptrdiff_t>(base + run.col_begin),
                predicted.begin() + static_cast<std::ptrdiff_t>(base + run.col_end + 1), 1);
    }
  }
  for (const auto& seg : gt.segments) {
    if (seg.class_id != class_id) continue;
    bool touched = false;
    for (const Run& run : seg.runs) {
      const std::size_t base = static_cast<std::size_t>(run.row) * gt.width;
      for (std::uint32_t c = run.col_begin; c <= run.col_end; ++c) {
        if (predicted[base + c]) {
          touched = true;
        } else {
          ++maps.pixel_level.counts[base + c];
        }
      }
    }
    if (touched) continue;
    for (const Run& run : seg.runs) {
      const std::size_t base = static_cast<std::size_t>(run.row) * gt.width;
      for (std::uint32_t c = run.col_begin; c <= run.col_end; ++c) {
        ++maps.object_level.counts[base + c];
      }
    }
  }
}

NondetectionHeatmaps nondetection_heatmaps(std::span<const ComponentSet> gt_sets,
                                           std::span<const ComponentSet> pred_sets,
                                           int class_id) {
  if (gt_sets.size() != pred_sets.size()) {
    throw ShapeError("need one predicted component set per ground-truth set");
  }
  NondetectionHeatmaps maps;
  for (std::size_t i = 0; i < gt_sets.size(); ++i) {
    accumulate_nondetection(maps, gt_sets[i], pred_sets[i], class_id);
  }
  return maps;
}

namespace {

std::string format_number(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string cdf_csv(const EmpiricalCdf& bayes, const EmpiricalCdf& ml) {
  std::vector<double> grid = {0.0, 1.0};
  grid.insert(grid.end(), bayes.samples().begin(), bayes.samples().end());
  grid.insert(grid.end(), ml.samples().begin(), ml.samples().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::string out = "x,F_bayes,F_ml\n";
  for (double x : grid) {
    out += format_number(x) + "," + format_number(bayes(x)) + "," + format_number(ml(x)) + "\n";
  }
  return out;
}

std::string histogram_csv(const SizeHistogram& hist) {
  std::string out = "bin_lo,bin_hi,bayes,ml,ratio\n";
  for (std::size_t b = 0; b < hist.bin_count(); ++b) {
    const auto r = hist.ratio(b);
    out += format_number(hist.bin_low(b)) + "," + format_number(hist.bin_high(b)) + "," +
           std::to_string(hist.bayes[b]) + "," + std::to_string(hist.ml[b]) + "," +
           (r ? format_number(*r) : std::string()) + "\n";
  }
  return out;
}

void write_heatmap(const std::filesystem::path& pgm_path, const Heatmap& map, int class_id) {
  const std::uint32_t max_count = map.max_count();
  std::uint32_t max_val = std::max<std::uint32_t>(1, max_count);
  double scale = 1.0;
  std::vector<std::uint32_t> values = map.counts;
  if (max_val > 65535) {
    scale = 65535.0 / static_cast<double>(max_val);
    for (auto& v : values) {
      v = static_cast<std::uint32_t>(std::lround(static_cast<double>(v) * scale));
    }
    max_val = 65535;
  }
  write_pgm(pgm_path, map.height, map.width, values, max_val);

  nlohmann::ordered_json sidecar;
  sidecar["kind"] = map.kind == HeatmapKind::pixel_level ? "pixel_level" : "object_level";
  sidecar["class_id"] = class_id;
  sidecar["height"] = map.height;
  sidecar["width"] = map.width;
  sidecar["max_count"] = max_count;
  sidecar["pgm_max_value"] = max_val;
  sidecar["scale"] = scale;
  const std::string text = sidecar.dump(2) + "\n";
  auto sidecar_path = pgm_path;
  sidecar_path += ".json";
  write_bytes(sidecar_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                      text.size()));
}

}  // namespace segdecide
