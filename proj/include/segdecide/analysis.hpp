#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segdecide/components.hpp"
#include "segdecide/metrics.hpp"

namespace segdecide {

/// Right-continuous step CDF F(x) = #{samples <= x} / n over values in [0, 1].
class EmpiricalCdf {
 public:
  /// Throws ConfigError on empty input or a value outside [0, 1].
  explicit EmpiricalCdf(std::vector<double> values);

  double operator()(double x) const;
  std::span<const double> samples() const { return sorted_; }
  std::size_t count() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

struct DominanceResult {
  bool dominated = false;
  /// max_x (F2(x) - F1(x)), clamped at zero.
  double violation = 0.0;
};

/// F1 is dominated by F2 to first order (F1 < F2) iff F1(x) >= F2(x) for all x.
/// Both are step functions, so checking the union of their sample points is exact.
DominanceResult dominates_first_order(const EmpiricalCdf& f1, const EmpiricalCdf& f2);

/// Counts per size bin for the two decision rules.
///
/// With edges e_0 < ... < e_m the bins are: [0, e_0), [e_0, e_1), ...,
/// [e_{m-1}, e_m), [e_m, inf). Index 0 is the underflow bin and the last
/// index the overflow bin, so a segment is never lost to binning.
struct SizeHistogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> bayes;
  std::vector<std::uint64_t> ml;

  explicit SizeHistogram(std::vector<double> edges = {});

  std::size_t bin_count() const { return bayes.size(); }
  std::size_t bin_of(double size) const;
  double bin_low(std::size_t bin) const;
  double bin_high(std::size_t bin) const;
  /// bayes / ml, empty when the ML count is zero.
  std::optional<double> ratio(std::size_t bin) const;
  std::uint64_t bayes_total() const;
  std::uint64_t ml_total() const;
};

/// 10, 16, 32, ..., 4096 (overflow above).
std::vector<double> default_size_edges();

struct DetectionHistograms {
  /// Unmatched predicted segments, binned by predicted size.
  SizeHistogram false_detection;
  /// Ground-truth segments with recall 0, binned by ground-truth size.
  SizeHistogram non_detection;
};

DetectionHistograms detection_histograms(const SegmentMatch& bayes, const SegmentMatch& ml,
                                         int class_id, std::span<const double> edges);

enum class HeatmapKind { pixel_level, object_level };

struct Heatmap {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  HeatmapKind kind = HeatmapKind::pixel_level;
  std::vector<std::uint32_t> counts;

  Heatmap() = default;
  Heatmap(std::uint32_t height, std::uint32_t width, HeatmapKind kind);
  Heatmap& operator+=(const Heatmap& other);
  std::uint32_t max_count() const;
};

struct NondetectionHeatmaps {
  Heatmap pixel_level;
  Heatmap object_level;
};

/// Adds one image to the accumulators. The pixel-level map counts every
/// ground-truth pixel of `class_id` not covered by a predicted segment of that
/// class; the object-level map counts every pixel of each ground-truth segment
/// of `class_id` that no predicted segment of that class touches.
void accumulate_nondetection(NondetectionHeatmaps& maps, const ComponentSet& gt,
                             const ComponentSet& pred, int class_id);

NondetectionHeatmaps nondetection_heatmaps(std::span<const ComponentSet> gt_sets,
                                           std::span<const ComponentSet> pred_sets,
                                           int class_id);

/// CSV with columns x,F_bayes,F_ml evaluated at 0, 1 and every sample point.
std::string cdf_csv(const EmpiricalCdf& bayes, const EmpiricalCdf& ml);
/// CSV with columns bin_lo,bin_hi,bayes,ml,ratio (ratio blank when undefined).
std::string histogram_csv(const SizeHistogram& hist);

/// Writes `counts` as PGM with max value max(1, max count) when that fits in
/// 16 bits, otherwise scaled to 65535, plus a JSON sidecar (<path>.json) that
/// records the normalization.
void write_heatmap(const std::filesystem::path& pgm_path, const Heatmap& map, int class_id);

}  // namespace segdecide
