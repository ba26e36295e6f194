#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "segdecide/components.hpp"
#include "segdecide/tensor.hpp"

namespace segdecide {

/// counts(k, k_hat) = pixels of true class k predicted as k_hat.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int num_classes);
  ConfusionMatrix(int num_classes, std::vector<std::uint64_t> counts);

  int num_classes() const { return num_classes_; }
  std::uint64_t operator()(int truth, int predicted) const {
    return counts_[static_cast<std::size_t>(truth) * num_classes_ + predicted];
  }
  void add(int truth, int predicted, std::uint64_t count = 1) {
    counts_[static_cast<std::size_t>(truth) * num_classes_ + predicted] += count;
  }
  std::uint64_t total() const;
  std::uint64_t row_sum(int truth) const;
  std::uint64_t col_sum(int predicted) const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int num_classes_ = 0;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion_matrix(const LabelMap& pred, const LabelMap& gt);

/// Per-class precision, recall and IoU. A score is empty when its
/// denominator is zero.
struct ClassScores {
  std::vector<std::optional<double>> precision;
  std::vector<std::optional<double>> recall;
  std::vector<std::optional<double>> iou;
};

ClassScores class_scores(const ConfusionMatrix& cm);

enum class UndefinedPolicy { skip_undefined, count_undefined_as_zero };

/// Throws ConfigError if every IoU is undefined under skip_undefined.
double mean_iou(const ClassScores& scores,
                UndefinedPolicy policy = UndefinedPolicy::skip_undefined);

/// Score of one predicted or ground-truth segment against the other side.
///
/// For a predicted segment S with class c, let G be the union of ground-truth
/// pixels of class c and U the union of ground-truth segments of class c
/// that intersect S. Then precision = |S & G| / |S|, recall = |S & U| / |U|
/// (0 when U is empty), iou = |S & U| / |S | U| and matched = |S & G| > 0.
/// Ground-truth segments are scored symmetrically against predictions;
/// for them matched == false marks a non-detection.
struct SegmentScore {
  std::size_t segment = 0;
  int class_id = 0;
  std::uint64_t size = 0;
  bool matched = false;
  double precision = 0.0;
  double recall = 0.0;
  double iou = 0.0;
};

struct SegmentMatch {
  std::vector<SegmentScore> predicted;
  std::vector<SegmentScore> ground_truth;

  /// Concatenates another image's scores (segment indices keep their per-image meaning).
  void append(const SegmentMatch& other);
};

SegmentMatch match_segments(const ComponentSet& pred, const ComponentSet& gt);

struct ClassSegmentSummary {
  int class_id = 0;
  std::uint64_t predicted_segments = 0;
  std::uint64_t gt_segments = 0;
  std::uint64_t false_detections = 0;
  std::uint64_t non_detections = 0;
  /// Means over predicted segments.
  std::optional<double> mean_precision;
  std::optional<double> mean_iou;
  /// Mean over ground-truth segments.
  std::optional<double> mean_recall;
};

/// Per-class averages. Throws ConfigError when there are no segments at all.
std::vector<ClassSegmentSummary> segment_score_summary(const SegmentMatch& scores,
                                                       int num_classes);

}  // namespace segdecide
