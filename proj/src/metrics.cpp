#include "segdecide/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "segdecide/error.hpp"

namespace segdecide {

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * num_classes, 0) {
  if (num_classes < 1 || num_classes > kMaxClasses) {
    throw ConfigError("confusion matrix class count outside [1, 256]");
  }
}

ConfusionMatrix::ConfusionMatrix(int num_classes, std::vector<std::uint64_t> counts)
    : ConfusionMatrix(num_classes) {
  if (counts.size() != counts_.size()) {
    throw ShapeError("confusion matrix needs N*N counts");
  }
  counts_ = std::move(counts);
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::row_sum(int truth) const {
  std::uint64_t s = 0;
  for (int j = 0; j < num_classes_; ++j) s += (*this)(truth, j);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(int predicted) const {
  std::uint64_t s = 0;
  for (int k = 0; k < num_classes_; ++k) s += (*this)(k, predicted);
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.num_classes_ != num_classes_) {
    throw ShapeError("cannot add confusion matrices with different class counts");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix confusion_matrix(const LabelMap& pred, const LabelMap& gt) {
  if (!pred.same_shape(gt)) {
    throw ShapeError("prediction is " + std::to_string(pred.height()) + "x" +
                     std::to_string(pred.width()) + ", ground truth is " +
                     std::to_string(gt.height()) + "x" + std::to_string(gt.width()));
  }
  if (pred.num_classes() != gt.num_classes()) {
    throw ShapeError("prediction and ground truth disagree on the class count");
  }
  ConfusionMatrix cm(gt.num_classes());
  const auto p = pred.data();
  const auto g = gt.data();
  for (std::size_t i = 0; i < g.size(); ++i) cm.add(g[i], p[i]);
  return cm;
}

ClassScores class_scores(const ConfusionMatrix& cm) {
  const int n = cm.num_classes();
  ClassScores s;
  s.precision.resize(static_cast<std::size_t>(n));
  s.recall.resize(static_cast<std::size_t>(n));
  s.iou.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto tp = static_cast<double>(cm(j, j));
    const std::uint64_t col = cm.col_sum(j);
    const std::uint64_t row = cm.row_sum(j);
    const std::uint64_t uni = row + col - cm(j, j);
    const auto idx = static_cast<std::size_t>(j);
    if (col > 0) s.precision[idx] = tp / static_cast<double>(col);
    if (row > 0) s.recall[idx] = tp / static_cast<double>(row);
    if (uni > 0) s.iou[idx] = tp / static_cast<double>(uni);
  }
  return s;
}

double mean_iou(const ClassScores& scores, UndefinedPolicy policy) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& v : scores.iou) {
    if (v) {
      sum += *v;
      ++count;
    } else if (policy == UndefinedPolicy::count_undefined_as_zero) {
      ++count;
    }
  }
  if (count == 0) throw ConfigError("mean IoU is undefined: no class has a defined IoU");
  return sum / static_cast<double>(count);
}

void SegmentMatch::append(const SegmentMatch& other) {
  predicted.insert(predicted.end(), other.predicted.begin(), other.predicted.end());
  ground_truth.insert(ground_truth.end(), other.ground_truth.begin(), other.ground_truth.end());
}

namespace {

// Scores every segment of `side` against the segments of `other`.
// `side_is_prediction` selects which ratio is precision and which is recall.
std::vector<SegmentScore> score_side(const ComponentSet& side, const ComponentSet& other,
                                     const std::vector<std::int32_t>& other_index,
                                     bool side_is_prediction) {
  std::vector<SegmentScore> out;
  out.reserve(side.segments.size());
  std::vector<std::int32_t> touched;
  for (std::size_t s = 0; s < side.segments.size(); ++s) {
    const Segment& seg = side.segments[s];
    std::uint64_t inter = 0;
    touched.clear();
    for (const Run& run : seg.runs) {
      const std::size_t base = static_cast<std::size_t>(run.row) * side.width;
      for (std::uint32_t c = run.col_begin; c <= run.col_end; ++c) {
        const std::int32_t t = other_index[base + c];
        if (t < 0 || other.segments[static_cast<std::size_t>(t)].class_id != seg.class_id) {
          continue;
        }
        ++inter;
        touched.push_back(t);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    std::uint64_t counterpart = 0;
    for (std::int32_t t : touched) counterpart += other.segments[static_cast<std::size_t>(t)].size;

    SegmentScore score;
    score.segment = s;
    score.class_id = seg.class_id;
    score.size = seg.size;
    score.matched = inter > 0;
    const double own_ratio = static_cast<double>(inter) / static_cast<double>(seg.size);
    const double other_ratio =
        counterpart > 0 ? static_cast<double>(inter) / static_cast<double>(counterpart) : 0.0;
    score.precision = side_is_prediction ? own_ratio : other_ratio;
    score.recall = side_is_prediction ? other_ratio : own_ratio;
    const std::uint64_t uni = seg.size + counterpart - inter;
    score.iou = static_cast<double>(inter) / static_cast<double>(uni);
    out.push_back(score);
  }
  return out;
}

}  // namespace

SegmentMatch match_segments(const ComponentSet& pred, const ComponentSet& gt) {
  if (pred.height != gt.height || pred.width != gt.width) {
    throw ShapeError("predicted and ground-truth component sets differ in image shape");
  }
  const auto pred_index = render_index(pred);
  const auto gt_index = render_index(gt);
  SegmentMatch match;
  match.predicted = score_side(pred, gt, gt_index, true);
  match.ground_truth = score_side(gt, pred, pred_index, false);
  return match;
}

std::vector<ClassSegmentSummary> segment_score_summary(const SegmentMatch& scores,
                                                       int num_classes) {
  if (scores.predicted.empty() && scores.ground_truth.empty()) {
    throw ConfigError("segment summary needs at least one segment");
  }
  const auto n = static_cast<std::size_t>(num_classes);
  std::vector<ClassSegmentSummary> out(n);
  std::vector<double> prc(n, 0.0), iou(n, 0.0), rec(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) out[k].class_id = static_cast<int>(k);
  for (const auto& s : scores.predicted) {
    const auto k = static_cast<std::size_t>(s.class_id);
    if (k >= n) throw ConfigError("segment class outside the class range");
    ++out[k].predicted_segments;
    if (!s.matched) ++out[k].false_detections;
    prc[k] += s.precision;
    iou[k] += s.iou;
  }
  for (const auto& s : scores.ground_truth) {
    const auto k = static_cast<std::size_t>(s.class_id);
    if (k >= n) throw ConfigError("segment class outside the class range");
    ++out[k].gt_segments;
    if (!s.matched) ++out[k].non_detections;
    rec[k] += s.recall;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (out[k].predicted_segments > 0) {
      const auto m = static_cast<double>(out[k].predicted_segments);
      out[k].mean_precision = prc[k] / m;
      out[k].mean_iou = iou[k] / m;
    }
    if (out[k].gt_segments > 0) {
      out[k].mean_recall = rec[k] / static_cast<double>(out[k].gt_segments);
    }
  }
  return out;
}

}  // namespace segdecide
