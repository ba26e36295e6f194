#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace segdecide {

inline constexpr int kMaxClasses = 256;

/// Tolerance on the per-pixel channel sum of a posterior map.
inline constexpr double kPosteriorSumTolerance = 1e-4;
/// Tolerance on the per-pixel channel sum of an unsmoothed prior stack.
inline constexpr double kRawPriorSumTolerance = 1e-6;

/// H x W image of class ids, row-major. Class ids are 0-based.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(std::uint32_t height, std::uint32_t width, int num_classes,
           std::vector<std::uint8_t> data);

  static LabelMap filled(std::uint32_t height, std::uint32_t width, int num_classes,
                         std::uint8_t value);

  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }
  int num_classes() const { return num_classes_; }
  std::size_t pixel_count() const { return data_.size(); }

  std::uint8_t at(std::uint32_t row, std::uint32_t col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const std::uint8_t> data() const { return data_; }

  bool same_shape(const LabelMap& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::uint32_t height_ = 0;
  std::uint32_t width_ = 0;
  int num_classes_ = 0;
  std::vector<std::uint8_t> data_;
};

/// H x W x N per-pixel posteriors p(k|x), channel-last float32.
/// Every value is finite and non-negative, every pixel sums to 1 within
/// kPosteriorSumTolerance. Construction fails otherwise.
class ProbabilityMap {
 public:
  ProbabilityMap() = default;
  ProbabilityMap(std::uint32_t height, std::uint32_t width, int num_classes,
                 std::vector<float> data);

  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }
  int num_classes() const { return num_classes_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }

  float at(std::uint32_t row, std::uint32_t col, int k) const {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * num_classes_ + k];
  }
  std::span<const float> pixel(std::size_t index) const {
    return std::span<const float>(data_).subspan(index * num_classes_, num_classes_);
  }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const ProbabilityMap&, const ProbabilityMap&) = default;

 private:
  std::uint32_t height_ = 0;
  std::uint32_t width_ = 0;
  int num_classes_ = 0;
  std::vector<float> data_;
};

/// Pixel-wise class priors, H x W x N channel-last float32.
///
/// A raw stack holds relative frequencies: values in [0, 1] and per-pixel
/// sums of 1 within kRawPriorSumTolerance. A smoothed stack has every value in
/// [cutoff, 1] and carries no constraint on the per-pixel sum.
class PriorStack {
 public:
  PriorStack() = default;
  PriorStack(std::uint32_t height, std::uint32_t width, int num_classes,
             std::vector<float> data, bool smoothed, float cutoff);

  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }
  int num_classes() const { return num_classes_; }
  bool smoothed() const { return smoothed_; }
  float cutoff() const { return cutoff_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }

  float at(std::uint32_t row, std::uint32_t col, int k) const {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * num_classes_ + k];
  }
  std::span<const float> pixel(std::size_t index) const {
    return std::span<const float>(data_).subspan(index * num_classes_, num_classes_);
  }
  std::span<const float> data() const { return data_; }

  /// Copies channel k into a row-major H x W vector.
  std::vector<float> channel(int k) const;

  friend bool operator==(const PriorStack&, const PriorStack&) = default;

 private:
  std::uint32_t height_ = 0;
  std::uint32_t width_ = 0;
  int num_classes_ = 0;
  std::vector<float> data_;
  bool smoothed_ = false;
  float cutoff_ = 0.0f;
};

/// H x W scalar float32 image (the synthetic feature channel).
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::uint32_t height, std::uint32_t width, std::vector<float> data);

  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }
  std::size_t pixel_count() const { return data_.size(); }
  float at(std::uint32_t row, std::uint32_t col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::uint32_t height_ = 0;
  std::uint32_t width_ = 0;
  std::vector<float> data_;
};

/// Scalar per-class priors. Values are non-negative and sum to 1 within
/// kRawPriorSumTolerance. Consumers that divide by a prior check positivity.
class GlobalPriors {
 public:
  GlobalPriors() = default;
  explicit GlobalPriors(std::vector<double> values);

  int num_classes() const { return static_cast<int>(values_.size()); }
  double operator[](int k) const { return values_[static_cast<std::size_t>(k)]; }
  std::span<const double> values() const { return values_; }
  bool strictly_positive() const;

  friend bool operator==(const GlobalPriors&, const GlobalPriors&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace segdecide
