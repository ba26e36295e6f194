#include "segdecide/tensor.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "segdecide/error.hpp"

namespace segdecide {

namespace {

void check_dims(std::uint32_t height, std::uint32_t width, int num_classes,
                std::size_t data_size, std::size_t channels, const char* what) {
  if (num_classes < 1 || num_classes > kMaxClasses) {
    throw InvariantError(std::string(what) + ": class count " + std::to_string(num_classes) +
                         " outside [1, 256]");
  }
  const std::size_t expected = static_cast<std::size_t>(height) * width * channels;
  if (data_size != expected) {
    throw InvariantError(std::string(what) + ": data length " + std::to_string(data_size) +
                         " does not match " + std::to_string(height) + "x" +
                         std::to_string(width) + "x" + std::to_string(channels));
  }
}

std::string pixel_name(std::size_t index, std::uint32_t width) {
  std::ostringstream os;
  os << "pixel (" << index / width << ", " << index % width << ")";
  return os.str();
}

}  // namespace

LabelMap::LabelMap(std::uint32_t height, std::uint32_t width, int num_classes,
                   std::vector<std::uint8_t> data)
    : height_(height), width_(width), num_classes_(num_classes), data_(std::move(data)) {
  check_dims(height_, width_, num_classes_, data_.size(), 1, "LabelMap");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] >= num_classes_) {
      throw InvariantError("LabelMap: " + pixel_name(i, width_) + " has class " +
                           std::to_string(data_[i]) + " >= " + std::to_string(num_classes_));
    }
  }
}

LabelMap LabelMap::filled(std::uint32_t height, std::uint32_t width, int num_classes,
                          std::uint8_t value) {
  return LabelMap(height, width, num_classes,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, value));
}

ProbabilityMap::ProbabilityMap(std::uint32_t height, std::uint32_t width, int num_classes,
                               std::vector<float> data)
    : height_(height), width_(width), num_classes_(num_classes), data_(std::move(data)) {
  check_dims(height_, width_, num_classes_, data_.size(),
             static_cast<std::size_t>(num_classes_), "ProbabilityMap");
  const std::size_t n = static_cast<std::size_t>(num_classes_);
  for (std::size_t p = 0; p < pixel_count(); ++p) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const float v = data_[p * n + k];
      if (!std::isfinite(v) || v < 0.0f) {
        throw InvariantError("ProbabilityMap: " + pixel_name(p, width_) + " class " +
                             std::to_string(k) + " has invalid value " + std::to_string(v));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kPosteriorSumTolerance) {
      throw InvariantError("ProbabilityMap: " + pixel_name(p, width_) + " channel sum " +
                           std::to_string(sum) + " differs from 1 by more than 1e-4");
    }
  }
}

PriorStack::PriorStack(std::uint32_t height, std::uint32_t width, int num_classes,
                       std::vector<float> data, bool smoothed, float cutoff)
    : height_(height),
      width_(width),
      num_classes_(num_classes),
      data_(std::move(data)),
      smoothed_(smoothed),
      cutoff_(smoothed ? cutoff : 0.0f) {
  check_dims(height_, width_, num_classes_, data_.size(),
             static_cast<std::size_t>(num_classes_), "PriorStack");
  if (smoothed_ && !(cutoff_ > 0.0f && cutoff_ < 1.0f)) {
    throw InvariantError("PriorStack: cutoff " + std::to_string(cutoff_) + " outside (0, 1)");
  }
  const std::size_t n = static_cast<std::size_t>(num_classes_);
  const float lo = smoothed_ ? cutoff_ : 0.0f;
  for (std::size_t p = 0; p < pixel_count(); ++p) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const float v = data_[p * n + k];
      if (!(v >= lo && v <= 1.0f)) {
        throw InvariantError("PriorStack: " + pixel_name(p, width_) + " class " +
                             std::to_string(k) + " value " + std::to_string(v) + " outside [" +
                             std::to_string(lo) + ", 1]");
      }
      sum += v;
    }
    if (!smoothed_ && std::abs(sum - 1.0) > kRawPriorSumTolerance) {
      throw InvariantError("PriorStack: " + pixel_name(p, width_) + " raw prior sum " +
                           std::to_string(sum) + " differs from 1 by more than 1e-6");
    }
  }
}

std::vector<float> PriorStack::channel(int k) const {
  std::vector<float> out(pixel_count());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = data_[p * num_classes_ + k];
  }
  return out;
}

FeatureMap::FeatureMap(std::uint32_t height, std::uint32_t width, std::vector<float> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != static_cast<std::size_t>(height_) * width_) {
    throw InvariantError("FeatureMap: data length does not match shape");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw InvariantError("FeatureMap: " + pixel_name(i, width_) + " is not finite");
    }
  }
}

GlobalPriors::GlobalPriors(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty() || values_.size() > kMaxClasses) {
    throw InvariantError("GlobalPriors: class count outside [1, 256]");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]) || values_[k] < 0.0) {
      throw InvariantError("GlobalPriors: class " + std::to_string(k) + " has invalid value " +
                           std::to_string(values_[k]));
    }
    sum += values_[k];
  }
  if (std::abs(sum - 1.0) > kRawPriorSumTolerance) {
    throw InvariantError("GlobalPriors: values sum to " + std::to_string(sum));
  }
}

bool GlobalPriors::strictly_positive() const {
  for (double v : values_) {
    if (!(v > 0.0)) return false;
  }
  return true;
}

}  // namespace segdecide
