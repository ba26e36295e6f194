#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "segdecide/tensor.hpp"

namespace segdecide {

struct PriorConfig {
  /// Gaussian standard deviation in pixels. Zero disables smoothing.
  double sigma = 80.0;
  /// Floor applied to every smoothed prior so the ML rule never divides by zero.
  double cutoff = 1e-5;
  /// Kernel half-width as a multiple of sigma, rounded up.
  double kernel_radius_sigmas = 3.0;

  /// Throws ConfigError unless sigma >= 0, 0 < cutoff < 1/N and
  /// kernel_radius_sigmas >= 1.
  void validate(int num_classes) const;
};

/// prior[i, j, k] = (number of maps labelled k at (i, j)) / (number of maps).
PriorStack compute_pixel_priors(std::span<const LabelMap> labels, int num_classes);

/// Normalized, truncated 1-D Gaussian of radius ceil(radius_sigmas * sigma).
/// Returns {1} for sigma == 0.
std::vector<double> gaussian_kernel(double sigma, double radius_sigmas);

/// Index into [0, n) under half-sample symmetric reflection
/// (... c b a | a b c ... ), valid for any offset.
inline std::int64_t reflect_index(std::int64_t i, std::int64_t n) {
  const std::int64_t period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

/// Separable Gaussian blur of every channel with reflected borders, followed
/// by the cutoff floor. Channels are not renormalized afterwards.
PriorStack smooth_priors(const PriorStack& raw, const PriorConfig& config);

/// values[k] = pixels of class k over the corpus / total pixels.
GlobalPriors compute_global_priors(std::span<const LabelMap> labels, int num_classes);

/// Partition of the image into pixels where the global prior of a class is
/// at most its local prior (mask_leq) and the rest (mask_gt).
struct PriorComparisonSets {
  int class_id = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint8_t> mask_leq;
  std::vector<std::uint8_t> mask_gt;
};

PriorComparisonSets prior_comparison_sets(const PriorStack& local, const GlobalPriors& global,
                                          int class_id);

/// Stack whose every pixel holds max(global[k], floor). Used to run the
/// local-prior code path with location-independent priors.
PriorStack broadcast_global_priors(const GlobalPriors& global, std::uint32_t height,
                                   std::uint32_t width, float floor);

}  // namespace segdecide
