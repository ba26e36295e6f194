#include "segdecide/priors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segdecide/error.hpp"

namespace segdecide {

void PriorConfig::validate(int num_classes) const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("prior sigma must be a finite value >= 0");
  }
  if (!(kernel_radius_sigmas >= 1.0) || !std::isfinite(kernel_radius_sigmas)) {
    throw ConfigError("kernel_radius_sigmas must be >= 1");
  }
  if (!(cutoff > 0.0) || !(cutoff < 1.0 / std::max(num_classes, 1))) {
    throw ConfigError("prior cutoff must lie in (0, 1/N), got " + std::to_string(cutoff));
  }
}

namespace {

void check_corpus(std::span<const LabelMap> labels, int num_classes) {
  if (labels.empty()) throw ConfigError("prior estimation needs at least one label map");
  if (num_classes < 1 || num_classes > kMaxClasses) {
    throw ConfigError("class count outside [1, 256]");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i].same_shape(labels.front())) {
      throw ShapeError("label map " + std::to_string(i) + " is " +
                       std::to_string(labels[i].height()) + "x" +
                       std::to_string(labels[i].width()) + ", expected " +
                       std::to_string(labels.front().height()) + "x" +
                       std::to_string(labels.front().width()));
    }
    if (labels[i].num_classes() > num_classes) {
      const auto data = labels[i].data();
      const auto it = std::find_if(data.begin(), data.end(),
                                   [num_classes](std::uint8_t v) { return v >= num_classes; });
      if (it != data.end()) {
        throw InvariantError("label map " + std::to_string(i) + " contains class " +
                             std::to_string(*it) + " >= " + std::to_string(num_classes));
      }
    }
  }
}

}  // namespace

PriorStack compute_pixel_priors(std::span<const LabelMap> labels, int num_classes) {
  check_corpus(labels, num_classes);
  const std::size_t pixels = labels.front().pixel_count();
  const std::size_t n = static_cast<std::size_t>(num_classes);
  std::vector<std::uint32_t> counts(pixels * n, 0);
  for (const auto& map : labels) {
    const auto data = map.data();
    for (std::size_t p = 0; p < pixels; ++p) ++counts[p * n + data[p]];
  }
  const double total = static_cast<double>(labels.size());
  std::vector<float> data(counts.size());
  std::transform(counts.begin(), counts.end(), data.begin(),
                 [total](std::uint32_t c) { return static_cast<float>(c / total); });
  return PriorStack(labels.front().height(), labels.front().width(), num_classes,
                    std::move(data), false, 0.0f);
}

std::vector<double> gaussian_kernel(double sigma, double radius_sigmas) {
  if (sigma == 0.0) return {1.0};
  const auto radius = static_cast<std::int64_t>(std::ceil(radius_sigmas * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::int64_t d = -radius; d <= radius; ++d) {
    const double w = std::exp(-0.5 * static_cast<double>(d * d) / (sigma * sigma));
    kernel[static_cast<std::size_t>(d + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;
  return kernel;
}

PriorStack smooth_priors(const PriorStack& raw, const PriorConfig& config) {
  if (raw.smoothed()) throw ConfigError("prior stack is already smoothed");
  config.validate(raw.num_classes());

  const auto height = static_cast<std::int64_t>(raw.height());
  const auto width = static_cast<std::int64_t>(raw.width());
  const std::size_t n = static_cast<std::size_t>(raw.num_classes());
  const auto kernel = gaussian_kernel(config.sigma, config.kernel_radius_sigmas);
  const auto radius = static_cast<std::int64_t>(kernel.size() / 2);
  const auto cutoff = static_cast<float>(config.cutoff);

  std::vector<float> out(raw.data().size());
  std::vector<double> plane(static_cast<std::size_t>(height * width));
  std::vector<double> tmp(plane.size());
  const auto src = raw.data();

  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t p = 0; p < plane.size(); ++p) plane[p] = src[p * n + k];

    // Horizontal then vertical pass.
    for (std::int64_t r = 0; r < height; ++r) {
      for (std::int64_t c = 0; c < width; ++c) {
        double acc = 0.0;
        for (std::int64_t d = -radius; d <= radius; ++d) {
          acc += kernel[static_cast<std::size_t>(d + radius)] *
                 plane[static_cast<std::size_t>(r * width + reflect_index(c + d, width))];
        }
        tmp[static_cast<std::size_t>(r * width + c)] = acc;
      }
    }
    for (std::int64_t r = 0; r < height; ++r) {
      for (std::int64_t c = 0; c < width; ++c) {
        double acc = 0.0;
        for (std::int64_t d = -radius; d <= radius; ++d) {
          acc += kernel[static_cast<std::size_t>(d + radius)] *
                 tmp[static_cast<std::size_t>(reflect_index(r + d, height) * width + c)];
        }
        const float v = std::min(static_cast<float>(acc), 1.0f);
        out[static_cast<std::size_t>(r * width + c) * n + k] = std::max(v, cutoff);
      }
    }
  }
  return PriorStack(raw.height(), raw.width(), raw.num_classes(), std::move(out), true, cutoff);
}

GlobalPriors compute_global_priors(std::span<const LabelMap> labels, int num_classes) {
  check_corpus(labels, num_classes);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(num_classes), 0);
  std::uint64_t total = 0;
  for (const auto& map : labels) {
    for (std::uint8_t v : map.data()) ++counts[v];
    total += map.pixel_count();
  }
  if (total == 0) throw ConfigError("label corpus has no pixels");
  std::vector<double> values(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    values[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  }
  return GlobalPriors(std::move(values));
}

PriorComparisonSets prior_comparison_sets(const PriorStack& local, const GlobalPriors& global,
                                          int class_id) {
  if (local.num_classes() != global.num_classes()) {
    throw ShapeError("local and global priors disagree on the class count");
  }
  if (class_id < 0 || class_id >= local.num_classes()) {
    throw ConfigError("class id " + std::to_string(class_id) + " out of range");
  }
  PriorComparisonSets sets;
  sets.class_id = class_id;
  sets.height = local.height();
  sets.width = local.width();
  sets.mask_leq.resize(local.pixel_count());
  sets.mask_gt.resize(local.pixel_count());
  // Compare at the stack's precision so a local prior equal to the global one counts as <=.
  const auto g = static_cast<float>(global[class_id]);
  for (std::size_t p = 0; p < local.pixel_count(); ++p) {
    const bool leq = g <= local.pixel(p)[static_cast<std::size_t>(class_id)];
    sets.mask_leq[p] = leq ? 1 : 0;
    sets.mask_gt[p] = leq ? 0 : 1;
  }
  return sets;
}

PriorStack broadcast_global_priors(const GlobalPriors& global, std::uint32_t height,
                                   std::uint32_t width, float floor) {
  const std::size_t n = static_cast<std::size_t>(global.num_classes());
  std::vector<float> data(static_cast<std::size_t>(height) * width * n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::max(static_cast<float>(global[static_cast<int>(i % n)]), floor);
  }
  return PriorStack(height, width, global.num_classes(), std::move(data), true, floor);
}

}  // namespace segdecide
