#pragma once

// Synthetic scenes with location-dependent, class-imbalanced object placement
// and a scalar Gaussian feature per pixel.
//
// Scene stream order for generate_scene(config, seed):
//   1. rng = Xoshiro256(seed)
//   2. for each non-background class k in ascending order:
//        n = rng.poisson(count_mean_k)
//        repeat n times:
//          h = rng.uniform_int(size_min, size_max)
//          w = rng.uniform_int(size_min, size_max)
//          do { row = mu_row + sd_row * rng.normal();
//               col = mu_col + sd_col * rng.normal(); }
//          while (row, col) lies outside [0, H) x [0, W)
//   3. the label map is filled with the background class, then every object
//      is painted in generation order (later on top), then planted objects
//   4. one feature per pixel in raster order: mu_gt + sd_gt * rng.normal()
//
// A rectangle of size h x w centred at (row, col) covers rows
// [floor(row - h/2), floor(row - h/2) + h) and likewise for columns. An
// ellipse covers the pixels of that box whose centres fall inside the
// inscribed ellipse.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "segdecide/decision.hpp"
#include "segdecide/tensor.hpp"

namespace segdecide {

enum class ObjectShape { rectangle, ellipse };

struct ClassModel {
  std::string name;
  /// Poisson mean of the number of objects per scene. Ignored for the background class.
  double count_mean = 0.0;
  /// Object height and width are drawn independently from [size_min, size_max].
  std::uint32_t size_min = 1;
  std::uint32_t size_max = 1;
  ObjectShape shape = ObjectShape::rectangle;
  double placement_mean_row = 0.0;
  double placement_mean_col = 0.0;
  double placement_std_row = 1.0;
  double placement_std_col = 1.0;
  double feature_mean = 0.0;
  double feature_std = 1.0;
};

struct SynthConfig {
  std::uint32_t height = 64;
  std::uint32_t width = 64;
  int background_class = 0;
  std::vector<ClassModel> classes;
  std::uint64_t seed = 0;

  int num_classes() const { return static_cast<int>(classes.size()); }
  /// Throws ConfigError for N < 2, out-of-image placement means,
  /// non-positive feature deviations, repeated feature means or an
  /// unsatisfiable size range.
  void validate() const;
  /// count_mean * E[area] / (H * W), ignoring occlusion and border clipping.
  double expected_pixel_share(int class_id) const;
};

struct Scene {
  LabelMap gt;
  FeatureMap features;
  std::uint64_t seed = 0;
};

/// An object painted on top of the random ones (used to stage scenarios).
struct PlantedObject {
  int class_id = 0;
  std::uint32_t top = 0;
  std::uint32_t left = 0;
  std::uint32_t height = 1;
  std::uint32_t width = 1;
};

Scene generate_scene(const SynthConfig& config, std::uint64_t seed,
                     std::span<const PlantedObject> planted = {});

/// Seed of scene `index` in a corpus: mix_seed(master_seed ^ index).
std::uint64_t scene_seed(std::uint64_t master_seed, std::uint64_t index);

/// Exact posterior of the generative model at one pixel, in double precision:
/// p(k|x) proportional to phi((x - mu_k) / s_k) / s_k * prior_k.
std::vector<double> oracle_posterior_at(double feature, const SynthConfig& config,
                                        std::span<const double> priors);

/// oracle_posterior_at for every pixel, rounded to float32.
ProbabilityMap oracle_posteriors(const FeatureMap& features, const SynthConfig& config,
                                 const PriorWeights& priors);

}  // namespace segdecide
