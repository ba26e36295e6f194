#include "segdecide/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "segdecide/error.hpp"
#include "segdecide/rng.hpp"

namespace segdecide {

namespace {

struct ObjectDraw {
  int class_id;
  std::uint32_t height;
  std::uint32_t width;
  double row;
  double col;
  ObjectShape shape;
};

void paint(std::vector<std::uint8_t>& labels, std::uint32_t img_h, std::uint32_t img_w,
           const ObjectDraw& obj) {
  const auto top = static_cast<std::int64_t>(std::floor(obj.row - obj.height / 2.0));
  const auto left = static_cast<std::int64_t>(std::floor(obj.col - obj.width / 2.0));
  const double half_h = obj.height / 2.0;
  const double half_w = obj.width / 2.0;
  for (std::int64_t r = std::max<std::int64_t>(top, 0);
       r < std::min<std::int64_t>(top + obj.height, img_h); ++r) {
    for (std::int64_t c = std::max<std::int64_t>(left, 0);
         c < std::min<std::int64_t>(left + obj.width, img_w); ++c) {
      if (obj.shape == ObjectShape::ellipse) {
        const double dr = (static_cast<double>(r) + 0.5 - obj.row) / half_h;
        const double dc = (static_cast<double>(c) + 0.5 - obj.col) / half_w;
        if (dr * dr + dc * dc > 1.0) continue;
      }
      labels[static_cast<std::size_t>(r) * img_w + static_cast<std::size_t>(c)] =
          static_cast<std::uint8_t>(obj.class_id);
    }
  }
}

}  // namespace

void SynthConfig::validate() const {
  const int n = num_classes();
  if (n < 2 || n > kMaxClasses) throw ConfigError("synthetic config needs 2..256 classes");
  if (height == 0 || width == 0) throw ConfigError("synthetic image must be non-empty");
  if (background_class < 0 || background_class >= n) {
    throw ConfigError("background class out of range");
  }
  for (int k = 0; k < n; ++k) {
    const ClassModel& m = classes[static_cast<std::size_t>(k)];
    const std::string who = "class " + std::to_string(k) + " (" + m.name + ")";
    if (!(m.feature_std > 0.0) || !std::isfinite(m.feature_std) ||
        !std::isfinite(m.feature_mean)) {
      throw ConfigError(who + ": feature std must be positive and finite");
    }
    for (int j = 0; j < k; ++j) {
      if (classes[static_cast<std::size_t>(j)].feature_mean == m.feature_mean) {
        throw ConfigError(who + ": feature mean repeats class " + std::to_string(j));
      }
    }
    if (k == background_class) continue;
    if (!(m.count_mean >= 0.0) || m.count_mean > 500.0) {
      throw ConfigError(who + ": object count mean must lie in [0, 500]");
    }
    if (m.size_min < 1 || m.size_min > m.size_max || m.size_min > std::min(height, width)) {
      throw ConfigError(who + ": unsatisfiable object size range [" + std::to_string(m.size_min) +
                        ", " + std::to_string(m.size_max) + "]");
    }
    if (!(m.placement_mean_row >= 0.0 && m.placement_mean_row < height &&
          m.placement_mean_col >= 0.0 && m.placement_mean_col < width)) {
      throw ConfigError(who + ": placement mean lies outside the image");
    }
    if (!(m.placement_std_row > 0.0) || !(m.placement_std_col > 0.0)) {
      throw ConfigError(who + ": placement std must be positive");
    }
  }
}

double SynthConfig::expected_pixel_share(int class_id) const {
  if (class_id == background_class) return 0.0;
  const ClassModel& m = classes.at(static_cast<std::size_t>(class_id));
  const double side = (m.size_min + m.size_max) / 2.0;
  double area = side * side;
  if (m.shape == ObjectShape::ellipse) area *= std::numbers::pi / 4.0;
  return m.count_mean * area / (static_cast<double>(height) * width);
}

std::uint64_t scene_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix_seed(master_seed ^ index);
}

Scene generate_scene(const SynthConfig& config, std::uint64_t seed,
                     std::span<const PlantedObject> planted) {
  config.validate();
  Xoshiro256 rng(seed);
  const std::uint32_t h = config.height;
  const std::uint32_t w = config.width;

  std::vector<ObjectDraw> objects;
  for (int k = 0; k < config.num_classes(); ++k) {
    if (k == config.background_class) continue;
    const ClassModel& m = config.classes[static_cast<std::size_t>(k)];
    const std::uint32_t count = rng.poisson(m.count_mean);
    for (std::uint32_t i = 0; i < count; ++i) {
      ObjectDraw obj{k, 0, 0, 0.0, 0.0, m.shape};
      obj.height = static_cast<std::uint32_t>(rng.uniform_int(m.size_min, m.size_max));
      obj.width = static_cast<std::uint32_t>(rng.uniform_int(m.size_min, m.size_max));
      bool inside = false;
      for (int attempt = 0; attempt < 100000 && !inside; ++attempt) {
        obj.row = m.placement_mean_row + m.placement_std_row * rng.normal();
        obj.col = m.placement_mean_col + m.placement_std_col * rng.normal();
        inside = obj.row >= 0.0 && obj.row < h && obj.col >= 0.0 && obj.col < w;
      }
      if (!inside) throw ConfigError("could not place an object inside the image");
      objects.push_back(obj);
    }
  }

  std::vector<std::uint8_t> labels(static_cast<std::size_t>(h) * w,
                                   static_cast<std::uint8_t>(config.background_class));
  for (const auto& obj : objects) paint(labels, h, w, obj);
  for (const auto& p : planted) {
    if (p.class_id < 0 || p.class_id >= config.num_classes()) {
      throw ConfigError("planted object class out of range");
    }
    for (std::uint32_t r = p.top; r < std::min(p.top + p.height, h); ++r) {
      for (std::uint32_t c = p.left; c < std::min(p.left + p.width, w); ++c) {
        labels[static_cast<std::size_t>(r) * w + c] = static_cast<std::uint8_t>(p.class_id);
      }
    }
  }

  std::vector<float> features(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const ClassModel& m = config.classes[labels[i]];
    features[i] = static_cast<float>(m.feature_mean + m.feature_std * rng.normal());
  }

  Scene scene;
  scene.gt = LabelMap(h, w, config.num_classes(), std::move(labels));
  scene.features = FeatureMap(h, w, std::move(features));
  scene.seed = seed;
  return scene;
}

std::vector<double> oracle_posterior_at(double feature, const SynthConfig& config,
                                        std::span<const double> priors) {
  const std::size_t n = config.classes.size();
  if (priors.size() != n) throw ShapeError("prior count does not match the class count");
  std::vector<double> log_post(n);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(priors[k] > 0.0)) throw ConfigError("oracle posteriors need strictly positive priors");
    const ClassModel& m = config.classes[k];
    const double z = (feature - m.feature_mean) / m.feature_std;
    log_post[k] = -0.5 * z * z - std::log(m.feature_std) + std::log(priors[k]);
    best = std::max(best, log_post[k]);
  }
  double sum = 0.0;
  for (double& v : log_post) {
    v = std::exp(v - best);
    sum += v;
  }
  for (double& v : log_post) v /= sum;
  return log_post;
}

ProbabilityMap oracle_posteriors(const FeatureMap& features, const SynthConfig& config,
                                 const PriorWeights& priors) {
  if (priors.num_classes() != config.num_classes()) {
    throw ShapeError("prior class count does not match the synthetic config");
  }
  if (priors.mode() == PriorMode::local &&
      (priors.height() != features.height() || priors.width() != features.width())) {
    throw ShapeError("local priors do not match the feature map shape");
  }
  const std::size_t n = config.classes.size();
  std::vector<float> out(features.pixel_count() * n);
  const auto x = features.data();
  for (std::size_t p = 0; p < features.pixel_count(); ++p) {
    const auto post = oracle_posterior_at(x[p], config, priors.at_pixel(p));
    for (std::size_t k = 0; k < n; ++k) out[p * n + k] = static_cast<float>(post[k]);
  }
  return ProbabilityMap(features.height(), features.width(), config.num_classes(),
                        std::move(out));
}

}  // namespace segdecide
