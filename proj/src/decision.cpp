#include "segdecide/decision.hpp"

#include <cmath>
#include <string>

#include "segdecide/error.hpp"

namespace segdecide {

namespace {

void check_positive(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw ConfigError("prior at flat index " + std::to_string(i) + " is not strictly positive (" +
                        std::to_string(values[i]) + ")");
    }
  }
}

}  // namespace

PriorWeights::PriorWeights(PriorMode mode, std::uint32_t height, std::uint32_t width,
                           int num_classes, std::vector<double> values)
    : mode_(mode), height_(height), width_(width), num_classes_(num_classes),
      values_(std::move(values)) {
  if (num_classes_ < 1 || num_classes_ > kMaxClasses) {
    throw ConfigError("prior class count outside [1, 256]");
  }
  const std::size_t expected =
      mode_ == PriorMode::global
          ? static_cast<std::size_t>(num_classes_)
          : static_cast<std::size_t>(height_) * width_ * static_cast<std::size_t>(num_classes_);
  if (values_.size() != expected) throw ShapeError("prior value count does not match shape");
  check_positive(values_);
}

PriorWeights PriorWeights::local(const PriorStack& priors) {
  std::vector<double> values(priors.data().begin(), priors.data().end());
  return PriorWeights(PriorMode::local, priors.height(), priors.width(), priors.num_classes(),
                      std::move(values));
}

PriorWeights PriorWeights::global(const GlobalPriors& priors) {
  return global(std::vector<double>(priors.values().begin(), priors.values().end()));
}

PriorWeights PriorWeights::local(std::uint32_t height, std::uint32_t width, int num_classes,
                                 std::vector<double> values) {
  return PriorWeights(PriorMode::local, height, width, num_classes, std::move(values));
}

PriorWeights PriorWeights::global(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  return PriorWeights(PriorMode::global, 0, 0, n, std::move(values));
}

LabelMap decide_bayes(const ProbabilityMap& probs) {
  const std::size_t n = static_cast<std::size_t>(probs.num_classes());
  std::vector<std::uint8_t> out(probs.pixel_count());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto px = probs.pixel(p);
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (px[k] > px[best]) best = k;
    }
    out[p] = static_cast<std::uint8_t>(best);
  }
  return LabelMap(probs.height(), probs.width(), probs.num_classes(), std::move(out));
}

LabelMap decide_ml(const ProbabilityMap& probs, const PriorWeights& priors) {
  if (priors.num_classes() != probs.num_classes()) {
    throw ShapeError("priors have " + std::to_string(priors.num_classes()) +
                     " classes, posteriors have " + std::to_string(probs.num_classes()));
  }
  if (priors.mode() == PriorMode::local &&
      (priors.height() != probs.height() || priors.width() != probs.width())) {
    throw ShapeError("local priors are " + std::to_string(priors.height()) + "x" +
                     std::to_string(priors.width()) + ", posteriors are " +
                     std::to_string(probs.height()) + "x" + std::to_string(probs.width()));
  }
  const std::size_t n = static_cast<std::size_t>(probs.num_classes());
  std::vector<std::uint8_t> out(probs.pixel_count());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto px = probs.pixel(p);
    const auto prior = priors.at_pixel(p);
    std::size_t best = 0;
    double best_ratio = static_cast<double>(px[0]) / prior[0];
    for (std::size_t k = 1; k < n; ++k) {
      const double ratio = static_cast<double>(px[k]) / prior[k];
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = k;
      }
    }
    out[p] = static_cast<std::uint8_t>(best);
  }
  return LabelMap(probs.height(), probs.width(), probs.num_classes(), std::move(out));
}

LabelMap decide(const ProbabilityMap& probs, const DecisionRule& rule) {
  if (rule.kind == RuleKind::bayes) return decide_bayes(probs);
  if (!rule.priors) throw ConfigError("the ML rule needs priors");
  return decide_ml(probs, *rule.priors);
}

ProbabilityMap average_probability_maps(std::span<const ProbabilityMap> maps) {
  if (maps.empty()) throw ConfigError("averaging needs at least one probability map");
  const ProbabilityMap& first = maps.front();
  std::vector<double> acc(first.data().size(), 0.0);
  for (std::size_t m = 0; m < maps.size(); ++m) {
    const auto& map = maps[m];
    if (map.height() != first.height() || map.width() != first.width() ||
        map.num_classes() != first.num_classes()) {
      throw ShapeError("probability map " + std::to_string(m) + " differs in shape from map 0");
    }
    const auto data = map.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += data[i];
  }
  std::vector<float> out(acc.size());
  const auto count = static_cast<double>(maps.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] / count);
  return ProbabilityMap(first.height(), first.width(), first.num_classes(), std::move(out));
}

CostModel CostModel::symmetric(double constant) {
  if (!(constant > 0.0)) throw ConfigError("cost constant must be positive");
  return {CostKind::symmetric, constant, {}, CostWeighting::predicted};
}

CostModel CostModel::inverse_proportional(const GlobalPriors& priors, double constant,
                                          CostWeighting weighting) {
  return inverse_proportional(std::vector<double>(priors.values().begin(), priors.values().end()),
                              constant, weighting);
}

CostModel CostModel::inverse_proportional(std::vector<double> priors, double constant,
                                          CostWeighting weighting) {
  if (!(constant > 0.0)) throw ConfigError("cost constant must be positive");
  check_positive(priors);
  return {CostKind::inverse_proportional, constant, std::move(priors), weighting};
}

double expected_cost(const ConfusionMatrix& confusion, const CostModel& model) {
  const std::uint64_t total = confusion.total();
  if (total == 0) throw ConfigError("expected cost of an empty confusion matrix");
  if (!(model.constant > 0.0)) throw ConfigError("cost constant must be positive");
  const int n = confusion.num_classes();
  if (model.kind == CostKind::inverse_proportional) {
    if (static_cast<int>(model.priors.size()) != n) {
      throw ShapeError("cost priors do not match the confusion matrix class count");
    }
    check_positive(model.priors);
  }
  double cost = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int k_hat = 0; k_hat < n; ++k_hat) {
      if (k == k_hat) continue;
      const auto count = static_cast<double>(confusion(k, k_hat));
      if (count == 0.0) continue;
      if (model.kind == CostKind::symmetric) {
        cost += count * model.constant;
      } else {
        const int weighted = model.weighting == CostWeighting::predicted ? k_hat : k;
        cost += count * model.constant / model.priors[static_cast<std::size_t>(weighted)];
      }
    }
  }
  return cost / static_cast<double>(total);
}

}  // namespace segdecide
