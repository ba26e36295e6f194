#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "segdecide/metrics.hpp"
#include "segdecide/tensor.hpp"

namespace segdecide {

enum class PriorMode { local, global };

/// Strictly positive per-class divisors for the ML rule, either one value per
/// (pixel, class) or one value per class. Unlike PriorStack and GlobalPriors
/// this carries no normalization constraint, so any positive rescaling is
/// representable.
class PriorWeights {
 public:
  static PriorWeights local(const PriorStack& priors);
  static PriorWeights global(const GlobalPriors& priors);
  static PriorWeights local(std::uint32_t height, std::uint32_t width, int num_classes,
                            std::vector<double> values);
  static PriorWeights global(std::vector<double> values);

  PriorMode mode() const { return mode_; }
  int num_classes() const { return num_classes_; }
  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }

  /// Priors that apply at pixel `index` (row-major).
  std::span<const double> at_pixel(std::size_t index) const {
    if (mode_ == PriorMode::global) return values_;
    return std::span<const double>(values_).subspan(index * num_classes_, num_classes_);
  }

 private:
  PriorWeights(PriorMode mode, std::uint32_t height, std::uint32_t width, int num_classes,
               std::vector<double> values);

  PriorMode mode_ = PriorMode::global;
  std::uint32_t height_ = 0;
  std::uint32_t width_ = 0;
  int num_classes_ = 0;
  std::vector<double> values_;
};

enum class RuleKind { bayes, maximum_likelihood };

struct DecisionRule {
  RuleKind kind = RuleKind::bayes;
  /// Required iff kind == maximum_likelihood.
  std::optional<PriorWeights> priors;

  static DecisionRule bayes() { return {}; }
  static DecisionRule maximum_likelihood(PriorWeights priors) {
    return {RuleKind::maximum_likelihood, std::move(priors)};
  }
};

/// argmax_k p(k|x) per pixel, ties to the smallest class id.
LabelMap decide_bayes(const ProbabilityMap& probs);

/// argmax_k p(k|x) / p(k) per pixel, ties to the smallest class id. The ratio
/// is evaluated in double precision.
LabelMap decide_ml(const ProbabilityMap& probs, const PriorWeights& priors);

LabelMap decide(const ProbabilityMap& probs, const DecisionRule& rule);

/// Elementwise mean of several posterior maps (e.g. MC-dropout samples).
ProbabilityMap average_probability_maps(std::span<const ProbabilityMap> maps);

enum class CostKind { symmetric, inverse_proportional };

/// Which class's prior divides the cost constant of an inverse-proportional
/// cost. `predicted` charges C / p(k_hat) for deciding k_hat when the truth is
/// k; `truth` charges C / p(k), the weighting under which the ML rule
/// minimizes the expected cost.
enum class CostWeighting { predicted, truth };

struct CostModel {
  CostKind kind = CostKind::symmetric;
  double constant = 1.0;
  /// Required (strictly positive) iff kind == inverse_proportional.
  std::vector<double> priors;
  CostWeighting weighting = CostWeighting::predicted;

  static CostModel symmetric(double constant = 1.0);
  static CostModel inverse_proportional(const GlobalPriors& priors, double constant = 1.0,
                                        CostWeighting weighting = CostWeighting::predicted);
  static CostModel inverse_proportional(std::vector<double> priors, double constant = 1.0,
                                        CostWeighting weighting = CostWeighting::predicted);
};

/// Empirical mean cost per pixel:
///   symmetric:            C * (off-diagonal count) / total
///   inverse_proportional: sum_{k_hat != k} A[k][k_hat] * C / p(.) / total
double expected_cost(const ConfusionMatrix& confusion, const CostModel& model);

}  // namespace segdecide
