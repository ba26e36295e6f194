#pragma once

// End-to-end runs on synthetic corpora: prior estimation on a training split,
// oracle posteriors on a test split, both decision rules, post-processing,
// metrics and analysis, with a verdict per qualitative property.
//
// Scene i of the test split uses scene_seed(seed, i); scene i of the training
// split uses scene_seed(seed, 2^32 + i). Reports contain no timestamps and do
// not depend on the worker count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segdecide/analysis.hpp"
#include "segdecide/components.hpp"
#include "segdecide/priors.hpp"
#include "segdecide/serialization.hpp"
#include "segdecide/synth.hpp"

namespace segdecide {

inline constexpr std::uint64_t kTrainSplitOffset = std::uint64_t{1} << 32;

/// Which priors feed a stage: the ones estimated on the training split, or 1/N.
enum class PriorSource { estimated, uniform };

struct ExperimentConfig {
  SynthConfig synth;
  std::uint64_t seed = 7;
  std::uint64_t train_scenes = 400;
  std::uint64_t test_scenes = 200;
  PriorConfig priors;
  PostprocessParams postprocess;
  /// Priors inside the oracle posteriors.
  PriorSource posterior_priors = PriorSource::estimated;
  /// Priors the ML rule divides by.
  PriorSource ml_priors = PriorSource::estimated;
  PriorMode ml_prior_mode = PriorMode::local;
  double cost_constant = 1.0;
  /// Class examined by the segment-level analysis (the rare class).
  int analysis_class = 1;
  std::vector<double> bin_edges = default_size_edges();

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const Json& j);
Json to_json(const ExperimentConfig& config);

struct Verdict {
  std::string id;
  std::string description;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct PairedCost {
  double bayes = 0.0;
  double ml = 0.0;
  /// Mean over scenes of (bayes - ml) and its standard error.
  double mean_difference = 0.0;
  double standard_error = 0.0;
};

struct RuleSummary {
  ConfusionMatrix confusion;
  ClassScores scores;
  double miou_image_mean_skip = 0.0;
  double miou_image_mean_zero = 0.0;
  double miou_pooled_skip = 0.0;
  double miou_pooled_zero = 0.0;
  SegmentMatch segments;
  std::vector<ClassSegmentSummary> segment_summary;
  std::vector<std::uint64_t> components;
  NondetectionHeatmaps heatmaps;
};

struct ExperimentResult {
  ExperimentConfig config;
  PriorStack local_priors;  // smoothed
  GlobalPriors global_priors;
  std::vector<std::uint64_t> gt_components;
  RuleSummary bayes;
  RuleSummary ml;
  PairedCost symmetric_cost;
  /// C / p(k_hat), the predicted class's global prior.
  PairedCost inverse_cost;
  /// C / p(k), the true class's global prior.
  PairedCost inverse_cost_true_class;
  /// C / p_ij(k), the true class's local prior at the pixel.
  PairedCost inverse_cost_local_true_class;
  DetectionHistograms histograms;
  /// Empty when the analysis class has no ground-truth (recall) or no
  /// predicted (precision) segments.
  std::optional<EmpiricalCdf> recall_bayes;
  std::optional<EmpiricalCdf> recall_ml;
  std::optional<EmpiricalCdf> precision_bayes;
  std::optional<EmpiricalCdf> precision_ml;
  DominanceResult recall_dominance;     // F_B^r dominated by F_ML^r
  DominanceResult precision_dominance;  // F_ML^p dominated by F_B^p
  std::vector<Verdict> verdicts;

  bool all_pass() const;
  Json report() const;
};

/// Throws ConfigError for an empty test split or an invalid configuration.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// Writes report.json, the CDF and histogram CSVs, and the heatmap PGMs with
/// their sidecars into `dir`, which must exist.
void write_experiment_artifacts(const ExperimentResult& result, const std::filesystem::path& dir);

enum class Placement { conflict, favorable };

struct ScenarioConfig {
  SynthConfig synth;
  std::uint64_t seed = 11;
  std::uint64_t train_scenes = 300;
  PriorConfig priors;
  PostprocessParams postprocess;
  int rare_class = 1;
  int confusable_class = 2;
  std::uint32_t object_height = 8;
  std::uint32_t object_width = 8;
  /// Rectangle searched for a placement: top, left, height, width.
  std::uint32_t region_top = 0;
  std::uint32_t region_left = 0;
  std::uint32_t region_height = 0;
  std::uint32_t region_width = 0;
  /// conflict: every object pixel has global > local prior for the rare class
  /// and global <= local prior for the confusable class; the position with
  /// the smallest local rare prior mass wins, ties going to the largest
  /// confusable mass. favorable: every object pixel has global <= local prior
  /// for the rare class; the largest rare mass wins. Remaining ties go to the
  /// first position in raster order.
  Placement placement = Placement::conflict;
  /// Replace the local priors by the global ones everywhere.
  bool local_equals_global = false;
  /// Classes with no random objects in the test scene.
  std::vector<int> absent_classes;

  void validate() const;
};

ScenarioConfig scenario_config_from_json(const Json& j);
Json to_json(const ScenarioConfig& config);

struct ScenarioRule {
  double recall = 0.0;
  bool detected = false;
  std::uint64_t predicted_pixels = 0;  // object pixels decided as the rare class
};

struct ScenarioResult {
  ScenarioConfig config;
  PlantedObject planted;
  double rare_local_mean = 0.0;
  double rare_global = 0.0;
  double confusable_local_mean = 0.0;
  double confusable_global = 0.0;
  ScenarioRule ml_global;
  ScenarioRule ml_local;
  /// The two ML decisions agree on every pixel of the image.
  bool decisions_identical = false;
  /// conflict placement: global misses (recall 0) and local detects
  /// (recall > 0.5). favorable placement: both detect; with local priors
  /// equal to global ones the decisions must also be identical.
  std::vector<Verdict> verdicts;

  bool all_pass() const;
  Json report() const;
};

/// Throws ConfigError when no feasible placement exists in the region.
ScenarioResult global_vs_local_scenario(const ScenarioConfig& config, unsigned threads = 1);

}  // namespace segdecide
