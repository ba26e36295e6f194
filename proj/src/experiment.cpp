#include "segdecide/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "segdecide/decision.hpp"
#include "segdecide/error.hpp"
#include "segdecide/metrics.hpp"
#include "segdecide/parallel.hpp"
#include "segdecide/tensor_io.hpp"

namespace segdecide {

namespace {

PriorSource prior_source_from_string(const std::string& s) {
  if (s == "estimated") return PriorSource::estimated;
  if (s == "uniform") return PriorSource::uniform;
  throw ConfigError("prior source must be 'estimated' or 'uniform', got '" + s + "'");
}

const char* to_string(PriorSource s) { return s == PriorSource::estimated ? "estimated" : "uniform"; }

PriorMode prior_mode_from_string(const std::string& s) {
  if (s == "local") return PriorMode::local;
  if (s == "global") return PriorMode::global;
  throw ConfigError("prior mode must be 'local' or 'global', got '" + s + "'");
}

const char* to_string(PriorMode m) { return m == PriorMode::local ? "local" : "global"; }

std::vector<LabelMap> training_labels(const SynthConfig& synth, std::uint64_t seed,
                                      std::uint64_t count, unsigned threads) {
  std::vector<LabelMap> labels(count);
  parallel_for(count, threads, [&](std::size_t i, unsigned) {
    labels[i] = generate_scene(synth, scene_seed(seed, kTrainSplitOffset + i)).gt;
  });
  return labels;
}

/// Global priors floored at the cutoff and rounded to float32, the precision
/// at which a prior stack stores the same values.
std::vector<double> floored_global(const GlobalPriors& global, double cutoff) {
  std::vector<double> out(global.values().begin(), global.values().end());
  for (double& v : out) v = static_cast<double>(static_cast<float>(std::max(v, cutoff)));
  return out;
}

PairedCost paired(const std::vector<double>& bayes, const std::vector<double>& ml) {
  const auto n = static_cast<double>(bayes.size());
  PairedCost p;
  for (std::size_t i = 0; i < bayes.size(); ++i) {
    p.bayes += bayes[i];
    p.ml += ml[i];
    p.mean_difference += bayes[i] - ml[i];
  }
  p.bayes /= n;
  p.ml /= n;
  p.mean_difference /= n;
  if (bayes.size() > 1) {
    double ss = 0.0;
    for (std::size_t i = 0; i < bayes.size(); ++i) {
      const double d = bayes[i] - ml[i] - p.mean_difference;
      ss += d * d;
    }
    p.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return p;
}

Json to_json(const PairedCost& c) {
  return Json{{"bayes", c.bayes},
              {"ml", c.ml},
              {"mean_difference", c.mean_difference},
              {"standard_error", c.standard_error}};
}

Json miou_json(double skip, double zero) {
  return Json{{"skip_undefined", skip}, {"count_undefined_as_zero", zero}};
}

std::uint64_t total(const std::vector<std::uint32_t>& counts) {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Json to_json(const RuleSummary& r) {
  Json summary = Json::array();
  for (const auto& s : r.segment_summary) summary.push_back(to_json(s));
  return Json{
      {"pixel",
       {{"confusion", to_json(r.confusion)},
        {"scores", to_json(r.scores)},
        {"miou",
         {{"per_image_mean", miou_json(r.miou_image_mean_skip, r.miou_image_mean_zero)},
          {"pooled", miou_json(r.miou_pooled_skip, r.miou_pooled_zero)}}}}},
      {"segments", {{"components", r.components}, {"summary", std::move(summary)}}},
      {"heatmaps",
       {{"pixel_level_total", total(r.heatmaps.pixel_level.counts)},
        {"pixel_level_max", r.heatmaps.pixel_level.max_count()},
        {"object_level_total", total(r.heatmaps.object_level.counts)},
        {"object_level_max", r.heatmaps.object_level.max_count()}}}};
}

std::vector<double> scores_of(const std::vector<SegmentScore>& scores, int class_id,
                              double SegmentScore::*field) {
  std::vector<double> out;
  for (const auto& s : scores) {
    if (s.class_id == class_id) out.push_back(s.*field);
  }
  return out;
}

Verdict at_least(std::string id, std::string description, double value, double threshold) {
  return {std::move(id), std::move(description), value >= threshold, value, threshold};
}

Verdict at_most(std::string id, std::string description, double value, double threshold) {
  return {std::move(id), std::move(description), value <= threshold, value, threshold};
}

/// Positive improvement of at least two standard errors of the paired difference.
Verdict cost_verdict(std::string id, std::string description, double improvement, double se) {
  Verdict v{std::move(id), std::move(description), false, improvement, 2.0 * se};
  v.pass = improvement > 0.0 && improvement >= v.threshold;
  return v;
}

Json verdicts_to_json(const std::vector<Verdict>& verdicts) {
  Json out = Json::array();
  for (const auto& v : verdicts) {
    out.push_back(Json{{"id", v.id},
                       {"description", v.description},
                       {"pass", v.pass},
                       {"value", v.value},
                       {"threshold", v.threshold}});
  }
  return out;
}

struct SceneOutput {
  ConfusionMatrix cm_bayes;
  ConfusionMatrix cm_ml;
  double miou[2][2] = {};  // [rule][policy]
  SegmentMatch match_bayes;
  SegmentMatch match_ml;
  std::vector<std::uint64_t> comp_gt;
  std::vector<std::uint64_t> comp_bayes;
  std::vector<std::uint64_t> comp_ml;
  double cost[4][2] = {};  // [model][rule]
};

}  // namespace

void ExperimentConfig::validate() const {
  synth.validate();
  const int n = synth.num_classes();
  priors.validate(n);
  if (test_scenes == 0) throw ConfigError("the test corpus is empty");
  if (train_scenes == 0) throw ConfigError("the training corpus is empty");
  if (!(cost_constant > 0.0) || !std::isfinite(cost_constant)) {
    throw ConfigError("cost constant must be positive");
  }
  if (analysis_class < 0 || analysis_class >= n) throw ConfigError("analysis class out of range");
  SizeHistogram check(bin_edges);
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  require_json_object(j, "experiment config");
  reject_unknown_keys(j,
                      {"seed", "train_scenes", "test_scenes", "synth", "priors", "postprocess",
                       "posterior_priors", "ml_priors", "ml_prior_mode", "cost_constant",
                       "analysis"},
                      "experiment config");
  ExperimentConfig c;
  if (!j.contains("synth")) throw ConfigError("experiment config: missing 'synth'");
  c.synth = synth_config_from_json(j.at("synth"));
  c.seed = json_value_or<std::uint64_t>(j, "seed", c.seed);
  c.train_scenes = json_value_or<std::uint64_t>(j, "train_scenes", c.train_scenes);
  c.test_scenes = json_value_or<std::uint64_t>(j, "test_scenes", c.test_scenes);
  if (j.contains("priors")) c.priors = prior_config_from_json(j.at("priors"));
  if (j.contains("postprocess")) c.postprocess = postprocess_from_json(j.at("postprocess"));
  c.posterior_priors =
      prior_source_from_string(json_value_or<std::string>(j, "posterior_priors", "estimated"));
  c.ml_priors = prior_source_from_string(json_value_or<std::string>(j, "ml_priors", "estimated"));
  c.ml_prior_mode = prior_mode_from_string(json_value_or<std::string>(j, "ml_prior_mode", "local"));
  c.cost_constant = json_value_or(j, "cost_constant", c.cost_constant);
  if (j.contains("analysis")) {
    const Json& a = j.at("analysis");
    require_json_object(a, "analysis");
    reject_unknown_keys(a, {"class_id", "bin_edges"}, "analysis");
    c.analysis_class = json_value_or(a, "class_id", c.analysis_class);
    c.bin_edges = json_value_or(a, "bin_edges", c.bin_edges);
  }
  c.validate();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  return Json{{"seed", c.seed},
              {"train_scenes", c.train_scenes},
              {"test_scenes", c.test_scenes},
              {"synth", to_json(c.synth)},
              {"priors", to_json(c.priors)},
              {"postprocess", to_json(c.postprocess)},
              {"posterior_priors", to_string(c.posterior_priors)},
              {"ml_priors", to_string(c.ml_priors)},
              {"ml_prior_mode", to_string(c.ml_prior_mode)},
              {"cost_constant", c.cost_constant},
              {"analysis", {{"class_id", c.analysis_class}, {"bin_edges", c.bin_edges}}}};
}

bool ExperimentResult::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  const SynthConfig& synth = config.synth;
  const int n = synth.num_classes();
  const std::uint32_t h = synth.height;
  const std::uint32_t w = synth.width;
  const int rare = config.analysis_class;

  ExperimentResult result;
  result.config = config;
  {
    const auto train = training_labels(synth, config.seed, config.train_scenes, threads);
    result.local_priors = smooth_priors(compute_pixel_priors(train, n), config.priors);
    result.global_priors = compute_global_priors(train, n);
  }

  const PriorWeights uniform = PriorWeights::global(std::vector<double>(n, 1.0 / n));
  const PriorWeights posterior_weights = config.posterior_priors == PriorSource::estimated
                                             ? PriorWeights::local(result.local_priors)
                                             : uniform;
  PriorWeights ml_weights = uniform;
  if (config.ml_priors == PriorSource::estimated) {
    ml_weights = config.ml_prior_mode == PriorMode::local
                     ? PriorWeights::local(result.local_priors)
                     : PriorWeights::global(floored_global(result.global_priors,
                                                           config.priors.cutoff));
  }
  const std::vector<double> cost_priors =
      floored_global(result.global_priors, config.priors.cutoff);
  const CostModel cost_models[3] = {
      CostModel::symmetric(config.cost_constant),
      CostModel::inverse_proportional(cost_priors, config.cost_constant, CostWeighting::predicted),
      CostModel::inverse_proportional(cost_priors, config.cost_constant, CostWeighting::truth)};

  const unsigned workers = resolve_threads(threads);
  std::vector<SceneOutput> scenes(config.test_scenes);
  std::vector<NondetectionHeatmaps> heat_bayes(workers);
  std::vector<NondetectionHeatmaps> heat_ml(workers);
  for (unsigned i = 0; i < workers; ++i) {
    for (auto* maps : {&heat_bayes[i], &heat_ml[i]}) {
      maps->pixel_level = Heatmap(h, w, HeatmapKind::pixel_level);
      maps->object_level = Heatmap(h, w, HeatmapKind::object_level);
    }
  }

  parallel_for(config.test_scenes, workers, [&](std::size_t i, unsigned worker) {
    const Scene scene = generate_scene(synth, scene_seed(config.seed, i));
    const ProbabilityMap post = oracle_posteriors(scene.features, synth, posterior_weights);
    const LabelMap pred[2] = {decide_bayes(post), decide_ml(post, ml_weights)};
    const std::string id = "test-" + std::to_string(i);
    const ComponentSet gt_set = postprocess(scene.gt, config.postprocess, id);

    SceneOutput& out = scenes[i];
    out.comp_gt = count_by_class(gt_set, n);
    for (int r = 0; r < 2; ++r) {
      const ComponentSet set = postprocess(pred[r], config.postprocess, id);
      ConfusionMatrix cm = confusion_matrix(pred[r], scene.gt);
      const ClassScores sc = class_scores(cm);
      out.miou[r][0] = mean_iou(sc, UndefinedPolicy::skip_undefined);
      out.miou[r][1] = mean_iou(sc, UndefinedPolicy::count_undefined_as_zero);
      for (int m = 0; m < 3; ++m) out.cost[m][r] = expected_cost(cm, cost_models[m]);

      double local_cost = 0.0;
      const auto truth = scene.gt.data();
      const auto decided = pred[r].data();
      for (std::size_t p = 0; p < truth.size(); ++p) {
        if (truth[p] != decided[p]) {
          local_cost += config.cost_constant / result.local_priors.pixel(p)[truth[p]];
        }
      }
      out.cost[3][r] = local_cost / static_cast<double>(truth.size());

      SegmentMatch match = match_segments(set, gt_set);
      accumulate_nondetection(r == 0 ? heat_bayes[worker] : heat_ml[worker], gt_set, set, rare);
      if (r == 0) {
        out.cm_bayes = std::move(cm);
        out.match_bayes = std::move(match);
        out.comp_bayes = count_by_class(set, n);
      } else {
        out.cm_ml = std::move(cm);
        out.match_ml = std::move(match);
        out.comp_ml = count_by_class(set, n);
      }
    }
  });

  result.gt_components.assign(n, 0);
  RuleSummary* rules[2] = {&result.bayes, &result.ml};
  for (int r = 0; r < 2; ++r) {
    RuleSummary& rule = *rules[r];
    rule.confusion = ConfusionMatrix(n);
    rule.components.assign(n, 0);
    rule.heatmaps.pixel_level = Heatmap(h, w, HeatmapKind::pixel_level);
    rule.heatmaps.object_level = Heatmap(h, w, HeatmapKind::object_level);
    for (const auto& maps : r == 0 ? heat_bayes : heat_ml) {
      rule.heatmaps.pixel_level += maps.pixel_level;
      rule.heatmaps.object_level += maps.object_level;
    }
  }
  std::vector<double> costs[4][2];
  for (const SceneOutput& s : scenes) {
    for (int k = 0; k < n; ++k) {
      result.gt_components[k] += s.comp_gt[k];
      result.bayes.components[k] += s.comp_bayes[k];
      result.ml.components[k] += s.comp_ml[k];
    }
    result.bayes.confusion += s.cm_bayes;
    result.ml.confusion += s.cm_ml;
    result.bayes.miou_image_mean_skip += s.miou[0][0];
    result.bayes.miou_image_mean_zero += s.miou[0][1];
    result.ml.miou_image_mean_skip += s.miou[1][0];
    result.ml.miou_image_mean_zero += s.miou[1][1];
    result.bayes.segments.append(s.match_bayes);
    result.ml.segments.append(s.match_ml);
    for (int m = 0; m < 4; ++m) {
      for (int r = 0; r < 2; ++r) costs[m][r].push_back(s.cost[m][r]);
    }
  }
  const auto count = static_cast<double>(scenes.size());
  for (RuleSummary* rule : rules) {
    rule->miou_image_mean_skip /= count;
    rule->miou_image_mean_zero /= count;
    rule->scores = class_scores(rule->confusion);
    rule->miou_pooled_skip = mean_iou(rule->scores, UndefinedPolicy::skip_undefined);
    rule->miou_pooled_zero = mean_iou(rule->scores, UndefinedPolicy::count_undefined_as_zero);
    rule->segment_summary = segment_score_summary(rule->segments, n);
  }
  result.symmetric_cost = paired(costs[0][0], costs[0][1]);
  result.inverse_cost = paired(costs[1][0], costs[1][1]);
  result.inverse_cost_true_class = paired(costs[2][0], costs[2][1]);
  result.inverse_cost_local_true_class = paired(costs[3][0], costs[3][1]);

  result.histograms =
      detection_histograms(result.bayes.segments, result.ml.segments, rare, config.bin_edges);

  auto& v = result.verdicts;
  v.push_back(cost_verdict("4a", "symmetric cost: Bayes below ML by at least 2 standard errors",
                           -result.symmetric_cost.mean_difference,
                           result.symmetric_cost.standard_error));
  v.push_back(cost_verdict("4b",
                           "inverse-proportional cost C/p(predicted): ML below Bayes by at least "
                           "2 standard errors",
                           result.inverse_cost.mean_difference,
                           result.inverse_cost.standard_error));

  const auto recall_b = scores_of(result.bayes.segments.ground_truth, rare, &SegmentScore::recall);
  const auto recall_m = scores_of(result.ml.segments.ground_truth, rare, &SegmentScore::recall);
  const auto prec_b = scores_of(result.bayes.segments.predicted, rare, &SegmentScore::precision);
  const auto prec_m = scores_of(result.ml.segments.predicted, rare, &SegmentScore::precision);
  if (!recall_b.empty()) {
    result.recall_bayes = EmpiricalCdf(recall_b);
    result.recall_ml = EmpiricalCdf(recall_m);
    result.recall_dominance = dominates_first_order(*result.recall_bayes, *result.recall_ml);
    v.push_back(at_most("5a", "rare-class segment recall: F_Bayes dominated by F_ML",
                        result.recall_dominance.violation, 0.02));
  } else {
    v.push_back({"5a", "rare-class segment recall: no ground-truth segments", false, 0.0, 0.02});
  }
  if (!prec_b.empty() && !prec_m.empty()) {
    result.precision_bayes = EmpiricalCdf(prec_b);
    result.precision_ml = EmpiricalCdf(prec_m);
    result.precision_dominance =
        dominates_first_order(*result.precision_ml, *result.precision_bayes);
    v.push_back(at_most("5b", "rare-class segment precision: F_ML dominated by F_Bayes",
                        result.precision_dominance.violation, 0.02));
  } else {
    v.push_back({"5b", "rare-class segment precision: a rule predicted no segments", false, 0.0,
                 0.02});
  }
  const auto& sum_b = result.bayes.segment_summary[rare];
  const auto& sum_m = result.ml.segment_summary[rare];
  v.push_back(at_most("5c", "rare-class non-detections: ML at most 0.8 x Bayes",
                      static_cast<double>(sum_m.non_detections),
                      0.8 * static_cast<double>(sum_b.non_detections)));
  v.push_back(at_least("5d", "rare-class predicted components: ML at least Bayes",
                       static_cast<double>(result.ml.components[rare]),
                       static_cast<double>(result.bayes.components[rare])));
  {
    const auto rb = result.bayes.scores.recall[rare];
    const auto rm = result.ml.scores.recall[rare];
    Verdict recall{"5e.recall", "rare-class pixel recall: ML above Bayes", false,
                   rm.value_or(0.0), rb.value_or(0.0)};
    recall.pass = rb && rm && *rm > *rb;
    v.push_back(recall);
    const auto pb = result.bayes.scores.precision[rare];
    const auto pm = result.ml.scores.precision[rare];
    Verdict precision{"5e.precision", "rare-class pixel precision: Bayes above ML", false,
                      pb.value_or(0.0), pm.value_or(0.0)};
    precision.pass = pb && pm && *pb > *pm;
    v.push_back(precision);
  }
  return result;
}

Json ExperimentResult::report() const {
  const int n = config.synth.num_classes();
  Json priors_json;
  priors_json["global"] = to_json(global_priors)["values"];
  std::vector<double> local_mean(n, 0.0), local_min(n, 1.0), local_max(n, 0.0);
  for (std::size_t p = 0; p < local_priors.pixel_count(); ++p) {
    const auto px = local_priors.pixel(p);
    for (int k = 0; k < n; ++k) {
      local_mean[k] += px[k];
      local_min[k] = std::min(local_min[k], static_cast<double>(px[k]));
      local_max[k] = std::max(local_max[k], static_cast<double>(px[k]));
    }
  }
  for (double& m : local_mean) m /= static_cast<double>(local_priors.pixel_count());
  priors_json["local_mean"] = local_mean;
  priors_json["local_min"] = local_min;
  priors_json["local_max"] = local_max;
  const auto sets = prior_comparison_sets(local_priors, global_priors, config.analysis_class);
  const auto leq = std::count(sets.mask_leq.begin(), sets.mask_leq.end(), 1);
  priors_json["analysis_class_leq_fraction"] =
      static_cast<double>(leq) / static_cast<double>(sets.mask_leq.size());

  std::vector<std::uint64_t> gt_pixels(n);
  for (int k = 0; k < n; ++k) gt_pixels[k] = bayes.confusion.row_sum(k);
  const double total_pixels = static_cast<double>(bayes.confusion.total());
  std::vector<double> share(n);
  for (int k = 0; k < n; ++k) share[k] = static_cast<double>(gt_pixels[k]) / total_pixels;

  auto cdf_json = [](const std::optional<EmpiricalCdf>& b, const std::optional<EmpiricalCdf>& m,
                     const DominanceResult& d) {
    if (!b || !m) return Json(nullptr);
    return Json{{"bayes_samples", b->count()},
                {"ml_samples", m->count()},
                {"bayes_at_zero", (*b)(0.0)},
                {"ml_at_zero", (*m)(0.0)},
                {"dominance", to_json(d)}};
  };

  return Json{
      {"format", "segdecide-experiment-report/1"},
      {"seed", config.seed},
      {"config", to_json(config)},
      {"corpus",
       {{"train_scenes", config.train_scenes},
        {"test_scenes", config.test_scenes},
        {"height", config.synth.height},
        {"width", config.synth.width},
        {"num_classes", n}}},
      {"priors", std::move(priors_json)},
      {"ground_truth",
       {{"pixels", gt_pixels}, {"pixel_share", share}, {"components", gt_components}}},
      {"rules", {{"bayes", to_json(bayes)}, {"ml", to_json(ml)}}},
      {"cost",
       {{"symmetric", to_json(symmetric_cost)},
        {"inverse_proportional", to_json(inverse_cost)},
        {"inverse_proportional_true_class", to_json(inverse_cost_true_class)},
        {"inverse_proportional_local_true_class", to_json(inverse_cost_local_true_class)}}},
      {"analysis",
       {{"class_id", config.analysis_class},
        {"recall_cdf", cdf_json(recall_bayes, recall_ml, recall_dominance)},
        {"precision_cdf", cdf_json(precision_bayes, precision_ml, precision_dominance)},
        {"false_detection_histogram", to_json(histograms.false_detection)},
        {"non_detection_histogram", to_json(histograms.non_detection)}}},
      {"verdicts", verdicts_to_json(verdicts)},
      {"all_pass", all_pass()}};
}

void write_experiment_artifacts(const ExperimentResult& result, const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("output directory does not exist: " + dir.string());
  }
  const int c = result.config.analysis_class;
  write_json_file(dir / "report.json", result.report());
  write_tensor(dir / "local_priors.sgt", result.local_priors);
  write_json_file(dir / "global_priors.json", to_json(result.global_priors));
  if (result.recall_bayes) {
    write_text_file(dir / "recall_cdf.csv", cdf_csv(*result.recall_bayes, *result.recall_ml));
  }
  if (result.precision_bayes) {
    write_text_file(dir / "precision_cdf.csv",
                    cdf_csv(*result.precision_bayes, *result.precision_ml));
  }
  write_text_file(dir / "false_detection_histogram.csv",
                  histogram_csv(result.histograms.false_detection));
  write_text_file(dir / "non_detection_histogram.csv",
                  histogram_csv(result.histograms.non_detection));
  write_heatmap(dir / "heatmap_bayes_pixel.pgm", result.bayes.heatmaps.pixel_level, c);
  write_heatmap(dir / "heatmap_bayes_object.pgm", result.bayes.heatmaps.object_level, c);
  write_heatmap(dir / "heatmap_ml_pixel.pgm", result.ml.heatmaps.pixel_level, c);
  write_heatmap(dir / "heatmap_ml_object.pgm", result.ml.heatmaps.object_level, c);
}

// ---------------------------------------------------------------------------

void ScenarioConfig::validate() const {
  synth.validate();
  const int n = synth.num_classes();
  priors.validate(n);
  if (train_scenes == 0) throw ConfigError("the training corpus is empty");
  if (rare_class < 0 || rare_class >= n || confusable_class < 0 || confusable_class >= n ||
      rare_class == confusable_class) {
    throw ConfigError("rare and confusable classes must be distinct valid class ids");
  }
  if (object_height == 0 || object_width == 0) throw ConfigError("planted object is empty");
  if (static_cast<std::uint64_t>(object_height) * object_width < postprocess.min_size) {
    throw ConfigError("planted object is smaller than the post-processing minimum size");
  }
  if (region_height < object_height || region_width < object_width ||
      region_top + region_height > synth.height || region_left + region_width > synth.width) {
    throw ConfigError("search region must lie inside the image and fit the object");
  }
  for (int k : absent_classes) {
    if (k < 0 || k >= n) throw ConfigError("absent class out of range");
  }
  if (local_equals_global && placement == Placement::conflict) {
    throw ConfigError("a conflict placement is infeasible when local priors equal global ones");
  }
}

ScenarioConfig scenario_config_from_json(const Json& j) {
  require_json_object(j, "scenario config");
  reject_unknown_keys(j,
                      {"seed", "train_scenes", "synth", "priors", "postprocess", "rare_class",
                       "confusable_class", "object", "region", "placement",
                       "local_equals_global", "absent_classes"},
                      "scenario config");
  ScenarioConfig c;
  if (!j.contains("synth")) throw ConfigError("scenario config: missing 'synth'");
  c.synth = synth_config_from_json(j.at("synth"));
  c.seed = json_value_or<std::uint64_t>(j, "seed", c.seed);
  c.train_scenes = json_value_or<std::uint64_t>(j, "train_scenes", c.train_scenes);
  if (j.contains("priors")) c.priors = prior_config_from_json(j.at("priors"));
  if (j.contains("postprocess")) c.postprocess = postprocess_from_json(j.at("postprocess"));
  c.rare_class = json_value_or(j, "rare_class", c.rare_class);
  c.confusable_class = json_value_or(j, "confusable_class", c.confusable_class);
  if (j.contains("object")) {
    const Json& o = j.at("object");
    require_json_object(o, "object");
    reject_unknown_keys(o, {"height", "width"}, "object");
    c.object_height = json_value_or(o, "height", c.object_height);
    c.object_width = json_value_or(o, "width", c.object_width);
  }
  c.region_height = c.synth.height;
  c.region_width = c.synth.width;
  if (j.contains("region")) {
    const Json& r = j.at("region");
    require_json_object(r, "region");
    reject_unknown_keys(r, {"top", "left", "height", "width"}, "region");
    c.region_top = json_value_or(r, "top", c.region_top);
    c.region_left = json_value_or(r, "left", c.region_left);
    c.region_height = json_value_or(r, "height", c.region_height);
    c.region_width = json_value_or(r, "width", c.region_width);
  }
  const auto placement = json_value_or<std::string>(j, "placement", "conflict");
  if (placement == "conflict") {
    c.placement = Placement::conflict;
  } else if (placement == "favorable") {
    c.placement = Placement::favorable;
  } else {
    throw ConfigError("placement must be 'conflict' or 'favorable', got '" + placement + "'");
  }
  c.local_equals_global = json_value_or(j, "local_equals_global", c.local_equals_global);
  c.absent_classes = json_value_or(j, "absent_classes", c.absent_classes);
  c.validate();
  return c;
}

Json to_json(const ScenarioConfig& c) {
  return Json{{"seed", c.seed},
              {"train_scenes", c.train_scenes},
              {"synth", to_json(c.synth)},
              {"priors", to_json(c.priors)},
              {"postprocess", to_json(c.postprocess)},
              {"rare_class", c.rare_class},
              {"confusable_class", c.confusable_class},
              {"object", {{"height", c.object_height}, {"width", c.object_width}}},
              {"region",
               {{"top", c.region_top},
                {"left", c.region_left},
                {"height", c.region_height},
                {"width", c.region_width}}},
              {"placement", c.placement == Placement::conflict ? "conflict" : "favorable"},
              {"local_equals_global", c.local_equals_global},
              {"absent_classes", c.absent_classes}};
}

namespace {

/// (H+1) x (W+1) summed-area table.
class AreaSum {
 public:
  AreaSum(std::uint32_t h, std::uint32_t w, const std::vector<double>& values)
      : w_(w + 1), table_(static_cast<std::size_t>(h + 1) * (w + 1), 0.0) {
    for (std::uint32_t r = 0; r < h; ++r) {
      for (std::uint32_t c = 0; c < w; ++c) {
        table_[(r + 1) * w_ + c + 1] = values[static_cast<std::size_t>(r) * w + c] +
                                       table_[r * w_ + c + 1] + table_[(r + 1) * w_ + c] -
                                       table_[r * w_ + c];
      }
    }
  }
  double sum(std::uint32_t top, std::uint32_t left, std::uint32_t h, std::uint32_t w) const {
    return table_[(top + h) * w_ + left + w] - table_[top * w_ + left + w] -
           table_[(top + h) * w_ + left] + table_[top * w_ + left];
  }

 private:
  std::size_t w_;
  std::vector<double> table_;
};

ScenarioRule score_rule(const LabelMap& decided, const ComponentSet& gt_set,
                        const PostprocessParams& params, const PlantedObject& obj, int rare) {
  const ComponentSet set = postprocess(decided, params);
  const SegmentMatch match = match_segments(set, gt_set);
  const auto index = render_index(gt_set);
  const std::int32_t seg = index[static_cast<std::size_t>(obj.top) * gt_set.width + obj.left];
  ScenarioRule rule;
  rule.recall = match.ground_truth.at(static_cast<std::size_t>(seg)).recall;
  rule.detected = rule.recall > 0.0;
  for (std::uint32_t r = obj.top; r < obj.top + obj.height; ++r) {
    for (std::uint32_t c = obj.left; c < obj.left + obj.width; ++c) {
      if (decided.at(r, c) == rare) ++rule.predicted_pixels;
    }
  }
  return rule;
}

}  // namespace

ScenarioResult global_vs_local_scenario(const ScenarioConfig& config, unsigned threads) {
  config.validate();
  const SynthConfig& synth = config.synth;
  const int n = synth.num_classes();
  const std::uint32_t h = synth.height;
  const std::uint32_t w = synth.width;

  PriorStack local;
  GlobalPriors global;
  {
    const auto train = training_labels(synth, config.seed, config.train_scenes, threads);
    local = smooth_priors(compute_pixel_priors(train, n), config.priors);
    global = compute_global_priors(train, n);
  }
  if (config.local_equals_global) {
    local = broadcast_global_priors(global, h, w, static_cast<float>(config.priors.cutoff));
  }

  const auto rare_sets = prior_comparison_sets(local, global, config.rare_class);
  const auto conf_sets = prior_comparison_sets(local, global, config.confusable_class);
  const bool conflict = config.placement == Placement::conflict;
  std::vector<double> bad(static_cast<std::size_t>(h) * w);
  for (std::size_t p = 0; p < bad.size(); ++p) {
    const bool ok = conflict ? rare_sets.mask_gt[p] && conf_sets.mask_leq[p]
                             : static_cast<bool>(rare_sets.mask_leq[p]);
    bad[p] = ok ? 0.0 : 1.0;
  }
  const auto rare_channel = local.channel(config.rare_class);
  const AreaSum bad_sum(h, w, bad);
  const AreaSum rare_sum(h, w, std::vector<double>(rare_channel.begin(), rare_channel.end()));

  const auto conf_channel = local.channel(config.confusable_class);
  const AreaSum conf_sum(h, w, std::vector<double>(conf_channel.begin(), conf_channel.end()));

  std::optional<PlantedObject> best;
  double best_mass = 0.0;
  double best_conf = 0.0;
  const std::uint32_t oh = config.object_height;
  const std::uint32_t ow = config.object_width;
  for (std::uint32_t top = config.region_top; top + oh <= config.region_top + config.region_height;
       ++top) {
    for (std::uint32_t left = config.region_left;
         left + ow <= config.region_left + config.region_width; ++left) {
      if (bad_sum.sum(top, left, oh, ow) > 0.5) continue;
      const double mass = rare_sum.sum(top, left, oh, ow);
      const double conf = conf_sum.sum(top, left, oh, ow);
      const bool better = !best || (conflict ? mass < best_mass || (mass == best_mass && conf > best_conf)
                                             : mass > best_mass);
      if (better) {
        best = PlantedObject{config.rare_class, top, left, oh, ow};
        best_mass = mass;
        best_conf = conf;
      }
    }
  }
  if (!best) throw ConfigError("no feasible placement for the planted object in the region");

  ScenarioResult result;
  result.config = config;
  result.planted = *best;
  const double area = static_cast<double>(oh) * ow;
  for (std::uint32_t r = best->top; r < best->top + oh; ++r) {
    for (std::uint32_t c = best->left; c < best->left + ow; ++c) {
      result.rare_local_mean += local.at(r, c, config.rare_class);
      result.confusable_local_mean += local.at(r, c, config.confusable_class);
    }
  }
  result.rare_local_mean /= area;
  result.confusable_local_mean /= area;
  result.rare_global = global[config.rare_class];
  result.confusable_global = global[config.confusable_class];

  SynthConfig scene_config = synth;
  for (int k : config.absent_classes) scene_config.classes[k].count_mean = 0.0;
  const PlantedObject planted[] = {*best};
  const Scene scene = generate_scene(scene_config, scene_seed(config.seed, 0), planted);
  const ProbabilityMap post = oracle_posteriors(scene.features, synth, PriorWeights::local(local));
  const LabelMap ml_local = decide_ml(post, PriorWeights::local(local));
  const LabelMap ml_global =
      decide_ml(post, PriorWeights::global(floored_global(global, config.priors.cutoff)));

  const ComponentSet gt_set = postprocess(scene.gt, config.postprocess);
  result.ml_global = score_rule(ml_global, gt_set, config.postprocess, *best, config.rare_class);
  result.ml_local = score_rule(ml_local, gt_set, config.postprocess, *best, config.rare_class);
  result.decisions_identical = ml_local == ml_global;

  auto& v = result.verdicts;
  if (conflict) {
    v.push_back(at_most("6.global", "ML with global priors: planted object recall is 0",
                        result.ml_global.recall, 0.0));
    Verdict local{"6.local", "ML with local priors: planted object recall above 0.5", false,
                  result.ml_local.recall, 0.5};
    local.pass = local.value > local.threshold;
    v.push_back(local);
  } else {
    Verdict both{"6.both", "favorable placement: both rules detect the planted object",
                 result.ml_global.detected && result.ml_local.detected,
                 std::min(result.ml_global.recall, result.ml_local.recall), 0.0};
    v.push_back(both);
    if (config.local_equals_global) {
      v.push_back({"6.identical", "local priors equal to global: decisions identical",
                   result.decisions_identical, result.decisions_identical ? 1.0 : 0.0, 1.0});
    }
  }
  return result;
}

bool ScenarioResult::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

Json ScenarioResult::report() const {
  auto rule = [](const ScenarioRule& r) {
    return Json{{"recall", r.recall},
                {"detected", r.detected},
                {"object_pixels_predicted", r.predicted_pixels}};
  };
  return Json{{"format", "segdecide-scenario-report/1"},
              {"config", to_json(config)},
              {"planted",
               {{"class", planted.class_id},
                {"top", planted.top},
                {"left", planted.left},
                {"height", planted.height},
                {"width", planted.width}}},
              {"priors_at_object",
               {{"rare_local_mean", rare_local_mean},
                {"rare_global", rare_global},
                {"confusable_local_mean", confusable_local_mean},
                {"confusable_global", confusable_global}}},
              {"rules", {{"ml_global", rule(ml_global)}, {"ml_local", rule(ml_local)}}},
              {"decisions_identical", decisions_identical},
              {"verdicts", verdicts_to_json(verdicts)},
              {"all_pass", all_pass()}};
}

}  // namespace segdecide
