#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "segdecide/analysis.hpp"
#include "segdecide/components.hpp"
#include "segdecide/decision.hpp"
#include "segdecide/error.hpp"
#include "segdecide/experiment.hpp"
#include "segdecide/metrics.hpp"
#include "segdecide/parallel.hpp"
#include "segdecide/priors.hpp"
#include "segdecide/serialization.hpp"
#include "segdecide/synth.hpp"
#include "segdecide/tensor_io.hpp"

namespace segdecide::cli {

namespace {

namespace fs = std::filesystem;

/// Bad flag combination detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Files named directly, plus every *.sgt file (sorted by name) inside named directories.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".sgt") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) throw IoError("no .sgt files in " + p.string());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<LabelMap> load_labels(const std::vector<fs::path>& paths, int num_classes,
                                  unsigned threads) {
  std::vector<LabelMap> maps(paths.size());
  parallel_for(paths.size(), threads, [&](std::size_t i, unsigned) {
    maps[i] = read_label_map(paths[i], num_classes);
  });
  return maps;
}

void require_same_count(const std::vector<fs::path>& a, const std::vector<fs::path>& b,
                        const char* what) {
  if (a.size() != b.size()) {
    throw UsageError(std::string(what) + ": " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + " files");
  }
}

Connectivity parse_connectivity(int value) {
  return value == 4 ? Connectivity::four : Connectivity::eight;
}

void add_postprocess_flags(CLI::App* cmd, int& connectivity, PostprocessParams& params) {
  cmd->add_option("--connectivity", connectivity, "Pixel connectivity")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
  cmd->add_option("--min-size", params.min_size, "Discard components below this many pixels")
      ->capture_default_str();
  cmd->add_option("--max-gap", params.max_gap, "Merge same-class components with fewer pixels in between")
      ->capture_default_str();
}

Json verdict_lines(const Json& verdicts) {
  for (const auto& v : verdicts) {
    std::cerr << (v["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << v["id"].get<std::string>()
              << ": " << v["description"].get<std::string>() << " (value "
              << v["value"].dump() << ", threshold " << v["threshold"].dump() << ")\n";
  }
  return verdicts;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// --- priors ---------------------------------------------------------------

struct PriorsArgs {
  std::vector<std::string> labels;
  int num_classes = 0;
  double sigma = 80.0;
  double cutoff = 1e-5;
  double radius = 3.0;
  std::string config;
  std::string out;
  std::string raw_out;
  std::string global_out;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* cutoff_opt = nullptr;
  CLI::Option* radius_opt = nullptr;
};

void run_priors(const PriorsArgs& a, unsigned threads) {
  PriorConfig config;
  if (!a.config.empty()) config = prior_config_from_json(read_json_file(a.config));
  if (a.sigma_opt->count()) config.sigma = a.sigma;
  if (a.cutoff_opt->count()) config.cutoff = a.cutoff;
  if (a.radius_opt->count()) config.kernel_radius_sigmas = a.radius;
  config.validate(a.num_classes);

  const auto maps = load_labels(expand_inputs(a.labels), a.num_classes, threads);
  const PriorStack raw = compute_pixel_priors(maps, a.num_classes);
  write_tensor(a.out, smooth_priors(raw, config));
  if (!a.raw_out.empty()) write_tensor(a.raw_out, raw);
  if (!a.global_out.empty()) {
    write_json_file(a.global_out, to_json(compute_global_priors(maps, a.num_classes)));
  }
}

// --- decide ---------------------------------------------------------------

struct DecideArgs {
  std::vector<std::string> probs;
  std::string rule = "bayes";
  std::string priors;
  std::string global_priors;
  std::string out;
};

void run_decide(const DecideArgs& a, unsigned threads) {
  const auto paths = expand_inputs(a.probs);
  std::vector<ProbabilityMap> maps(paths.size());
  parallel_for(paths.size(), threads,
               [&](std::size_t i, unsigned) { maps[i] = read_probability_map(paths[i]); });
  const ProbabilityMap probs =
      maps.size() == 1 ? std::move(maps.front()) : average_probability_maps(maps);

  if (a.rule == "bayes") {
    if (!a.priors.empty() || !a.global_priors.empty()) {
      throw UsageError("--rule bayes takes no priors");
    }
    write_tensor(a.out, decide_bayes(probs));
    return;
  }
  if (a.priors.empty() == a.global_priors.empty()) {
    throw UsageError("--rule ml needs exactly one of --priors and --global-priors");
  }
  const PriorWeights weights =
      !a.priors.empty() ? PriorWeights::local(read_prior_stack(a.priors))
                        : PriorWeights::global(global_priors_from_json(read_json_file(a.global_priors)));
  write_tensor(a.out, decide_ml(probs, weights));
}

// --- eval -----------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> pred;
  std::vector<std::string> gt;
  int num_classes = 0;
  int connectivity = 8;
  PostprocessParams post;
  std::string cost_priors;
  double cost_constant = 1.0;
  bool segments = true;
  std::string out;
};

void run_eval(EvalArgs a, unsigned threads) {
  a.post.connectivity = parse_connectivity(a.connectivity);
  const auto pred_paths = expand_inputs(a.pred);
  const auto gt_paths = expand_inputs(a.gt);
  require_same_count(pred_paths, gt_paths, "--pred and --gt differ in length");
  const int n = a.num_classes;
  std::optional<GlobalPriors> cost_priors;
  if (!a.cost_priors.empty()) cost_priors = global_priors_from_json(read_json_file(a.cost_priors));

  struct ImageEval {
    ConfusionMatrix cm;
    ClassScores scores;
    double miou_skip = 0.0;
    double miou_zero = 0.0;
    SegmentMatch match;
    std::vector<std::uint64_t> comp_pred;
    std::vector<std::uint64_t> comp_gt;
  };
  std::vector<ImageEval> images(pred_paths.size());
  parallel_for(images.size(), threads, [&](std::size_t i, unsigned) {
    const LabelMap pred = read_label_map(pred_paths[i], n);
    const LabelMap gt = read_label_map(gt_paths[i], n);
    ImageEval& e = images[i];
    e.cm = confusion_matrix(pred, gt);
    e.scores = class_scores(e.cm);
    e.miou_skip = mean_iou(e.scores, UndefinedPolicy::skip_undefined);
    e.miou_zero = mean_iou(e.scores, UndefinedPolicy::count_undefined_as_zero);
    const std::string id = pred_paths[i].filename().string();
    const ComponentSet pred_set = postprocess(pred, a.post, id);
    const ComponentSet gt_set = postprocess(gt, a.post, id);
    e.match = match_segments(pred_set, gt_set);
    e.comp_pred = count_by_class(pred_set, n);
    e.comp_gt = count_by_class(gt_set, n);
  });

  ConfusionMatrix pooled(n);
  SegmentMatch all;
  std::vector<std::uint64_t> comp_pred(n, 0), comp_gt(n, 0);
  double mean_skip = 0.0, mean_zero = 0.0;
  Json per_image = Json::array();
  for (std::size_t i = 0; i < images.size(); ++i) {
    const ImageEval& e = images[i];
    pooled += e.cm;
    all.append(e.match);
    for (int k = 0; k < n; ++k) {
      comp_pred[k] += e.comp_pred[k];
      comp_gt[k] += e.comp_gt[k];
    }
    mean_skip += e.miou_skip;
    mean_zero += e.miou_zero;
    Json img{{"pred", pred_paths[i].string()},
             {"gt", gt_paths[i].string()},
             {"confusion", to_json(e.cm)},
             {"scores", to_json(e.scores)},
             {"miou", {{"skip_undefined", e.miou_skip}, {"count_undefined_as_zero", e.miou_zero}}}};
    if (a.segments) {
      Json p = Json::array(), g = Json::array();
      for (const auto& s : e.match.predicted) p.push_back(to_json(s));
      for (const auto& s : e.match.ground_truth) g.push_back(to_json(s));
      img["segments"] = {{"predicted", std::move(p)}, {"ground_truth", std::move(g)}};
    }
    per_image.push_back(std::move(img));
  }
  const double count = static_cast<double>(images.size());
  const ClassScores scores = class_scores(pooled);
  Json summary = Json::array();
  for (const auto& s : segment_score_summary(all, n)) summary.push_back(to_json(s));
  Json aggregate{
      {"images", images.size()},
      {"confusion", to_json(pooled)},
      {"scores", to_json(scores)},
      {"miou",
       {{"per_image_mean",
         {{"skip_undefined", mean_skip / count}, {"count_undefined_as_zero", mean_zero / count}}},
        {"pooled",
         {{"skip_undefined", mean_iou(scores, UndefinedPolicy::skip_undefined)},
          {"count_undefined_as_zero", mean_iou(scores, UndefinedPolicy::count_undefined_as_zero)}}}}},
      {"components", {{"predicted", comp_pred}, {"ground_truth", comp_gt}}},
      {"segment_summary", std::move(summary)}};
  Json cost{{"symmetric", expected_cost(pooled, CostModel::symmetric(a.cost_constant))}};
  if (cost_priors) {
    cost["inverse_proportional"] = expected_cost(
        pooled, CostModel::inverse_proportional(*cost_priors, a.cost_constant));
    cost["inverse_proportional_true_class"] = expected_cost(
        pooled,
        CostModel::inverse_proportional(*cost_priors, a.cost_constant, CostWeighting::truth));
  }
  aggregate["cost"] = std::move(cost);

  write_json_file(a.out, Json{{"format", "segdecide-eval-report/1"},
                              {"num_classes", n},
                              {"postprocess", to_json(a.post)},
                              {"aggregate", std::move(aggregate)},
                              {"per_image", std::move(per_image)}});
}

// --- analyze --------------------------------------------------------------

struct AnalyzeArgs {
  std::vector<std::string> gt;
  std::vector<std::string> bayes;
  std::vector<std::string> ml;
  int num_classes = 0;
  int class_id = 0;
  std::vector<double> bins = default_size_edges();
  int connectivity = 8;
  PostprocessParams post;
  std::string out_dir;
};

void run_analyze(AnalyzeArgs a, unsigned threads) {
  a.post.connectivity = parse_connectivity(a.connectivity);
  if (a.class_id < 0 || a.class_id >= a.num_classes) throw UsageError("--class-id out of range");
  if (!fs::is_directory(a.out_dir)) throw IoError("output directory does not exist: " + a.out_dir);
  const auto gt_paths = expand_inputs(a.gt);
  const auto b_paths = expand_inputs(a.bayes);
  const auto m_paths = expand_inputs(a.ml);
  require_same_count(gt_paths, b_paths, "--gt and --bayes differ in length");
  require_same_count(gt_paths, m_paths, "--gt and --ml differ in length");

  const std::size_t count = gt_paths.size();
  std::vector<ComponentSet> gt_sets(count), b_sets(count), m_sets(count);
  parallel_for(count, threads, [&](std::size_t i, unsigned) {
    const std::string id = gt_paths[i].filename().string();
    gt_sets[i] = postprocess(read_label_map(gt_paths[i], a.num_classes), a.post, id);
    b_sets[i] = postprocess(read_label_map(b_paths[i], a.num_classes), a.post, id);
    m_sets[i] = postprocess(read_label_map(m_paths[i], a.num_classes), a.post, id);
  });

  SegmentMatch b_match, m_match;
  for (std::size_t i = 0; i < count; ++i) {
    b_match.append(match_segments(b_sets[i], gt_sets[i]));
    m_match.append(match_segments(m_sets[i], gt_sets[i]));
  }
  const fs::path dir(a.out_dir);
  const int c = a.class_id;
  auto collect = [c](const std::vector<SegmentScore>& scores, bool recall) {
    std::vector<double> out;
    for (const auto& s : scores) {
      if (s.class_id == c) out.push_back(recall ? s.recall : s.precision);
    }
    return out;
  };
  Json report{{"format", "segdecide-analysis/1"}, {"class_id", c}, {"images", count}};
  auto cdf_pair = [&](const std::vector<double>& b, const std::vector<double>& m, bool b_first,
                      const char* name) {
    if (b.empty() || m.empty()) {
      report[name] = nullptr;
      return;
    }
    const EmpiricalCdf fb(b), fm(m);
    write_text_file(dir / (std::string(name) + ".csv"), cdf_csv(fb, fm));
    const DominanceResult d = b_first ? dominates_first_order(fb, fm) : dominates_first_order(fm, fb);
    report[name] = {{"bayes_samples", fb.count()},
                    {"ml_samples", fm.count()},
                    {"bayes_at_zero", fb(0.0)},
                    {"ml_at_zero", fm(0.0)},
                    {b_first ? "bayes_dominated_by_ml" : "ml_dominated_by_bayes", to_json(d)}};
  };
  cdf_pair(collect(b_match.ground_truth, true), collect(m_match.ground_truth, true), true,
           "recall_cdf");
  cdf_pair(collect(b_match.predicted, false), collect(m_match.predicted, false), false,
           "precision_cdf");

  const DetectionHistograms hist = detection_histograms(b_match, m_match, c, a.bins);
  write_text_file(dir / "false_detection_histogram.csv", histogram_csv(hist.false_detection));
  write_text_file(dir / "non_detection_histogram.csv", histogram_csv(hist.non_detection));
  report["false_detection_histogram"] = to_json(hist.false_detection);
  report["non_detection_histogram"] = to_json(hist.non_detection);

  const NondetectionHeatmaps hb = nondetection_heatmaps(gt_sets, b_sets, c);
  const NondetectionHeatmaps hm = nondetection_heatmaps(gt_sets, m_sets, c);
  write_heatmap(dir / "heatmap_bayes_pixel.pgm", hb.pixel_level, c);
  write_heatmap(dir / "heatmap_bayes_object.pgm", hb.object_level, c);
  write_heatmap(dir / "heatmap_ml_pixel.pgm", hm.pixel_level, c);
  write_heatmap(dir / "heatmap_ml_object.pgm", hm.object_level, c);
  write_json_file(dir / "analysis.json", report);
}

// --- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::uint64_t count = 1;
  std::uint64_t start = 0;
  std::string out_dir;
  std::string priors;
  std::string global_priors;
};

void run_synth(const SynthArgs& a, unsigned threads) {
  SynthConfig config = synth_config_from_json(read_json_file(a.config));
  if (a.seed_opt->count()) config.seed = a.seed;
  if (!fs::is_directory(a.out_dir)) throw IoError("output directory does not exist: " + a.out_dir);
  if (!a.priors.empty() && !a.global_priors.empty()) {
    throw UsageError("--priors and --global-priors are mutually exclusive");
  }
  std::optional<PriorWeights> weights;
  if (!a.priors.empty()) weights = PriorWeights::local(read_prior_stack(a.priors));
  if (!a.global_priors.empty()) {
    weights = PriorWeights::global(global_priors_from_json(read_json_file(a.global_priors)));
  }
  const fs::path dir(a.out_dir);
  parallel_for(a.count, threads, [&](std::size_t i, unsigned) {
    const std::uint64_t index = a.start + i;
    const Scene scene = generate_scene(config, scene_seed(config.seed, index));
    char stem[32];
    std::snprintf(stem, sizeof stem, "scene_%06llu", static_cast<unsigned long long>(index));
    write_tensor(dir / (std::string(stem) + "_gt.sgt"), scene.gt);
    write_tensor(dir / (std::string(stem) + "_features.sgt"), scene.features);
    if (weights) {
      write_tensor(dir / (std::string(stem) + "_probs.sgt"),
                   oracle_posteriors(scene.features, config, *weights));
    }
  });
}

// --- experiment -----------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  bool check = false;
  bool scenario = false;
  std::string out_dir;
  std::string report;
  std::string golden;
};

int run_experiment_cmd(const ExperimentArgs& a, unsigned threads) {
  const Json config_json = read_json_file(a.config);
  Json report;
  bool pass = true;
  if (a.scenario) {
    ScenarioConfig config = scenario_config_from_json(config_json);
    if (a.seed_opt->count()) config.seed = a.seed;
    const ScenarioResult result = global_vs_local_scenario(config, threads);
    report = result.report();
    pass = result.all_pass();
  } else {
    ExperimentConfig config = experiment_config_from_json(config_json);
    if (a.seed_opt->count()) config.seed = a.seed;
    const ExperimentResult result = run_experiment(config, threads);
    report = result.report();
    pass = result.all_pass();
    if (!a.out_dir.empty()) write_experiment_artifacts(result, a.out_dir);
  }
  const std::string text = report.dump(2) + "\n";
  if (!a.out_dir.empty()) {
    if (!fs::is_directory(a.out_dir)) throw IoError("output directory does not exist: " + a.out_dir);
    write_text_file(fs::path(a.out_dir) / "report.json", text);
    write_json_file(fs::path(a.out_dir) / "run_metadata.json",
                    Json{{"created", utc_timestamp()},
                         {"threads", resolve_threads(threads)},
                         {"config", a.config}});
  }
  if (!a.report.empty()) write_text_file(a.report, text);

  if (!a.check) return kExitOk;
  verdict_lines(report["verdicts"]);
  if (!a.golden.empty()) {
    const auto golden = read_bytes(a.golden);
    const bool same = std::equal(golden.begin(), golden.end(), text.begin(), text.end());
    std::cerr << (same ? "[PASS] " : "[FAIL] ") << "report matches golden file " << a.golden << "\n";
    pass = pass && same;
  }
  return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Bayes and maximum-likelihood decisions for semantic segmentation"};
  app.name("segdecide");
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")
      ->capture_default_str();

  auto add_threads = [&](CLI::App* cmd) {
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  };

  PriorsArgs pa;
  auto* priors = app.add_subcommand("priors", "Estimate pixel-wise class priors from label maps");
  priors->add_option("--labels", pa.labels, "Label map files or directories")->required();
  priors->add_option("--num-classes", pa.num_classes, "Number of classes")
      ->required()
      ->check(CLI::Range(1, kMaxClasses));
  pa.sigma_opt = priors->add_option("--sigma", pa.sigma, "Gaussian sigma in pixels (default 80)");
  pa.cutoff_opt = priors->add_option("--cutoff", pa.cutoff, "Prior floor (default 1e-5)");
  pa.radius_opt = priors->add_option("--kernel-radius-sigmas", pa.radius,
                                     "Kernel radius in sigmas (default 3)");
  priors->add_option("--config", pa.config, "JSON prior config; flags override it");
  priors->add_option("--out", pa.out, "Smoothed prior stack (SGT1)")->required();
  priors->add_option("--raw-out", pa.raw_out, "Unsmoothed prior stack (SGT1)");
  priors->add_option("--global-out", pa.global_out, "Global priors (JSON)");
  add_threads(priors);

  DecideArgs da;
  auto* decide = app.add_subcommand("decide", "Apply the Bayes or ML rule to posterior maps");
  decide->add_option("--probs", da.probs, "Posterior maps; several are averaged first")->required();
  decide->add_option("--rule", da.rule, "Decision rule")
      ->check(CLI::IsMember({"bayes", "ml"}))
      ->capture_default_str();
  decide->add_option("--priors", da.priors, "Pixel-wise prior stack (SGT1)");
  decide->add_option("--global-priors", da.global_priors, "Global priors (JSON)");
  decide->add_option("--out", da.out, "Decided label map (SGT1)")->required();
  add_threads(decide);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Pixel and segment metrics of predictions");
  eval->add_option("--pred", ea.pred, "Predicted label maps")->required();
  eval->add_option("--gt", ea.gt, "Ground-truth label maps, paired by order")->required();
  eval->add_option("--num-classes", ea.num_classes, "Number of classes")
      ->required()
      ->check(CLI::Range(1, kMaxClasses));
  add_postprocess_flags(eval, ea.connectivity, ea.post);
  eval->add_option("--cost-priors", ea.cost_priors, "Global priors (JSON) for the inverse-proportional cost");
  eval->add_option("--cost-constant", ea.cost_constant, "Cost constant C")->capture_default_str();
  eval->add_flag("!--no-segments", ea.segments, "Omit per-segment score lists");
  eval->add_option("--out", ea.out, "Report (JSON)")->required();
  add_threads(eval);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "CDFs, size histograms and heatmaps for one class");
  analyze->add_option("--gt", aa.gt, "Ground-truth label maps")->required();
  analyze->add_option("--bayes", aa.bayes, "Bayes decisions, paired by order")->required();
  analyze->add_option("--ml", aa.ml, "ML decisions, paired by order")->required();
  analyze->add_option("--num-classes", aa.num_classes, "Number of classes")
      ->required()
      ->check(CLI::Range(1, kMaxClasses));
  analyze->add_option("--class-id", aa.class_id, "Analysed class")->required();
  analyze->add_option("--bins", aa.bins, "Size bin edges in pixels");
  add_postprocess_flags(analyze, aa.connectivity, aa.post);
  analyze->add_option("--out-dir", aa.out_dir, "Existing output directory")->required();
  add_threads(analyze);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate synthetic scenes");
  synth->add_option("--config", sa.config, "Synthetic scene config (JSON)")->required();
  sa.seed_opt = synth->add_option("--seed", sa.seed, "Master seed (overrides the config)");
  synth->add_option("--count", sa.count, "Number of scenes")->capture_default_str();
  synth->add_option("--start", sa.start, "Index of the first scene")->capture_default_str();
  synth->add_option("--out-dir", sa.out_dir, "Existing output directory")->required();
  synth->add_option("--priors", sa.priors, "Also write oracle posteriors under this prior stack");
  synth->add_option("--global-priors", sa.global_priors,
                    "Also write oracle posteriors under these global priors");
  add_threads(synth);

  ExperimentArgs xa;
  auto* experiment = app.add_subcommand("experiment", "Run a synthetic end-to-end experiment");
  experiment->add_option("--config", xa.config, "Experiment or scenario config (JSON)")->required();
  xa.seed_opt = experiment->add_option("--seed", xa.seed, "Master seed (overrides the config)");
  experiment->add_flag("--check", xa.check, "Exit 3 unless every verdict passes");
  experiment->add_flag("--scenario", xa.scenario, "Config describes the global-vs-local scenario");
  experiment->add_option("--out-dir", xa.out_dir, "Existing directory for the report and artifacts");
  experiment->add_option("--report", xa.report, "Write the report JSON here");
  experiment->add_option("--golden", xa.golden, "With --check, also require a byte-identical report");
  add_threads(experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*priors) run_priors(pa, threads);
    if (*decide) run_decide(da, threads);
    if (*eval) run_eval(ea, threads);
    if (*analyze) run_analyze(aa, threads);
    if (*synth) run_synth(sa, threads);
    if (*experiment) return run_experiment_cmd(xa, threads);
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace segdecide::cli
