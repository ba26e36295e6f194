#include "segdecide/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "segdecide/error.hpp"
#include "segdecide/tensor_io.hpp"

namespace segdecide {

namespace {

std::pair<double, double> get_pair(const Json& j, const char* key,
                                   std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(std::string("key '") + key + "' must be a pair of numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

ObjectShape shape_from_string(const std::string& s) {
  if (s == "rectangle") return ObjectShape::rectangle;
  if (s == "ellipse") return ObjectShape::ellipse;
  throw ConfigError("unknown object shape '" + s + "'");
}

}  // namespace

void require_json_object(const Json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const char* what) {
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError(std::string(what) + ": unknown key '" + item.key() + "'");
  }
}

PriorConfig prior_config_from_json(const Json& j) {
  require_json_object(j, "prior config");
  reject_unknown_keys(j, {"sigma", "cutoff", "kernel_radius_sigmas"}, "prior config");
  PriorConfig c;
  c.sigma = json_value_or(j, "sigma", c.sigma);
  c.cutoff = json_value_or(j, "cutoff", c.cutoff);
  c.kernel_radius_sigmas = json_value_or(j, "kernel_radius_sigmas", c.kernel_radius_sigmas);
  return c;
}

Json to_json(const PriorConfig& c) {
  return Json{{"sigma", c.sigma}, {"cutoff", c.cutoff}, {"kernel_radius_sigmas", c.kernel_radius_sigmas}};
}

SynthConfig synth_config_from_json(const Json& j) {
  require_json_object(j, "synth config");
  reject_unknown_keys(j, {"height", "width", "background_class", "seed", "classes"}, "synth config");
  SynthConfig c;
  c.height = json_value_or<std::uint32_t>(j, "height", c.height);
  c.width = json_value_or<std::uint32_t>(j, "width", c.width);
  c.background_class = json_value_or(j, "background_class", c.background_class);
  c.seed = json_value_or<std::uint64_t>(j, "seed", c.seed);
  if (!j.contains("classes") || !j.at("classes").is_array()) {
    throw ConfigError("synth config: 'classes' must be an array");
  }
  for (const Json& cj : j.at("classes")) {
    require_json_object(cj, "class model");
    reject_unknown_keys(cj,
                   {"name", "count_mean", "size", "shape", "placement_mean", "placement_std",
                    "feature_mean", "feature_std"},
                   "class model");
    ClassModel m;
    m.name = json_value_or<std::string>(cj, "name", "");
    m.count_mean = json_value_or(cj, "count_mean", m.count_mean);
    const auto size = get_pair(cj, "size", {1.0, 1.0});
    if (size.first < 0 || size.second < 0) throw ConfigError("object size must be non-negative");
    m.size_min = static_cast<std::uint32_t>(size.first);
    m.size_max = static_cast<std::uint32_t>(size.second);
    m.shape = shape_from_string(json_value_or<std::string>(cj, "shape", "rectangle"));
    const auto mean = get_pair(cj, "placement_mean", {c.height / 2.0, c.width / 2.0});
    const auto sd = get_pair(cj, "placement_std", {1.0, 1.0});
    m.placement_mean_row = mean.first;
    m.placement_mean_col = mean.second;
    m.placement_std_row = sd.first;
    m.placement_std_col = sd.second;
    m.feature_mean = json_value_or(cj, "feature_mean", m.feature_mean);
    m.feature_std = json_value_or(cj, "feature_std", m.feature_std);
    c.classes.push_back(std::move(m));
  }
  c.validate();
  return c;
}

Json to_json(const SynthConfig& c) {
  Json classes = Json::array();
  for (int k = 0; k < c.num_classes(); ++k) {
    const ClassModel& m = c.classes[static_cast<std::size_t>(k)];
    Json cj;
    cj["name"] = m.name;
    cj["feature_mean"] = m.feature_mean;
    cj["feature_std"] = m.feature_std;
    if (k != c.background_class) {
      cj["count_mean"] = m.count_mean;
      cj["size"] = Json::array({m.size_min, m.size_max});
      cj["shape"] = m.shape == ObjectShape::rectangle ? "rectangle" : "ellipse";
      cj["placement_mean"] = Json::array({m.placement_mean_row, m.placement_mean_col});
      cj["placement_std"] = Json::array({m.placement_std_row, m.placement_std_col});
    }
    classes.push_back(std::move(cj));
  }
  return Json{{"height", c.height},
              {"width", c.width},
              {"background_class", c.background_class},
              {"seed", c.seed},
              {"classes", std::move(classes)}};
}

GlobalPriors global_priors_from_json(const Json& j) {
  const Json& values = j.is_object() && j.contains("values") ? j.at("values") : j;
  if (!values.is_array()) throw ConfigError("global priors: expected an array of values");
  try {
    return GlobalPriors(values.get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("global priors: ") + e.what());
  }
}

Json to_json(const GlobalPriors& priors) {
  return Json{{"values", std::vector<double>(priors.values().begin(), priors.values().end())}};
}

Json to_json(const ComponentSet& set) {
  Json segments = Json::array();
  for (const auto& seg : set.segments) {
    Json runs = Json::array();
    for (const Run& r : seg.runs) runs.push_back(Json::array({r.row, r.col_begin, r.col_end}));
    segments.push_back(Json{
        {"class", seg.class_id},
        {"size", seg.size},
        {"bbox", Json::array({seg.bbox.min_row, seg.bbox.min_col, seg.bbox.max_row,
                              seg.bbox.max_col})},
        {"runs", std::move(runs)}});
  }
  return Json{{"image_id", set.image_id},
              {"height", set.height},
              {"width", set.width},
              {"connectivity", static_cast<int>(set.connectivity)},
              {"provenance", to_string(set.provenance)},
              {"segments", std::move(segments)}};
}

ComponentSet component_set_from_json(const Json& j) {
  require_json_object(j, "component set");
  ComponentSet set;
  try {
    set.image_id = j.value("image_id", std::string());
    set.height = j.at("height").get<std::uint32_t>();
    set.width = j.at("width").get<std::uint32_t>();
    const int conn = j.value("connectivity", 8);
    if (conn != 4 && conn != 8) throw ConfigError("connectivity must be 4 or 8");
    set.connectivity = conn == 4 ? Connectivity::four : Connectivity::eight;
    const std::string prov = j.value("provenance", std::string("raw"));
    set.provenance = prov == "merged"     ? Provenance::merged
                     : prov == "filtered" ? Provenance::filtered
                                          : Provenance::raw;
    for (const Json& sj : j.at("segments")) {
      std::vector<Run> runs;
      for (const Json& rj : sj.at("runs")) {
        runs.push_back({rj.at(0).get<std::uint32_t>(), rj.at(1).get<std::uint32_t>(),
                        rj.at(2).get<std::uint32_t>()});
      }
      set.segments.push_back(make_segment(sj.at("class").get<int>(), std::move(runs)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("component set: ") + e.what());
  }
  render_index(set);  // bounds check
  return set;
}

Json to_json(const ConfusionMatrix& cm) {
  Json rows = Json::array();
  for (int k = 0; k < cm.num_classes(); ++k) {
    Json row = Json::array();
    for (int j = 0; j < cm.num_classes(); ++j) row.push_back(cm(k, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const ClassScores& scores) {
  auto list = [](const std::vector<std::optional<double>>& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(to_json(x));
    return out;
  };
  return Json{{"precision", list(scores.precision)},
              {"recall", list(scores.recall)},
              {"iou", list(scores.iou)}};
}

Json to_json(const SegmentScore& s) {
  return Json{{"segment", s.segment},     {"class", s.class_id},  {"size", s.size},
              {"matched", s.matched},     {"precision", s.precision}, {"recall", s.recall},
              {"iou", s.iou}};
}

Json to_json(const ClassSegmentSummary& s) {
  return Json{{"class", s.class_id},
              {"predicted_segments", s.predicted_segments},
              {"gt_segments", s.gt_segments},
              {"false_detections", s.false_detections},
              {"non_detections", s.non_detections},
              {"mean_precision", to_json(s.mean_precision)},
              {"mean_recall", to_json(s.mean_recall)},
              {"mean_iou", to_json(s.mean_iou)}};
}

Json to_json(const SizeHistogram& hist) {
  Json bins = Json::array();
  for (std::size_t b = 0; b < hist.bin_count(); ++b) {
    const double hi = hist.bin_high(b);
    bins.push_back(Json{{"lo", hist.bin_low(b)},
                        {"hi", std::isinf(hi) ? Json("inf") : Json(hi)},
                        {"bayes", hist.bayes[b]},
                        {"ml", hist.ml[b]},
                        {"ratio", to_json(hist.ratio(b))}});
  }
  return bins;
}

Json to_json(const DominanceResult& r) {
  return Json{{"dominated", r.dominated}, {"violation", r.violation}};
}

PostprocessParams postprocess_from_json(const Json& j) {
  require_json_object(j, "postprocess");
  reject_unknown_keys(j, {"connectivity", "min_size", "max_gap"}, "postprocess");
  PostprocessParams p;
  const int conn = json_value_or(j, "connectivity", 8);
  if (conn != 4 && conn != 8) throw ConfigError("connectivity must be 4 or 8");
  p.connectivity = conn == 4 ? Connectivity::four : Connectivity::eight;
  p.min_size = json_value_or<std::uint64_t>(j, "min_size", p.min_size);
  p.max_gap = json_value_or<std::uint32_t>(j, "max_gap", p.max_gap);
  return p;
}

Json to_json(const PostprocessParams& p) {
  return Json{{"connectivity", static_cast<int>(p.connectivity)},
              {"min_size", p.min_size},
              {"max_gap", p.max_gap}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace segdecide
