#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "segdecide/analysis.hpp"
#include "segdecide/components.hpp"
#include "segdecide/decision.hpp"
#include "segdecide/error.hpp"
#include "segdecide/experiment.hpp"
#include "segdecide/metrics.hpp"
#include "segdecide/priors.hpp"
#include "segdecide/serialization.hpp"
#include "segdecide/synth.hpp"
#include "segdecide/tensor_io.hpp"

namespace py = pybind11;
using namespace segdecide;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

void expect_ndim(const py::array& a, py::ssize_t ndim, const char* what) {
  if (a.ndim() != ndim) {
    throw ShapeError(std::string(what) + " must have " + std::to_string(ndim) + " dimensions");
  }
}

LabelMap to_labels(const U8Array& a, int num_classes) {
  expect_ndim(a, 2, "label map");
  std::vector<std::uint8_t> data(a.data(), a.data() + a.size());
  int n = num_classes;
  if (n == 0) {
    for (auto v : data) n = std::max(n, static_cast<int>(v) + 1);
  }
  return LabelMap(static_cast<std::uint32_t>(a.shape(0)), static_cast<std::uint32_t>(a.shape(1)),
                  n, std::move(data));
}

ProbabilityMap to_probs(const F32Array& a) {
  expect_ndim(a, 3, "probability map");
  return ProbabilityMap(static_cast<std::uint32_t>(a.shape(0)),
                        static_cast<std::uint32_t>(a.shape(1)), static_cast<int>(a.shape(2)),
                        std::vector<float>(a.data(), a.data() + a.size()));
}

U8Array from_labels(const LabelMap& m) {
  U8Array out({static_cast<py::ssize_t>(m.height()), static_cast<py::ssize_t>(m.width())});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

template <typename T>
F32Array from_stack(const T& m) {
  F32Array out({static_cast<py::ssize_t>(m.height()), static_cast<py::ssize_t>(m.width()),
                static_cast<py::ssize_t>(m.num_classes())});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

/// A 1-D array becomes global weights, a 3-D array local ones.
PriorWeights to_weights(const F64Array& a) {
  std::vector<double> values(a.data(), a.data() + a.size());
  if (a.ndim() == 1) return PriorWeights::global(std::move(values));
  expect_ndim(a, 3, "priors");
  return PriorWeights::local(static_cast<std::uint32_t>(a.shape(0)),
                             static_cast<std::uint32_t>(a.shape(1)), static_cast<int>(a.shape(2)),
                             std::move(values));
}

std::vector<LabelMap> to_label_list(const std::vector<U8Array>& arrays, int num_classes) {
  std::vector<LabelMap> maps;
  maps.reserve(arrays.size());
  for (const auto& a : arrays) maps.push_back(to_labels(a, num_classes));
  return maps;
}

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Json from_python(const py::object& obj) {
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return Json::parse(text);
}

PostprocessParams make_params(int connectivity, std::uint64_t min_size, std::uint32_t max_gap) {
  if (connectivity != 4 && connectivity != 8) throw ConfigError("connectivity must be 4 or 8");
  return {connectivity == 4 ? Connectivity::four : Connectivity::eight, min_size, max_gap};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayes and maximum-likelihood decision rules for segmentation posteriors";

  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", error);
  py::register_exception<InvariantError>(m, "InvariantError", error);
  py::register_exception<ShapeError>(m, "ShapeError", error);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<IoError>(m, "IoError", error);

  m.def("decide_bayes", [](const F32Array& probs) { return from_labels(decide_bayes(to_probs(probs))); },
        py::arg("probs"), "Per-pixel argmax of the posteriors (ties to the smallest id).");
  m.def("decide_ml",
        [](const F32Array& probs, const F64Array& priors) {
          return from_labels(decide_ml(to_probs(probs), to_weights(priors)));
        },
        py::arg("probs"), py::arg("priors"),
        "Per-pixel argmax of posterior / prior. `priors` is (N,) or (H, W, N).");
  m.def("average_probability_maps",
        [](const std::vector<F32Array>& maps) {
          std::vector<ProbabilityMap> converted;
          for (const auto& a : maps) converted.push_back(to_probs(a));
          return from_stack(average_probability_maps(converted));
        },
        py::arg("maps"));

  m.def("compute_pixel_priors",
        [](const std::vector<U8Array>& labels, int num_classes) {
          return from_stack(compute_pixel_priors(to_label_list(labels, num_classes), num_classes));
        },
        py::arg("labels"), py::arg("num_classes"));
  m.def("smooth_priors",
        [](const F32Array& raw, double sigma, double cutoff, double kernel_radius_sigmas) {
          expect_ndim(raw, 3, "prior stack");
          const PriorStack stack(static_cast<std::uint32_t>(raw.shape(0)),
                                 static_cast<std::uint32_t>(raw.shape(1)),
                                 static_cast<int>(raw.shape(2)),
                                 std::vector<float>(raw.data(), raw.data() + raw.size()), false, 0.0f);
          return from_stack(smooth_priors(stack, {sigma, cutoff, kernel_radius_sigmas}));
        },
        py::arg("raw"), py::arg("sigma") = 80.0, py::arg("cutoff") = 1e-5,
        py::arg("kernel_radius_sigmas") = 3.0);
  m.def("compute_global_priors",
        [](const std::vector<U8Array>& labels, int num_classes) {
          const auto g = compute_global_priors(to_label_list(labels, num_classes), num_classes);
          return std::vector<double>(g.values().begin(), g.values().end());
        },
        py::arg("labels"), py::arg("num_classes"));

  m.def("postprocess",
        [](const U8Array& labels, int num_classes, int connectivity, std::uint64_t min_size,
           std::uint32_t max_gap) {
          const auto set = postprocess(to_labels(labels, num_classes),
                                       make_params(connectivity, min_size, max_gap));
          return to_python(to_json(set));
        },
        py::arg("labels"), py::arg("num_classes") = 0, py::arg("connectivity") = 8,
        py::arg("min_size") = 10, py::arg("max_gap") = 10,
        "Connected components after small-component removal and merging, as a dict.");
  m.def("label_components",
        [](const U8Array& labels, int num_classes, int connectivity) {
          const auto set = label_components(to_labels(labels, num_classes),
                                            make_params(connectivity, 1, 0).connectivity);
          return to_python(to_json(set));
        },
        py::arg("labels"), py::arg("num_classes") = 0, py::arg("connectivity") = 8);

  m.def("confusion_matrix",
        [](const U8Array& pred, const U8Array& gt, int num_classes) {
          const auto cm = confusion_matrix(to_labels(pred, num_classes), to_labels(gt, num_classes));
          py::array_t<std::uint64_t> out({num_classes, num_classes});
          std::copy(cm.counts().begin(), cm.counts().end(), out.mutable_data());
          return out;
        },
        py::arg("pred"), py::arg("gt"), py::arg("num_classes"));
  m.def("class_scores",
        [](const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>& counts) {
          expect_ndim(counts, 2, "confusion matrix");
          const ConfusionMatrix cm(static_cast<int>(counts.shape(0)),
                                   std::vector<std::uint64_t>(counts.data(), counts.data() + counts.size()));
          return to_python(to_json(class_scores(cm)));
        },
        py::arg("confusion"), "Precision, recall and IoU per class; None where undefined.");
  m.def("expected_cost",
        [](const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>& counts,
           const std::string& kind, std::optional<std::vector<double>> priors, double constant,
           const std::string& weighting) {
          expect_ndim(counts, 2, "confusion matrix");
          const ConfusionMatrix cm(static_cast<int>(counts.shape(0)),
                                   std::vector<std::uint64_t>(counts.data(), counts.data() + counts.size()));
          if (kind == "symmetric") return expected_cost(cm, CostModel::symmetric(constant));
          if (kind != "inverse_proportional") throw ConfigError("unknown cost kind '" + kind + "'");
          if (!priors) throw ConfigError("inverse-proportional cost needs priors");
          if (weighting != "predicted" && weighting != "truth") {
            throw ConfigError("weighting must be 'predicted' or 'truth'");
          }
          return expected_cost(cm, CostModel::inverse_proportional(
                                       *priors, constant,
                                       weighting == "truth" ? CostWeighting::truth
                                                            : CostWeighting::predicted));
        },
        py::arg("confusion"), py::arg("kind") = "symmetric", py::arg("priors") = py::none(),
        py::arg("constant") = 1.0, py::arg("weighting") = "predicted");

  m.def("read_tensor",
        [](const std::string& path) -> py::array {
          RawTensor raw = read_tensor(path);
          std::vector<py::ssize_t> shape(raw.dims.begin(), raw.dims.end());
          if (raw.dtype == DType::u8) {
            py::array_t<std::uint8_t> out(shape);
            std::copy(raw.u8.begin(), raw.u8.end(), out.mutable_data());
            return out;
          }
          py::array_t<float> out(shape);
          std::copy(raw.f32.begin(), raw.f32.end(), out.mutable_data());
          return out;
        },
        py::arg("path"), "Array stored in an SGT1 file (no type invariant checks).");
  m.def("write_label_map",
        [](const std::string& path, const U8Array& labels, int num_classes) {
          write_tensor(path, to_labels(labels, num_classes));
        },
        py::arg("path"), py::arg("labels"), py::arg("num_classes") = 0);
  m.def("write_probability_map",
        [](const std::string& path, const F32Array& probs) { write_tensor(path, to_probs(probs)); },
        py::arg("path"), py::arg("probs"));
  m.def("write_pgm",
        [](const std::string& path,
           const py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>& image,
           std::uint32_t max_val) {
          expect_ndim(image, 2, "image");
          write_pgm(path, static_cast<std::uint32_t>(image.shape(0)),
                    static_cast<std::uint32_t>(image.shape(1)),
                    std::span<const std::uint32_t>(image.data(), static_cast<std::size_t>(image.size())),
                    max_val);
        },
        py::arg("path"), py::arg("image"), py::arg("max_val"));

  m.def("generate_scene",
        [](const py::object& config, std::uint64_t seed) {
          const SynthConfig c = synth_config_from_json(from_python(config));
          const Scene scene = generate_scene(c, seed);
          F32Array features({static_cast<py::ssize_t>(scene.features.height()),
                             static_cast<py::ssize_t>(scene.features.width())});
          std::copy(scene.features.data().begin(), scene.features.data().end(),
                    features.mutable_data());
          return py::make_tuple(from_labels(scene.gt), features);
        },
        py::arg("config"), py::arg("seed"), "Returns (labels, features) for a synth config dict.");
  m.def("oracle_posteriors",
        [](const F32Array& features, const py::object& config, const F64Array& priors) {
          expect_ndim(features, 2, "feature map");
          const SynthConfig c = synth_config_from_json(from_python(config));
          const FeatureMap f(static_cast<std::uint32_t>(features.shape(0)),
                             static_cast<std::uint32_t>(features.shape(1)),
                             std::vector<float>(features.data(), features.data() + features.size()));
          return from_stack(oracle_posteriors(f, c, to_weights(priors)));
        },
        py::arg("features"), py::arg("config"), py::arg("priors"));
  m.def("run_experiment",
        [](const py::object& config, std::optional<std::uint64_t> seed, unsigned threads) {
          ExperimentConfig c = experiment_config_from_json(from_python(config));
          if (seed) c.seed = *seed;
          std::optional<ExperimentResult> result;
          {
            py::gil_scoped_release release;
            result.emplace(run_experiment(c, threads));
          }
          return to_python(result->report());
        },
        py::arg("config"), py::arg("seed") = py::none(), py::arg("threads") = 1,
        "Runs an experiment config dict and returns the report dict.");
  m.def("global_vs_local_scenario",
        [](const py::object& config, std::optional<std::uint64_t> seed) {
          ScenarioConfig c = scenario_config_from_json(from_python(config));
          if (seed) c.seed = *seed;
          return to_python(global_vs_local_scenario(c).report());
        },
        py::arg("config"), py::arg("seed") = py::none());
}
