#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "ffmlp/dataset.hpp"
#include "ffmlp/error.hpp"
#include "ffmlp/pipeline.hpp"

#ifndef FFMLP_DATA_DIR
#define FFMLP_DATA_DIR "data"
#endif

namespace ffmlp {

// Everything needed to materialize a named dataset. Unset optionals take the
// dataset's default.
struct DatasetArgs {
  std::string dataset = "xor";
  std::string data_dir = FFMLP_DATA_DIR;
  // --dataset csv
  std::string csv_path;
  std::string label_column = "-1";
  std::vector<std::string> drop_zero;
  std::optional<double> test_fraction;
  Seed seed = 0;
  // Generator geometry.
  std::optional<Index> n_per_blob;
  std::optional<double> sigma;
  std::optional<double> offset;   // xor center offset, triangle circumradius
  std::optional<double> spacing;  // blobs9 grid spacing
  std::optional<double> factor;   // circle inner radius
  std::optional<double> noise;    // circle, moons
  std::optional<Vector> pair_offset;
};

struct PreparedData {
  std::string name;
  LabeledDataset train;
  LabeledDataset test;
  // Dataset-specific construction defaults (component counts, pruning threshold).
  std::vector<int> components_per_class;
  double threshold = 0.05;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"xor", "blobs3", "blobs9", "circle", "moons2",
                                                 "moons4", "iris", "wine", "bcw", "pima"};
  return names;
}

// Latin-square class layout of the 3×3 grid: every row and column holds all classes.
inline const std::vector<ClassId>& blobs9_class_map() {
  static const std::vector<ClassId> map = {0, 1, 2, 1, 2, 0, 2, 0, 1};
  return map;
}

inline Vector default_moons_pair_offset() { return Vector{{1.5, -1.5}}; }

inline nlohmann::json dataset_args_json(const DatasetArgs& a) {
  nlohmann::json j = {{"dataset", a.dataset}, {"seed", a.seed}};
  if (a.dataset == "csv") {
    j["csv"] = a.csv_path;
    j["label"] = a.label_column;
    j["drop_zero"] = a.drop_zero;
  }
  auto put = [&](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  put("test_fraction", a.test_fraction);
  put("n_per_blob", a.n_per_blob);
  put("sigma", a.sigma);
  put("offset", a.offset);
  put("spacing", a.spacing);
  put("factor", a.factor);
  put("noise", a.noise);
  if (a.pair_offset) j["pair_offset"] = std::vector<double>(a.pair_offset->begin(), a.pair_offset->end());
  return j;
}

inline DatasetArgs dataset_args_from_json(const nlohmann::json& j) {
  DatasetArgs a;
  try {
    a.dataset = j.at("dataset").get<std::string>();
    a.seed = j.value("seed", Seed{0});
    a.csv_path = j.value("csv", std::string());
    a.label_column = j.value("label", std::string("-1"));
    a.drop_zero = j.value("drop_zero", std::vector<std::string>());
    auto get = [&](const char* key, auto& opt) {
      if (j.contains(key)) opt = j.at(key).get<typename std::decay_t<decltype(opt)>::value_type>();
    };
    get("test_fraction", a.test_fraction);
    get("n_per_blob", a.n_per_blob);
    get("sigma", a.sigma);
    get("offset", a.offset);
    get("spacing", a.spacing);
    get("factor", a.factor);
    get("noise", a.noise);
    if (j.contains("pair_offset")) {
      const auto v = j.at("pair_offset").get<std::vector<double>>();
      a.pair_offset = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("dataset description: ") + e.what());
  }
  return a;
}

inline PreparedData prepare(const DatasetArgs& a) {
  PreparedData out;
  out.name = a.dataset;
  LabeledDataset all;
  double test_fraction = 0.5;
  const auto& n = a.n_per_blob;
  if (a.dataset == "xor") {
    all = gen_xor(n.value_or(300), a.offset.value_or(2.0), a.sigma.value_or(0.5), a.seed);
    out.threshold = 0.1;
  } else if (a.dataset == "blobs3") {
    all = gen_triangle_blobs(n.value_or(400), a.offset.value_or(3.5), a.sigma.value_or(1.0), a.seed);
    out.threshold = 0.05;
  } else if (a.dataset == "blobs9") {
    all = gen_gauss_grid(3, 3, n.value_or(200), a.spacing.value_or(3.0), a.sigma.value_or(0.9), blobs9_class_map(),
                         a.seed);
    out.threshold = 0.3;
  } else if (a.dataset == "circle") {
    all = gen_circle_ring(n.value_or(1000), a.factor.value_or(0.5), a.noise.value_or(0.16), a.seed);
    out.components_per_class = {1, 4};
    test_fraction = 0.4;
  } else if (a.dataset == "moons2") {
    all = gen_new_moons(1, n.value_or(500), a.noise.value_or(0.2), Vector(), a.seed);
    out.components_per_class = {2, 2};
    out.threshold = 0.1;
    test_fraction = 0.4;
  } else if (a.dataset == "moons4") {
    all = gen_new_moons(2, n.value_or(400), a.noise.value_or(0.1), a.pair_offset.value_or(default_moons_pair_offset()),
                        a.seed);
    out.components_per_class = {3, 3, 3, 3};
    out.threshold = 0.05;
  } else if (a.dataset == "iris") {
    all = load_csv(a.data_dir + "/iris.csv", "class");
    out.components_per_class = {2, 2, 2};
    test_fraction = 0.4;
  } else if (a.dataset == "wine") {
    all = load_csv(a.data_dir + "/wine.csv", "class");
    out.components_per_class = {2, 2, 2};
    test_fraction = 0.2;
  } else if (a.dataset == "bcw") {
    all = load_csv(a.data_dir + "/breast_cancer.csv", "class");
    out.components_per_class = {2, 2};
    test_fraction = 0.4;
  } else if (a.dataset == "pima") {
    all = load_csv(a.data_dir + "/pima.csv", "Outcome",
                   {"Glucose", "BloodPressure", "SkinThickness", "Insulin", "BMI"});
    out.components_per_class = {4, 4};
    out.threshold = 0.1;
    test_fraction = 0.4;
  } else if (a.dataset == "csv") {
    if (a.csv_path.empty()) throw ParameterError("--dataset csv requires --csv PATH");
    all = load_csv(a.csv_path, a.label_column, a.drop_zero);
    test_fraction = 0.4;
  } else {
    throw ParameterError("unknown dataset '" + a.dataset + "'");
  }
  std::tie(out.train, out.test) = split(all, {a.test_fraction.value_or(test_fraction), a.seed, true});
  return out;
}

}  // namespace ffmlp
