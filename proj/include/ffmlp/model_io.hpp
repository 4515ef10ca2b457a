#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "ffmlp/error.hpp"
#include "ffmlp/gmm.hpp"
#include "ffmlp/network.hpp"
#include "ffmlp/partition.hpp"

namespace ffmlp {

inline constexpr int kModelVersion = 1;

// Everything a fitted model file carries: the network plus how it was obtained.
struct ModelFile {
  FFNetwork net;
  PruneReport prune_report;
  std::vector<ClassMixture> mixtures;
  nlohmann::json metadata = nlohmann::json::object();
};

namespace detail {

using nlohmann::json;

inline json to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw FormatError(where + ": expected a number");
  return j.get<double>();
}

inline long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw FormatError(where + ": expected an integer");
  return j.get<long>();
}

inline Vector vector_from(const json& j, Index expected, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array");
  if (expected >= 0 && static_cast<Index>(j.size()) != expected)
    throw FormatError(where + ": expected " + std::to_string(expected) + " entries, found " + std::to_string(j.size()));
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix matrix_from(const json& j, Index rows, Index cols, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array of rows");
  if (static_cast<Index>(j.size()) != rows)
    throw FormatError(where + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(j.size()));
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const std::string at = where + "[" + std::to_string(r) + "]";
    m.row(r) = vector_from(j[static_cast<std::size_t>(r)], cols, at).transpose();
  }
  return m;
}

inline json prune_report_json(const PruneReport& p) {
  json dels = json::array();
  for (const auto& d : p.deletions)
    dels.push_back({{"plane_id", d.plane_id}, {"source", {d.source.first, d.source.second}}, {"error", d.error}});
  return {{"threshold", p.threshold},           {"initial_error", p.initial_error},
          {"final_error", p.final_error},       {"initial_planes", p.initial_planes},
          {"final_planes", p.final_planes},     {"deletions", std::move(dels)}};
}

inline PruneReport prune_report_from(const json& j) {
  const std::string at = "prune_report";
  PruneReport p;
  p.threshold = number(field(j, "threshold", at), at + ".threshold");
  p.initial_error = number(field(j, "initial_error", at), at + ".initial_error");
  p.final_error = number(field(j, "final_error", at), at + ".final_error");
  p.initial_planes = static_cast<std::size_t>(integer(field(j, "initial_planes", at), at + ".initial_planes"));
  p.final_planes = static_cast<std::size_t>(integer(field(j, "final_planes", at), at + ".final_planes"));
  const auto& dels = field(j, "deletions", at);
  if (!dels.is_array()) throw FormatError(at + ".deletions: expected an array");
  for (std::size_t i = 0; i < dels.size(); ++i) {
    const std::string w = at + ".deletions[" + std::to_string(i) + "]";
    PruneReport::Deletion d;
    d.plane_id = static_cast<int>(integer(field(dels[i], "plane_id", w), w + ".plane_id"));
    const auto& src = field(dels[i], "source", w);
    if (!src.is_array() || src.size() != 2) throw FormatError(w + ".source: expected a pair");
    d.source = {static_cast<int>(integer(src[0], w)), static_cast<int>(integer(src[1], w))};
    d.error = number(field(dels[i], "error", w), w + ".error");
    p.deletions.push_back(d);
  }
  return p;
}

inline json mixtures_json(const std::vector<ClassMixture>& mixtures) {
  json out = json::array();
  for (const auto& m : mixtures) {
    json comps = json::array();
    for (const auto& c : m.components)
      comps.push_back({{"mean", to_json(c.mean)},
                       {"covariance", to_json(c.covariance)},
                       {"weight", c.weight},
                       {"support_count", c.support_count}});
    out.push_back({{"class", m.class_label},
                   {"log_likelihood", m.log_likelihood},
                   {"iterations", m.iterations},
                   {"reseeds", m.reseeds},
                   {"components", std::move(comps)}});
  }
  return out;
}

inline std::vector<ClassMixture> mixtures_from(const json& j, Index d) {
  if (!j.is_array()) throw FormatError("mixtures: expected an array");
  std::vector<ClassMixture> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = "mixtures[" + std::to_string(i) + "]";
    ClassMixture m;
    m.class_label = static_cast<ClassId>(integer(field(j[i], "class", at), at + ".class"));
    m.log_likelihood = number(field(j[i], "log_likelihood", at), at + ".log_likelihood");
    m.iterations = static_cast<int>(integer(field(j[i], "iterations", at), at + ".iterations"));
    m.reseeds = static_cast<int>(integer(field(j[i], "reseeds", at), at + ".reseeds"));
    const auto& comps = field(j[i], "components", at);
    if (!comps.is_array()) throw FormatError(at + ".components: expected an array");
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const std::string w = at + ".components[" + std::to_string(k) + "]";
      GaussianBlob b;
      b.class_label = m.class_label;
      b.mean = vector_from(field(comps[k], "mean", w), d, w + ".mean");
      b.covariance = matrix_from(field(comps[k], "covariance", w), d, d, w + ".covariance");
      b.weight = number(field(comps[k], "weight", w), w + ".weight");
      b.support_count = number(field(comps[k], "support_count", w), w + ".support_count");
      m.components.push_back(std::move(b));
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ModelFile& model) {
  using detail::to_json;
  const FFNetwork& net = model.net;
  nlohmann::json planes = nlohmann::json::array();
  for (const auto& h : net.planes.planes)
    planes.push_back({{"id", h.id}, {"w", to_json(h.normal)}, {"b", h.bias}, {"source", {h.source.first, h.source.second}}});
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : net.planes.skipped_pairs) skipped.push_back({s.first, s.second});
  nlohmann::json codes = nlohmann::json::array();
  for (const auto& c : net.code_order) codes.push_back(c.str());
  return {{"version", kModelVersion},
          {"d", net.input_dim},
          {"C", net.class_count},
          {"P", net.P},
          {"planes", std::move(planes)},
          {"skipped_pairs", std::move(skipped)},
          {"code_order", std::move(codes)},
          {"W1", to_json(net.W1)},
          {"b1", to_json(net.b1)},
          {"W2", to_json(net.W2)},
          {"W3", to_json(net.W3)},
          {"fallback_class", net.fallback_class},
          {"prune_report", detail::prune_report_json(model.prune_report)},
          {"mixtures", detail::mixtures_json(model.mixtures)},
          {"metadata", model.metadata}};
}

inline ModelFile model_from_json(const nlohmann::json& j) {
  using namespace detail;
  const std::string top = "model";
  const long version = integer(field(j, "version", top), "version");
  if (version != kModelVersion)
    throw FormatError("unsupported model version " + std::to_string(version) + " (this build reads version " +
                      std::to_string(kModelVersion) + ")");
  ModelFile model;
  FFNetwork& net = model.net;
  net.input_dim = static_cast<Index>(integer(field(j, "d", top), "d"));
  net.class_count = static_cast<int>(integer(field(j, "C", top), "C"));
  net.P = number(field(j, "P", top), "P");
  if (net.input_dim < 1) throw FormatError("d: must be >= 1");
  if (net.class_count < 2) throw FormatError("C: must be >= 2");
  if (!(net.P > 0.0)) throw FormatError("P: must be positive");

  const auto& planes = field(j, "planes", top);
  if (!planes.is_array() || planes.empty()) throw FormatError("planes: expected a nonempty array");
  net.planes.dim = net.input_dim;
  for (std::size_t l = 0; l < planes.size(); ++l) {
    const std::string at = "planes[" + std::to_string(l) + "]";
    Hyperplane h;
    h.id = static_cast<int>(integer(field(planes[l], "id", at), at + ".id"));
    if (h.id != static_cast<int>(l)) throw FormatError(at + ".id: expected " + std::to_string(l));
    h.normal = vector_from(field(planes[l], "w", at), net.input_dim, at + ".w");
    h.bias = number(field(planes[l], "b", at), at + ".b");
    const auto& src = field(planes[l], "source", at);
    if (!src.is_array() || src.size() != 2) throw FormatError(at + ".source: expected a pair");
    h.source = {static_cast<int>(integer(src[0], at + ".source")), static_cast<int>(integer(src[1], at + ".source"))};
    net.planes.planes.push_back(std::move(h));
  }
  if (auto it = j.find("skipped_pairs"); it != j.end() && it->is_array())
    for (const auto& s : *it)
      if (s.is_array() && s.size() == 2)
        net.planes.skipped_pairs.emplace_back(static_cast<int>(integer(s[0], "skipped_pairs")),
                                              static_cast<int>(integer(s[1], "skipped_pairs")));

  const Index L = static_cast<Index>(net.planes.size());
  const auto& codes = field(j, "code_order", top);
  if (!codes.is_array() || codes.empty()) throw FormatError("code_order: expected a nonempty array");
  for (std::size_t r = 0; r < codes.size(); ++r) {
    const std::string at = "code_order[" + std::to_string(r) + "]";
    if (!codes[r].is_string()) throw FormatError(at + ": expected a string");
    const auto s = codes[r].get<std::string>();
    if (static_cast<Index>(s.size()) != L) throw FormatError(at + ": code length differs from plane count");
    net.code_order.push_back(SignCode::from_string(s));
  }
  const Index D2 = static_cast<Index>(net.code_order.size());
  net.W1 = matrix_from(field(j, "W1", top), 2 * L, net.input_dim, "W1");
  net.b1 = vector_from(field(j, "b1", top), 2 * L, "b1");
  net.W2 = matrix_from(field(j, "W2", top), D2, 2 * L, "W2");
  net.W3 = matrix_from(field(j, "W3", top), net.class_count, D2, "W3");
  net.b2 = Vector::Zero(D2);
  net.b3 = Vector::Zero(net.class_count);
  for (Index r = 0; r < D2; ++r)
    for (Index c = 0; c < 2 * L; ++c)
      if (net.W2(r, c) != 1.0 && net.W2(r, c) != -net.P)
        throw FormatError("W2[" + std::to_string(r) + "][" + std::to_string(c) + "]: entry outside {1, -P}");
  for (Index r = 0; r < D2; ++r) {
    Index cls = 0;
    for (Index c = 0; c < net.class_count; ++c)
      if (net.W3(c, r) == 1.0) cls = c;
    net.region_class.push_back(static_cast<ClassId>(cls));
  }
  net.fallback_class = static_cast<ClassId>(integer(field(j, "fallback_class", top), "fallback_class"));
  if (const auto problems = structural_violations(net); !problems.empty())
    throw FormatError("model violates network invariants: " + problems.front());

  if (auto it = j.find("prune_report"); it != j.end()) model.prune_report = prune_report_from(*it);
  if (auto it = j.find("mixtures"); it != j.end()) model.mixtures = mixtures_from(*it, net.input_dim);
  if (auto it = j.find("metadata"); it != j.end()) model.metadata = *it;
  return model;
}

inline void serialize(const ModelFile& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw DataError("failed writing '" + path + "'");
}

inline ModelFile deserialize(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace ffmlp
