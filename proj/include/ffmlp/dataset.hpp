#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ffmlp/error.hpp"
#include "ffmlp/types.hpp"

namespace ffmlp {

// n×d sample matrix with dense class labels in [0, class_count).
//
// Generators that draw from known Gaussian blobs also record the blob each sample came
// from in `groups`; the construction pipeline uses those directly instead of fitting
// a mixture. `groups` is empty for real data.
struct LabeledDataset {
  Matrix samples;
  std::vector<ClassId> labels;
  int class_count = 0;
  std::vector<int> groups;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;

  Index size() const { return samples.rows(); }
  Index dim() const { return samples.cols(); }
  bool has_groups() const { return !groups.empty(); }

  std::vector<Index> class_counts() const {
    std::vector<Index> counts(static_cast<std::size_t>(class_count), 0);
    for (ClassId y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
  }

  // Throws DataError when the structural invariants do not hold. Subsets produced by
  // split() may legitimately miss a class, so full class coverage is opt-in.
  void validate(bool require_all_classes = true) const {
    if (samples.rows() < 1 || samples.cols() < 1) throw DataError("dataset is empty");
    if (static_cast<Index>(labels.size()) != samples.rows())
      throw DataError("label count does not match sample count");
    if (class_count < 2) throw DataError("at least two classes are required");
    if (!groups.empty() && static_cast<Index>(groups.size()) != samples.rows())
      throw DataError("group count does not match sample count");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= class_count)
        throw DataError("label out of range at row " + std::to_string(i));
    }
    if (!samples.allFinite()) throw DataError("samples contain NaN or infinite values");
    if (require_all_classes) {
      if (samples.rows() < 2) throw DataError("at least two samples are required");
      const auto counts = class_counts();
      for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) throw DataError("class " + std::to_string(c) + " has no samples");
      }
    }
  }

  LabeledDataset subset(const std::vector<Index>& rows) const {
    LabeledDataset out;
    out.samples.resize(static_cast<Index>(rows.size()), dim());
    out.labels.reserve(rows.size());
    out.class_count = class_count;
    out.class_names = class_names;
    out.feature_names = feature_names;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.samples.row(static_cast<Index>(i)) = samples.row(rows[i]);
      out.labels.push_back(labels[static_cast<std::size_t>(rows[i])]);
      if (has_groups()) out.groups.push_back(groups[static_cast<std::size_t>(rows[i])]);
    }
    return out;
  }
};

struct SplitSpec {
  double test_fraction = 0.4;
  Seed seed = 0;
  bool stratified = true;
};

// Draws n_per_blob isotropic Gaussian samples around every center; blob b gets label
// class_map[b] and group id b.
inline LabeledDataset gen_gaussian_blobs(const std::vector<Vector>& centers,
                                         const std::vector<ClassId>& class_map, Index n_per_blob,
                                         double sigma, Seed seed) {
  if (centers.empty()) throw ParameterError("at least one blob center is required");
  if (centers.size() != class_map.size())
    throw ParameterError("class_map length " + std::to_string(class_map.size()) +
                         " does not match blob count " + std::to_string(centers.size()));
  if (n_per_blob < 1) throw ParameterError("n_per_blob must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be > 0");
  const Index d = centers.front().size();
  int max_class = 0;
  for (std::size_t b = 0; b < centers.size(); ++b) {
    if (centers[b].size() != d) throw ParameterError("blob centers differ in dimension");
    if (class_map[b] < 0) throw ParameterError("negative class index in class_map");
    max_class = std::max(max_class, class_map[b]);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledDataset ds;
  const Index n = n_per_blob * static_cast<Index>(centers.size());
  ds.samples.resize(n, d);
  ds.labels.reserve(static_cast<std::size_t>(n));
  ds.groups.reserve(static_cast<std::size_t>(n));
  ds.class_count = max_class + 1;
  Index row = 0;
  for (std::size_t b = 0; b < centers.size(); ++b) {
    for (Index k = 0; k < n_per_blob; ++k, ++row) {
      for (Index j = 0; j < d; ++j) ds.samples(row, j) = centers[b](j) + sigma * normal(rng);
      ds.labels.push_back(class_map[b]);
      ds.groups.push_back(static_cast<int>(b));
    }
  }
  ds.validate();
  return ds;
}

// Four blobs at (±offset, ±offset). Matching coordinate signs are class 0.
inline LabeledDataset gen_xor(Index n_per_blob, double center_offset, double sigma, Seed seed) {
  const double o = center_offset;
  const std::vector<Vector> centers = {Vector{{o, o}}, Vector{{-o, -o}}, Vector{{o, -o}},
                                       Vector{{-o, o}}};
  return gen_gaussian_blobs(centers, {0, 0, 1, 1}, n_per_blob, sigma, seed);
}

// rows×cols blobs on the lattice {0, spacing, ...}²; blob r*cols+c sits at
// (c*spacing, r*spacing) with label class_map[r*cols+c].
inline LabeledDataset gen_gauss_grid(Index rows, Index cols, Index n_per_blob, double spacing,
                                     double sigma, const std::vector<ClassId>& class_map,
                                     Seed seed) {
  if (rows < 1 || cols < 1) throw ParameterError("grid needs at least one row and column");
  if (static_cast<std::size_t>(rows * cols) != class_map.size())
    throw ParameterError("class_map length " + std::to_string(class_map.size()) +
                         " does not match grid size " + std::to_string(rows * cols));
  std::vector<Vector> centers;
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      centers.push_back(Vector{{static_cast<double>(c) * spacing, static_cast<double>(r) * spacing}});
  return gen_gaussian_blobs(centers, class_map, n_per_blob, sigma, seed);
}

// One blob per class on the vertices of an equilateral triangle of circumradius `radius`.
inline LabeledDataset gen_triangle_blobs(Index n_per_blob, double radius, double sigma, Seed seed) {
  std::vector<Vector> centers;
  for (int k = 0; k < 3; ++k) {
    const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 3.0;
    centers.push_back(Vector{{radius * std::cos(a), radius * std::sin(a)}});
  }
  return gen_gaussian_blobs(centers, {0, 1, 2}, n_per_blob, sigma, seed);
}

// Class 0 on the circle of radius `factor`, class 1 on the unit circle, evenly spaced
// angles plus isotropic Gaussian noise.
inline LabeledDataset gen_circle_ring(Index n, double factor, double noise, Seed seed) {
  if (n < 2) throw ParameterError("circle-and-ring needs n >= 2");
  if (!(factor > 0.0 && factor < 1.0)) throw ParameterError("factor must lie in (0, 1)");
  if (!(noise >= 0.0)) throw ParameterError("noise must be >= 0");
  const Index n_outer = n / 2;
  const Index n_inner = n - n_outer;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledDataset ds;
  ds.samples.resize(n, 2);
  ds.class_count = 2;
  ds.class_names = {"inner", "outer"};
  Index row = 0;
  auto ring = [&](Index count, double radius, ClassId label) {
    for (Index k = 0; k < count; ++k, ++row) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      ds.samples(row, 0) = radius * std::cos(t);
      ds.samples(row, 1) = radius * std::sin(t);
      ds.labels.push_back(label);
    }
  };
  ring(n_inner, factor, 0);
  ring(n_outer, 1.0, 1);
  if (noise > 0.0) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < 2; ++j) ds.samples(i, j) += noise * normal(rng);
  }
  ds.validate();
  return ds;
}

// Interleaved half-circles: class 2p is the upper arc of pair p, class 2p+1 the lower
// arc shifted by (1, -0.5). Pair 1 (when pairs == 2) is translated by pair_offset.
inline LabeledDataset gen_new_moons(int pairs, Index n_per_moon, double noise,
                                    const Vector& pair_offset, Seed seed) {
  if (pairs != 1 && pairs != 2) throw ParameterError("new moons supports pairs in {1, 2}");
  if (n_per_moon < 1) throw ParameterError("n_per_moon must be >= 1");
  if (!(noise >= 0.0)) throw ParameterError("noise must be >= 0");
  if (pairs == 2 && pair_offset.size() != 2) throw ParameterError("pair_offset must be 2-D");
  const Index n = 2 * pairs * n_per_moon;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledDataset ds;
  ds.samples.resize(n, 2);
  ds.class_count = 2 * pairs;
  Index row = 0;
  for (int p = 0; p < pairs; ++p) {
    const double ox = p == 0 ? 0.0 : pair_offset(0);
    const double oy = p == 0 ? 0.0 : pair_offset(1);
    for (int moon = 0; moon < 2; ++moon) {
      for (Index k = 0; k < n_per_moon; ++k, ++row) {
        const double t = n_per_moon == 1 ? 0.0
                                         : std::numbers::pi * static_cast<double>(k) /
                                               static_cast<double>(n_per_moon - 1);
        if (moon == 0) {
          ds.samples(row, 0) = std::cos(t) + ox;
          ds.samples(row, 1) = std::sin(t) + oy;
        } else {
          ds.samples(row, 0) = 1.0 - std::cos(t) + ox;
          ds.samples(row, 1) = 0.5 - std::sin(t) + oy;
        }
        ds.labels.push_back(2 * p + moon);
      }
    }
  }
  if (noise > 0.0) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < 2; ++j) ds.samples(i, j) += noise * normal(rng);
  }
  ds.validate();
  return ds;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    cells.emplace_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return cells;
}

inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Resolves a column given by header name or by (possibly negative) index.
inline std::size_t resolve_column(const std::string& spec, const std::vector<std::string>& header,
                                  std::size_t width) {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == spec) return j;
  long idx = 0;
  const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), idx);
  if (ec == std::errc() && ptr == spec.data() + spec.size()) {
    const long w = static_cast<long>(width);
    if (idx < 0) idx += w;
    if (idx >= 0 && idx < w) return static_cast<std::size_t>(idx);
  }
  throw ParameterError("unknown column '" + spec + "'");
}

}  // namespace detail

// Reads a comma-separated file with an optional header row. The label column may be
// given by name or index (negative counts from the end). Rows holding an exact zero in
// any drop_zero column are discarded. Labels are re-indexed densely from 0, numerically
// when every label parses as a number and lexicographically otherwise.
inline LabeledDataset load_csv(const std::string& path, const std::string& label_column,
                               const std::vector<std::string>& drop_zero_columns = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_csv_line(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw DataError("'" + path + "' contains no rows");

  const std::size_t width = rows.front().size();
  std::vector<std::string> header;
  {
    // A header exists when some cell of the first row is not numeric. A lone
    // non-numeric cell could be a categorical label, so require the label column to
    // also be resolvable by name or the row to hold at least two non-numeric cells.
    std::size_t non_numeric = 0;
    for (const auto& cell : rows.front())
      if (!detail::parse_number(cell)) ++non_numeric;
    const bool names_label = std::find(rows.front().begin(), rows.front().end(), label_column) !=
                             rows.front().end();
    if (non_numeric >= 2 || (non_numeric == 1 && names_label)) {
      header = rows.front();
      rows.erase(rows.begin());
      line_numbers.erase(line_numbers.begin());
    }
  }
  if (rows.empty()) throw DataError("'" + path + "' contains a header but no data rows");

  const std::size_t label_col = detail::resolve_column(label_column, header, width);
  std::vector<std::size_t> zero_cols;
  for (const auto& spec : drop_zero_columns)
    zero_cols.push_back(detail::resolve_column(spec, header, width));

  std::vector<std::vector<double>> features;
  std::vector<std::string> raw_labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != width)
      throw FormatError(path + ": line " + std::to_string(line_numbers[r]) + " has " +
                        std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
    std::vector<double> feat;
    feat.reserve(width - 1);
    bool drop = false;
    for (std::size_t j = 0; j < width; ++j) {
      if (j == label_col) continue;
      const auto v = detail::parse_number(cells[j]);
      if (!v || !std::isfinite(*v))
        throw FormatError(path + ": line " + std::to_string(line_numbers[r]) + ", column " +
                          std::to_string(j + 1) + ": cannot parse '" + cells[j] + "'");
      if (*v == 0.0 && std::find(zero_cols.begin(), zero_cols.end(), j) != zero_cols.end())
        drop = true;
      feat.push_back(*v);
    }
    if (cells[label_col].empty())
      throw FormatError(path + ": line " + std::to_string(line_numbers[r]) + ": empty label");
    if (drop) continue;
    features.push_back(std::move(feat));
    raw_labels.push_back(cells[label_col]);
  }
  if (features.empty()) throw DataError("'" + path + "': no rows left after filtering");

  std::vector<std::string> names(raw_labels.begin(), raw_labels.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  const bool numeric = std::all_of(names.begin(), names.end(),
                                   [](const std::string& s) { return detail::parse_number(s).has_value(); });
  if (numeric) {
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
      return *detail::parse_number(a) < *detail::parse_number(b);
    });
  }
  std::map<std::string, ClassId> index_of;
  for (std::size_t c = 0; c < names.size(); ++c) index_of[names[c]] = static_cast<ClassId>(c);

  LabeledDataset ds;
  ds.samples.resize(static_cast<Index>(features.size()), static_cast<Index>(width - 1));
  for (std::size_t i = 0; i < features.size(); ++i)
    for (std::size_t j = 0; j < width - 1; ++j)
      ds.samples(static_cast<Index>(i), static_cast<Index>(j)) = features[i][j];
  for (const auto& l : raw_labels) ds.labels.push_back(index_of.at(l));
  ds.class_count = static_cast<int>(names.size());
  ds.class_names = names;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != label_col) ds.feature_names.push_back(header[j]);
  if (ds.class_count < 2) throw DataError("'" + path + "' has fewer than two classes");
  ds.validate();
  return ds;
}

// Disjoint, exhaustive train/test partition. Stratified splits send
// round(test_fraction * n_c) samples of every class c to the test side, clamped so both
// sides keep at least one sample of each class. Both sides preserve input order.
inline std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                       const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw ParameterError("test_fraction must lie in (0, 1)");
  std::mt19937_64 rng(spec.seed);
  std::vector<char> is_test(static_cast<std::size_t>(ds.size()), 0);
  auto take = [&](std::vector<Index> idx, const std::string& what) {
    if (idx.size() < 2) throw DataError(what + " has fewer than 2 samples; cannot split");
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(idx.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
    for (std::size_t k = 0; k < n_test; ++k) is_test[static_cast<std::size_t>(idx[k])] = 1;
  };
  if (spec.stratified) {
    std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(ds.class_count));
    for (Index i = 0; i < ds.size(); ++i) by_class[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])].push_back(i);
    for (std::size_t c = 0; c < by_class.size(); ++c) take(by_class[c], "class " + std::to_string(c));
  } else {
    std::vector<Index> all(static_cast<std::size_t>(ds.size()));
    std::iota(all.begin(), all.end(), Index{0});
    take(all, "dataset");
  }
  std::vector<Index> train_rows, test_rows;
  for (Index i = 0; i < ds.size(); ++i) (is_test[static_cast<std::size_t>(i)] ? test_rows : train_rows).push_back(i);
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

}  // namespace ffmlp
