#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ffmlp/dataset.hpp"
#include "ffmlp/error.hpp"
#include "ffmlp/gmm.hpp"
#include "ffmlp/lda.hpp"
#include "ffmlp/model_io.hpp"
#include "ffmlp/network.hpp"
#include "ffmlp/partition.hpp"

namespace ffmlp {

struct FitOptions {
  // Mixture components per class. Empty: use the dataset's native blob groups when it
  // has them, otherwise one component per class.
  std::vector<int> components_per_class;
  GmmOptions gmm;
  double lda_reg = 1e-6;
  double threshold = 0.05;
  bool prune = true;
  double P = 1000.0;
};

// Wall-clock seconds per construction stage. boundary covers the LDA fits and pruning.
struct StageTimings {
  double gmm_s = 0.0;
  double boundary_s = 0.0;
  double region_s = 0.0;
  double assign_s = 0.0;
  double total_s = 0.0;
};

struct FitResult {
  ModelFile model;
  HyperplaneSet unpruned;
  RegionTable regions;
  std::vector<BlobSamples> blobs;
  StageTimings timings;
  bool used_gmm = false;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Blobs straight from the generator's group ids, with their raw training rows.
inline std::vector<BlobSamples> native_blobs(const LabeledDataset& train) {
  std::map<int, std::vector<Index>> rows;
  for (Index i = 0; i < train.size(); ++i) rows[train.groups[static_cast<std::size_t>(i)]].push_back(i);
  const auto class_totals = train.class_counts();
  std::vector<BlobSamples> out;
  for (const auto& [group, idx] : rows) {
    BlobSamples b;
    b.samples.resize(static_cast<Index>(idx.size()), train.dim());
    const ClassId label = train.labels[static_cast<std::size_t>(idx.front())];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (train.labels[static_cast<std::size_t>(idx[k])] != label)
        throw DataError("blob group " + std::to_string(group) + " mixes classes");
      b.samples.row(static_cast<Index>(k)) = train.samples.row(idx[k]);
    }
    const BlobMoments m = moments_of(b);
    b.blob.mean = m.mean;
    b.blob.covariance = m.covariance;
    b.blob.class_label = label;
    b.blob.support_count = m.count;
    b.blob.weight = m.count / static_cast<double>(class_totals[static_cast<std::size_t>(label)]);
    out.push_back(std::move(b));
  }
  return out;
}

// Per-component synthetic samples for the LDA step: round(weight × class count) draws,
// at least 2·d of them.
inline std::vector<BlobSamples> mixture_blobs(const std::vector<ClassMixture>& mixtures,
                                              const LabeledDataset& train, Seed seed) {
  const auto class_totals = train.class_counts();
  const Index floor = 2 * train.dim();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x1da5u};
  std::mt19937_64 rng(seq);
  std::vector<BlobSamples> out;
  for (const auto& mix : mixtures) {
    for (const auto& comp : mix.components) {
      const double share = comp.weight * static_cast<double>(class_totals[static_cast<std::size_t>(mix.class_label)]);
      const Index count = std::max<Index>(floor, static_cast<Index>(std::llround(share)));
      out.push_back({comp, sample_blob(comp, count, rng)});
    }
  }
  return out;
}

inline std::vector<ClassMixture> blobs_as_mixtures(const std::vector<BlobSamples>& blobs, int class_count) {
  std::vector<ClassMixture> out(static_cast<std::size_t>(class_count));
  for (ClassId c = 0; c < class_count; ++c) out[static_cast<std::size_t>(c)].class_label = c;
  for (const auto& b : blobs) out[static_cast<std::size_t>(b.blob.class_label)].components.push_back(b.blob);
  return out;
}

}  // namespace detail

// The full feedforward construction: blobs → pairwise LDA planes → greedy pruning →
// region table → weight assembly.
inline FitResult fit_ffmlp(const LabeledDataset& train, const FitOptions& opt) {
  train.validate();
  FitResult result;
  detail::Stopwatch clock;

  // Stage 0: blobs, from a mixture fit or from the generator's groups.
  std::vector<ClassMixture> mixtures;
  if (!opt.components_per_class.empty() || !train.has_groups()) {
    std::vector<int> comps = opt.components_per_class;
    if (comps.empty()) comps.assign(static_cast<std::size_t>(train.class_count), 1);
    mixtures = fit_gmm(train, comps, opt.gmm);
    result.blobs = detail::mixture_blobs(mixtures, train, opt.gmm.seed);
    result.used_gmm = true;
  } else {
    result.blobs = detail::native_blobs(train);
    mixtures = detail::blobs_as_mixtures(result.blobs, train.class_count);
  }
  result.timings.gmm_s = clock.lap();

  // Stage 1: partitioning hyperplanes.
  result.unpruned = build_planes(result.blobs, opt.lda_reg);
  HyperplaneSet planes;
  PruneReport report;
  if (opt.prune) {
    std::tie(planes, report) = prune(result.unpruned, train, opt.threshold);
  } else {
    planes = result.unpruned;
    report.threshold = opt.threshold;
    report.initial_planes = report.final_planes = planes.size();
    report.initial_error = report.final_error = region_error(planes, train);
  }
  result.timings.boundary_s = clock.lap();

  // Stage 2: nonempty regions.
  result.regions = build_region_table(planes, train);
  result.timings.region_s = clock.lap();

  // Stage 3: weights.
  result.model.net = assemble(planes, result.regions, opt.P, train.class_count);
  result.timings.assign_s = clock.lap();
  result.timings.total_s =
      result.timings.gmm_s + result.timings.boundary_s + result.timings.region_s + result.timings.assign_s;

  result.model.prune_report = std::move(report);
  result.model.mixtures = std::move(mixtures);
  return result;
}

inline std::vector<ClassId> predict_all(const FFNetwork& net, const LabeledDataset& ds) {
  std::vector<ClassId> out;
  out.reserve(static_cast<std::size_t>(ds.size()));
  Vector x(ds.dim());
  for (Index i = 0; i < ds.size(); ++i) {
    x = ds.samples.row(i).transpose();
    out.push_back(predict(net, x));
  }
  return out;
}

inline double accuracy(const FFNetwork& net, const LabeledDataset& ds) {
  if (ds.size() == 0) return 0.0;
  if (ds.dim() != net.input_dim)
    throw ParameterError("model expects dimension " + std::to_string(net.input_dim) + ", data has " +
                         std::to_string(ds.dim()));
  const auto pred = predict_all(net, ds);
  Index hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == ds.labels[i];
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

// confusion[true][predicted]
inline std::vector<std::vector<Index>> confusion(const std::vector<ClassId>& truth, const std::vector<ClassId>& pred,
                                                 int class_count) {
  std::vector<std::vector<Index>> m(static_cast<std::size_t>(class_count),
                                    std::vector<Index>(static_cast<std::size_t>(class_count), 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++m[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];
  return m;
}

// Outcome of comparing the network against its own region table on a dataset.
struct OracleCheck {
  Index checked = 0;
  Index violators = 0;               // samples where the isolation margin condition fails
  Index mismatches = 0;              // network decision ≠ table majority
  Index unexplained_mismatches = 0;  // mismatches at samples satisfying the condition
};

inline OracleCheck check_against_table(const FFNetwork& net, const RegionTable& rt, const LabeledDataset& ds) {
  OracleCheck out;
  Vector x(ds.dim());
  for (Index i = 0; i < ds.size(); ++i) {
    x = ds.samples.row(i).transpose();
    const auto region = rt.find(code_of(net.planes, x));
    if (!region) continue;
    ++out.checked;
    const bool holds = isolation_holds(net, x);
    if (!holds) ++out.violators;
    if (predict(net, x) != rt.entries[*region].majority) {
      ++out.mismatches;
      if (holds) ++out.unexplained_mismatches;
    }
  }
  return out;
}

}  // namespace ffmlp
