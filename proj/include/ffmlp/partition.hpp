#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ffmlp/dataset.hpp"
#include "ffmlp/error.hpp"
#include "ffmlp/lda.hpp"
#include "ffmlp/parallel.hpp"
#include "ffmlp/types.hpp"

namespace ffmlp {

struct HyperplaneSet {
  std::vector<Hyperplane> planes;
  Index dim = 0;
  std::vector<std::pair<int, int>> skipped_pairs;

  std::size_t size() const { return planes.size(); }
};

// Length-L bit string; bit l is 1 iff the point lies on the positive side of plane l.
// Bits are packed most-significant-first so that word-wise comparison orders codes
// lexicographically ("0..." < "1...").
class SignCode {
 public:
  SignCode() = default;
  explicit SignCode(std::size_t length) : length_(length), words_((length + 63) / 64, 0) {}

  static SignCode from_string(const std::string& bits) {
    SignCode code(bits.size());
    for (std::size_t l = 0; l < bits.size(); ++l) {
      if (bits[l] == '1')
        code.set(l);
      else if (bits[l] != '0')
        throw FormatError("sign code '" + bits + "' contains a character other than 0/1");
    }
    return code;
  }

  std::size_t size() const { return length_; }
  bool operator[](std::size_t l) const { return (words_[l / 64] >> (63 - l % 64)) & 1u; }
  void set(std::size_t l) { words_[l / 64] |= std::uint64_t{1} << (63 - l % 64); }

  std::string str() const {
    std::string s(length_, '0');
    for (std::size_t l = 0; l < length_; ++l)
      if ((*this)[l]) s[l] = '1';
    return s;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const SignCode&, const SignCode&) = default;
  friend std::strong_ordering operator<=>(const SignCode& a, const SignCode& b) {
    if (auto c = a.words_ <=> b.words_; c != 0) return c;
    return a.length_ <=> b.length_;
  }

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

inline SignCode code_of(const HyperplaneSet& hs, const Eigen::Ref<const Vector>& x) {
  SignCode code(hs.size());
  for (std::size_t l = 0; l < hs.size(); ++l)
    if (evaluate(hs.planes[l], x) > 0.0) code.set(l);
  return code;
}

struct RegionEntry {
  SignCode code;
  ClassId majority = 0;
  std::vector<Index> counts;

  Index total() const { return std::accumulate(counts.begin(), counts.end(), Index{0}); }
};

// Nonempty regions in lexicographic code order.
struct RegionTable {
  std::size_t code_length = 0;
  int class_count = 0;
  std::vector<RegionEntry> entries;

  std::size_t size() const { return entries.size(); }

  std::optional<std::size_t> find(const SignCode& code) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), code,
                               [](const RegionEntry& e, const SignCode& c) { return e.code < c; });
    if (it == entries.end() || it->code != code) return std::nullopt;
    return static_cast<std::size_t>(it - entries.begin());
  }

  // Majority class over all tabulated samples, lowest index on ties.
  ClassId global_majority() const {
    std::vector<Index> totals(static_cast<std::size_t>(class_count), 0);
    for (const auto& e : entries)
      for (std::size_t c = 0; c < e.counts.size(); ++c) totals[c] += e.counts[c];
    return static_cast<ClassId>(std::max_element(totals.begin(), totals.end()) - totals.begin());
  }
};

struct PruneReport {
  struct Deletion {
    int plane_id = 0;  // id in the unpruned set
    std::pair<int, int> source{-1, -1};
    double error = 0.0;
  };
  std::vector<Deletion> deletions;
  double threshold = 0.0;
  double initial_error = 0.0;
  double final_error = 0.0;
  std::size_t initial_planes = 0;
  std::size_t final_planes = 0;
};

// Sign bits of every sample against every plane, packed like SignCode words. Deleting
// a plane is equivalent to masking its bit, which is how pruning evaluates candidates.
class SignMatrix {
 public:
  SignMatrix(const HyperplaneSet& hs, const Matrix& samples)
      : rows_(samples.rows()), length_(hs.size()), width_((hs.size() + 63) / 64),
        bits_(static_cast<std::size_t>(rows_) * width_, 0) {
    if (samples.cols() != hs.dim)
      throw ParameterError("samples have dimension " + std::to_string(samples.cols()) + ", planes " +
                           std::to_string(hs.dim));
    // Same evaluation path as code_of, so both agree bit-for-bit.
    Vector x(samples.cols());
    for (Index i = 0; i < rows_; ++i) {
      x = samples.row(i).transpose();
      for (std::size_t l = 0; l < length_; ++l)
        if (evaluate(hs.planes[l], x) > 0.0)
          bits_[static_cast<std::size_t>(i) * width_ + l / 64] |= std::uint64_t{1} << (63 - l % 64);
    }
  }

  Index rows() const { return rows_; }
  std::size_t length() const { return length_; }
  std::size_t width() const { return width_; }
  const std::uint64_t* row(Index i) const { return bits_.data() + static_cast<std::size_t>(i) * width_; }

  SignCode code(Index i) const {
    SignCode c(length_);
    for (std::size_t l = 0; l < length_; ++l)
      if ((row(i)[l / 64] >> (63 - l % 64)) & 1u) c.set(l);
    return c;
  }

  // All-ones mask over the first `length` bits.
  std::vector<std::uint64_t> full_mask() const {
    std::vector<std::uint64_t> mask(width_, 0);
    for (std::size_t l = 0; l < length_; ++l) mask[l / 64] |= std::uint64_t{1} << (63 - l % 64);
    return mask;
  }

  // Training samples misclassified by the majority-per-region rule when the regions are
  // formed by the planes whose bits are set in `mask`.
  Index misclassified(const std::vector<ClassId>& labels, int class_count,
                      const std::vector<std::uint64_t>& mask) const {
    std::vector<std::uint64_t> keys(static_cast<std::size_t>(rows_) * width_);
    for (Index i = 0; i < rows_; ++i)
      for (std::size_t w = 0; w < width_; ++w)
        keys[static_cast<std::size_t>(i) * width_ + w] = row(i)[w] & mask[w];
    std::vector<Index> order(static_cast<std::size_t>(rows_));
    std::iota(order.begin(), order.end(), Index{0});
    auto key = [&](Index i) { return keys.data() + static_cast<std::size_t>(i) * width_; };
    auto less = [&](Index a, Index b) {
      return std::lexicographical_compare(key(a), key(a) + width_, key(b), key(b) + width_);
    };
    std::sort(order.begin(), order.end(), less);
    Index wrong = 0;
    std::vector<Index> counts(static_cast<std::size_t>(class_count), 0);
    std::size_t start = 0;
    while (start < order.size()) {
      std::size_t end = start;
      std::fill(counts.begin(), counts.end(), 0);
      while (end < order.size() && std::equal(key(order[start]), key(order[start]) + width_, key(order[end]))) {
        ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(order[end])])];
        ++end;
      }
      wrong += static_cast<Index>(end - start) - *std::max_element(counts.begin(), counts.end());
      start = end;
    }
    return wrong;
  }

 private:
  Index rows_;
  std::size_t length_;
  std::size_t width_;
  std::vector<std::uint64_t> bits_;
};

// One LDA per unordered pair of blobs from different classes. Pairs whose LDA is
// degenerate (identical means) are skipped and recorded.
inline HyperplaneSet build_planes(const std::vector<BlobSamples>& blobs, double reg) {
  if (blobs.size() < 2) throw ParameterError("need at least 2 blobs to build hyperplanes");
  bool two_classes = false;
  for (const auto& b : blobs) two_classes |= b.blob.class_label != blobs.front().blob.class_label;
  if (!two_classes) throw ParameterError("blobs must span at least 2 classes");

  std::vector<BlobMoments> moments;
  moments.reserve(blobs.size());
  for (const auto& b : blobs) moments.push_back(moments_of(b));

  HyperplaneSet hs;
  hs.dim = moments.front().mean.size();
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    for (std::size_t j = i + 1; j < blobs.size(); ++j) {
      if (blobs[i].blob.class_label == blobs[j].blob.class_label) continue;
      const std::pair<int, int> source{static_cast<int>(i), static_cast<int>(j)};
      try {
        hs.planes.push_back(fit_lda(moments[i], moments[j], reg, source, static_cast<int>(hs.planes.size())));
      } catch (const DegeneratePairError&) {
        hs.skipped_pairs.push_back(source);
      }
    }
  }
  if (hs.planes.empty()) throw NumericError("every cross-class blob pair is degenerate");
  return hs;
}

inline RegionTable build_region_table(const HyperplaneSet& hs, const LabeledDataset& train) {
  if (train.size() == 0) throw DataError("cannot tabulate regions of an empty dataset");
  const SignMatrix signs(hs, train.samples);
  std::vector<std::pair<SignCode, ClassId>> coded;
  coded.reserve(static_cast<std::size_t>(train.size()));
  for (Index i = 0; i < train.size(); ++i) coded.emplace_back(signs.code(i), train.labels[static_cast<std::size_t>(i)]);
  std::sort(coded.begin(), coded.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  RegionTable rt;
  rt.code_length = hs.size();
  rt.class_count = train.class_count;
  for (const auto& [code, label] : coded) {
    if (rt.entries.empty() || rt.entries.back().code != code) {
      rt.entries.push_back({code, 0, std::vector<Index>(static_cast<std::size_t>(train.class_count), 0)});
    }
    ++rt.entries.back().counts[static_cast<std::size_t>(label)];
  }
  for (auto& e : rt.entries)
    e.majority = static_cast<ClassId>(std::max_element(e.counts.begin(), e.counts.end()) - e.counts.begin());
  return rt;
}

// Fraction of training samples whose label differs from their region's majority class.
inline double region_error(const HyperplaneSet& hs, const LabeledDataset& train) {
  if (train.size() == 0) throw DataError("cannot evaluate region error on an empty dataset");
  const SignMatrix signs(hs, train.samples);
  return static_cast<double>(signs.misclassified(train.labels, train.class_count, signs.full_mask())) /
         static_cast<double>(train.size());
}

// Greedy backward elimination: each round tentatively removes every remaining plane,
// then drops the one whose removal gives the lowest region error (lowest id on ties),
// provided that error is strictly below `threshold`. Stops when no candidate qualifies
// or a single plane is left.
inline std::pair<HyperplaneSet, PruneReport> prune(const HyperplaneSet& hs, const LabeledDataset& train,
                                                   double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ParameterError("threshold must lie in [0, 1]");
  if (train.size() == 0) throw DataError("cannot prune on an empty dataset");
  const SignMatrix signs(hs, train.samples);
  const double n = static_cast<double>(train.size());
  auto mask = signs.full_mask();
  std::vector<bool> alive(hs.size(), true);

  PruneReport report;
  report.threshold = threshold;
  report.initial_planes = hs.size();
  report.initial_error = static_cast<double>(signs.misclassified(train.labels, train.class_count, mask)) / n;
  report.final_error = report.initial_error;

  std::size_t remaining = hs.size();
  while (remaining > 1) {
    std::vector<std::size_t> candidates;
    for (std::size_t l = 0; l < hs.size(); ++l)
      if (alive[l]) candidates.push_back(l);
    std::vector<Index> errors(candidates.size());
    parallel_for(
        candidates.size(),
        [&](std::size_t k) {
          auto trial = mask;
          const std::size_t l = candidates[k];
          trial[l / 64] &= ~(std::uint64_t{1} << (63 - l % 64));
          errors[k] = signs.misclassified(train.labels, train.class_count, trial);
        },
        static_cast<std::size_t>(train.size()) * 20);
    const std::size_t best = static_cast<std::size_t>(std::min_element(errors.begin(), errors.end()) - errors.begin());
    const double err = static_cast<double>(errors[best]) / n;
    if (!(err < threshold)) break;
    const std::size_t l = candidates[best];
    alive[l] = false;
    mask[l / 64] &= ~(std::uint64_t{1} << (63 - l % 64));
    --remaining;
    report.deletions.push_back({hs.planes[l].id, hs.planes[l].source, err});
    report.final_error = err;
  }

  HyperplaneSet out;
  out.dim = hs.dim;
  out.skipped_pairs = hs.skipped_pairs;
  for (std::size_t l = 0; l < hs.size(); ++l) {
    if (!alive[l]) continue;
    Hyperplane h = hs.planes[l];
    h.id = static_cast<int>(out.planes.size());
    out.planes.push_back(std::move(h));
  }
  report.final_planes = out.size();
  return {std::move(out), std::move(report)};
}

// Steiner–Schläfli count: the most regions L hyperplanes can carve out of R^d.
inline double max_region_count(std::size_t planes, Index dim) {
  double total = 0.0;
  double binom = 1.0;
  for (Index i = 0; i <= dim && static_cast<std::size_t>(i) <= planes; ++i) {
    total += binom;
    binom = binom * static_cast<double>(planes - static_cast<std::size_t>(i)) / static_cast<double>(i + 1);
  }
  return total;
}

}  // namespace ffmlp
