#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "ffmlp/error.hpp"
#include "ffmlp/gmm.hpp"
#include "ffmlp/types.hpp"

namespace ffmlp {

// w·x + b = 0. Built from blob pair (source.first, source.second); w·x + b > 0 on the
// first blob's side.
struct Hyperplane {
  Vector normal;
  double bias = 0.0;
  std::pair<int, int> source{-1, -1};
  int id = 0;

  Index dim() const { return normal.size(); }
};

inline double evaluate(const Hyperplane& h, const Eigen::Ref<const Vector>& x) {
  if (x.size() != h.normal.size())
    throw ParameterError("hyperplane of dimension " + std::to_string(h.normal.size()) +
                         " evaluated at a point of dimension " + std::to_string(x.size()));
  return h.normal.dot(x) + h.bias;
}

// A blob as seen by the LDA step: the blob parameters plus the samples standing for it
// (raw training rows or draws from the fitted mixture). With no samples the analytic
// mean/covariance are used and support_count acts as the sample count.
struct BlobSamples {
  GaussianBlob blob;
  Matrix samples;
};

// Mean, MLE covariance and count used by one side of a two-class LDA.
struct BlobMoments {
  Vector mean;
  Matrix covariance;
  double count = 0.0;
};

inline BlobMoments moments_of(const BlobSamples& b) {
  BlobMoments m;
  if (b.samples.rows() == 0) {
    m.mean = b.blob.mean;
    m.covariance = b.blob.covariance;
    m.count = b.blob.support_count;
  } else {
    if (b.samples.rows() < 2) throw DataError("LDA needs at least 2 samples per blob");
    const Vector mean = b.samples.colwise().mean().transpose();
    const Matrix centered = b.samples.rowwise() - mean.transpose();
    m.mean = mean;
    m.covariance = (centered.transpose() * centered) / static_cast<double>(b.samples.rows());
    m.count = static_cast<double>(b.samples.rows());
  }
  if (!(m.count > 0.0)) throw DataError("LDA blob has no support");
  return m;
}

// Closed-form two-class LDA. The pooled covariance is the count-weighted mean of both
// sides plus reg·(trace/d)·I; the prior is p = n_a / (n_a + n_b).
//   w = Σ⁻¹(μ_a − μ_b)
//   b = ½ μ_bᵀΣ⁻¹μ_b − ½ μ_aᵀΣ⁻¹μ_a + log(p / (1 − p))
// Swapping the two sides negates w and b bit-for-bit.
inline Hyperplane fit_lda(const BlobMoments& a, const BlobMoments& b, double reg,
                          std::pair<int, int> source = {0, 1}, int id = 0) {
  if (a.mean.size() != b.mean.size()) throw ParameterError("LDA blobs differ in dimension");
  if (!(reg >= 0.0)) throw ParameterError("LDA regularization must be >= 0");
  const Index d = a.mean.size();
  const double total = a.count + b.count;
  if ((a.mean.array() == b.mean.array()).all())
    throw DegeneratePairError("blobs " + std::to_string(source.first) + " and " +
                              std::to_string(source.second) + " share the same mean");
  Matrix pooled = (a.count * a.covariance + b.count * b.covariance) / total;
  pooled = 0.5 * (pooled + pooled.transpose());
  pooled.diagonal().array() += reg * pooled.trace() / static_cast<double>(d);
  const Eigen::LLT<Matrix> llt(pooled);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().array() > 0.0).all())
    throw NumericError("pooled covariance of blobs " + std::to_string(source.first) + " and " +
                       std::to_string(source.second) + " is singular");
  Hyperplane h;
  h.normal = llt.solve(a.mean - b.mean);
  // log(p/(1-p)) written as a difference of logs keeps the swap antisymmetry exact.
  const double log_odds = std::log(a.count) - std::log(b.count);
  h.bias = -0.5 * h.normal.dot(a.mean + b.mean) + log_odds;
  if (!h.normal.allFinite() || !std::isfinite(h.bias))
    throw NumericError("LDA produced non-finite weights");
  if (h.normal.squaredNorm() == 0.0)
    throw DegeneratePairError("LDA normal vanished for blobs " + std::to_string(source.first) + " and " +
                              std::to_string(source.second));
  h.source = source;
  h.id = id;
  return h;
}

inline Hyperplane fit_lda(const BlobSamples& a, const BlobSamples& b, double reg,
                          std::pair<int, int> source = {0, 1}, int id = 0) {
  return fit_lda(moments_of(a), moments_of(b), reg, source, id);
}

}  // namespace ffmlp
