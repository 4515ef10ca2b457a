#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ffmlp/dataset.hpp"
#include "ffmlp/error.hpp"
#include "ffmlp/types.hpp"

namespace ffmlp {

// One Gaussian modality tagged with the class it belongs to.
struct GaussianBlob {
  Vector mean;
  Matrix covariance;
  double weight = 1.0;
  ClassId class_label = 0;
  double support_count = 0.0;

  Index dim() const { return mean.size(); }
};

struct ClassMixture {
  ClassId class_label = 0;
  std::vector<GaussianBlob> components;
  double log_likelihood = 0.0;
  // Total training log-likelihood of the parameters in force at each E-step.
  std::vector<double> log_likelihood_history;
  // E-step indices (into log_likelihood_history) that directly follow a component re-seed.
  std::vector<int> reseed_iterations;
  int reseeds = 0;
  int iterations = 0;
};

struct GmmOptions {
  int max_iters = 200;
  double tol = 1e-6;  // relative log-likelihood change
  double reg = 1e-6;
  Seed seed = 0;
};

// reg * trace / d of a class covariance: the smallest eigenvalue any of its components may have.
inline double covariance_floor(const Matrix& class_cov, double reg) {
  return reg * class_cov.trace() / static_cast<double>(class_cov.rows());
}

// Maximum-likelihood covariance for scatter cov subject to every eigenvalue >= floor:
// eigenvalues below the floor are raised to it, the eigenvectors are kept.
inline Matrix floor_eigenvalues(const Matrix& cov, double floor) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");
  if (eig.eigenvalues().minCoeff() >= floor) return cov;
  const Matrix& v = eig.eigenvectors();
  const Matrix out = v * eig.eigenvalues().cwiseMax(floor).asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

// Cached Cholesky factor of one component; the workhorse behind logpdf and sampling.
class GaussianDensity {
 public:
  explicit GaussianDensity(const GaussianBlob& blob) : mean_(blob.mean), llt_(blob.covariance) {
    if (blob.covariance.rows() != blob.dim() || blob.covariance.cols() != blob.dim())
      throw ParameterError("covariance shape does not match mean");
    if (llt_.info() != Eigen::Success || !(llt_.matrixL().toDenseMatrix().diagonal().array() > 0.0).all())
      throw NumericError("covariance is not positive definite");
    const auto diag = llt_.matrixLLT().diagonal();
    double log_det = 0.0;
    for (Index i = 0; i < diag.size(); ++i) log_det += 2.0 * std::log(diag(i));
    log_norm_ = -0.5 * (static_cast<double>(mean_.size()) * std::log(2.0 * std::numbers::pi) + log_det);
  }

  double logpdf(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != mean_.size())
      throw ParameterError("logpdf: expected dimension " + std::to_string(mean_.size()) + ", got " +
                           std::to_string(x.size()));
    const Vector z = llt_.matrixL().solve(x - mean_);
    return log_norm_ - 0.5 * z.squaredNorm();
  }

  // logpdf of every row of x.
  Vector logpdf_rows(const Matrix& x) const {
    if (x.cols() != mean_.size())
      throw ParameterError("logpdf: expected dimension " + std::to_string(mean_.size()) + ", got " +
                           std::to_string(x.cols()));
    const Matrix z = llt_.matrixL().solve((x.rowwise() - mean_.transpose()).transpose());
    return (log_norm_ - 0.5 * z.colwise().squaredNorm().array()).transpose();
  }

  // mean + L z for a standard-normal z.
  Vector transform(const Vector& z) const { return mean_ + llt_.matrixL() * z; }

 private:
  Vector mean_;
  Eigen::LLT<Matrix> llt_;
  double log_norm_ = 0.0;
};

inline double gaussian_logpdf(const GaussianBlob& blob, const Eigen::Ref<const Vector>& x) {
  if (x.size() != blob.dim())
    throw ParameterError("logpdf: expected dimension " + std::to_string(blob.dim()) + ", got " +
                         std::to_string(x.size()));
  return GaussianDensity(blob).logpdf(x);
}

// Draws n rows from a single component.
template <typename Rng>
Matrix sample_blob(const GaussianBlob& blob, Index n, Rng& rng) {
  GaussianDensity density = [&] {
    try {
      return GaussianDensity(blob);
    } catch (const NumericError& e) {
      throw InternalError(std::string("sample_blob: ") + e.what());
    }
  }();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(n, blob.dim());
  Vector z(blob.dim());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < z.size(); ++j) z(j) = normal(rng);
    out.row(i) = density.transform(z).transpose();
  }
  return out;
}

inline Matrix sample_mixture(const ClassMixture& mix, Index n, Seed seed) {
  if (n < 1) throw ParameterError("sample_mixture: n must be >= 1");
  if (mix.components.empty()) throw ParameterError("sample_mixture: empty mixture");
  std::vector<GaussianDensity> densities;
  std::vector<double> weights;
  for (const auto& c : mix.components) {
    try {
      densities.emplace_back(c);
    } catch (const NumericError& e) {
      throw InternalError(std::string("sample_mixture: ") + e.what());
    }
    weights.push_back(c.weight);
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index d = mix.components.front().dim();
  Matrix out(n, d);
  Vector z(d);
  for (Index i = 0; i < n; ++i) {
    const std::size_t k = pick(rng);
    for (Index j = 0; j < d; ++j) z(j) = normal(rng);
    out.row(i) = densities[k].transform(z).transpose();
  }
  return out;
}

// Sum over rows of log sum_k w_k N(x; mu_k, Sigma_k).
inline double mixture_log_likelihood(const ClassMixture& mix, const Matrix& samples) {
  std::vector<GaussianDensity> densities;
  for (const auto& c : mix.components) densities.emplace_back(c);
  double total = 0.0;
  std::vector<double> terms(densities.size());
  for (Index i = 0; i < samples.rows(); ++i) {
    const Vector x = samples.row(i).transpose();
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < densities.size(); ++k) {
      terms[k] = std::log(mix.components[k].weight) + densities[k].logpdf(x);
      top = std::max(top, terms[k]);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - top);
    total += top + std::log(acc);
  }
  return total;
}

namespace detail {

// Sample mean and MLE covariance of the rows of x weighted by w (weights need not sum to 1).
inline void weighted_moments(const Matrix& x, const Vector& w, Vector& mean, Matrix& cov) {
  const double total = w.sum();
  mean = (x.transpose() * w) / total;
  const Matrix centered = x.rowwise() - mean.transpose();
  cov = (centered.transpose() * w.asDiagonal() * centered) / total;
  cov = 0.5 * (cov + cov.transpose());
}

// k-means++ seeding: first center uniform, later ones with probability ∝ squared distance
// to the nearest chosen center.
template <typename Rng>
std::vector<Vector> kmeanspp_centers(const Matrix& x, int k, Rng& rng) {
  const Index n = x.rows();
  std::vector<Vector> centers;
  std::uniform_int_distribution<Index> first(0, n - 1);
  centers.push_back(x.row(first(rng)).transpose());
  std::vector<double> dist2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d2 = (x.row(i).transpose() - centers.back()).squaredNorm();
      dist2[static_cast<std::size_t>(i)] = std::min(dist2[static_cast<std::size_t>(i)], d2);
      total += dist2[static_cast<std::size_t>(i)];
    }
    Index chosen = 0;
    if (total > 0.0) {
      std::discrete_distribution<Index> pick(dist2.begin(), dist2.end());
      chosen = pick(rng);
    } else {
      chosen = first(rng);
    }
    centers.push_back(x.row(chosen).transpose());
  }
  return centers;
}

template <typename Rng>
ClassMixture fit_class_mixture(const Matrix& x, ClassId label, int k, const GmmOptions& opt, Rng& rng) {
  const Index n = x.rows();
  const Index d = x.cols();
  const double collapse_floor = static_cast<double>(d + 1);
  ClassMixture mix;
  mix.class_label = label;

  Vector pooled_mean;
  Matrix pooled_cov;
  weighted_moments(x, Vector::Ones(n), pooled_mean, pooled_cov);
  const double floor = covariance_floor(pooled_cov, opt.reg);
  const Matrix inflated = floor_eigenvalues(pooled_cov, floor);

  auto reseed = [&](GaussianBlob& blob) {
    std::uniform_int_distribution<Index> pick(0, n - 1);
    blob.mean = x.row(pick(rng)).transpose();
    blob.covariance = inflated;
    ++mix.reseeds;
  };

  // Hard-assignment initialization from k-means++ centers.
  const auto centers = kmeanspp_centers(x, k, rng);
  Matrix resp = Matrix::Zero(n, k);
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double dd = (x.row(i).transpose() - centers[static_cast<std::size_t>(c)]).squaredNorm();
      if (dd < best_d) {
        best_d = dd;
        best = c;
      }
    }
    resp(i, best) = 1.0;
  }

  std::vector<GaussianBlob> comps(static_cast<std::size_t>(k));
  bool reseeded = false;
  auto m_step = [&] {
    reseeded = false;
    for (int c = 0; c < k; ++c) {
      auto& blob = comps[static_cast<std::size_t>(c)];
      const Vector w = resp.col(c);
      const double nk = w.sum();
      blob.class_label = label;
      blob.support_count = nk;
      // A single component owns every sample, so the floor cannot apply to it.
      if (k > 1 && nk < collapse_floor) {
        reseed(blob);
        blob.weight = std::max(nk, 1.0) / static_cast<double>(n);
        reseeded = true;
        continue;
      }
      Matrix cov;
      weighted_moments(x, w, blob.mean, cov);
      blob.covariance = floor_eigenvalues(cov, floor);
      blob.weight = nk / static_cast<double>(n);
    }
    double wsum = 0.0;
    for (const auto& b : comps) wsum += b.weight;
    for (auto& b : comps) b.weight /= wsum;
  };
  m_step();

  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < std::max(1, opt.max_iters); ++iter) {
    if (reseeded) mix.reseed_iterations.push_back(static_cast<int>(mix.log_likelihood_history.size()));
    Matrix terms(n, k);
    for (int c = 0; c < k; ++c) {
      const auto& b = comps[static_cast<std::size_t>(c)];
      terms.col(c) = GaussianDensity(b).logpdf_rows(x).array() + std::log(b.weight);
    }
    const Vector top = terms.rowwise().maxCoeff();
    const Vector lse = top.array() + (terms.colwise() - top).array().exp().rowwise().sum().log();
    resp = (terms.colwise() - lse).array().exp();
    const double ll = lse.sum();
    if (!std::isfinite(ll)) throw NumericError("EM log-likelihood is not finite for class " + std::to_string(label));
    mix.log_likelihood_history.push_back(ll);
    mix.iterations = iter + 1;
    if (!reseeded && std::isfinite(previous) &&
        std::abs(ll - previous) <= opt.tol * std::max(1.0, std::abs(previous)))
      break;
    if (iter + 1 == std::max(1, opt.max_iters)) break;
    previous = ll;
    m_step();
  }
  mix.log_likelihood = mix.log_likelihood_history.back();
  mix.components = std::move(comps);
  return mix;
}

}  // namespace detail

// Fits one full-covariance mixture per class by EM. Each class draws from its own RNG
// stream derived from (seed, class), so no information crosses class boundaries.
inline std::vector<ClassMixture> fit_gmm(const LabeledDataset& ds, const std::vector<int>& components_per_class,
                                         const GmmOptions& opt) {
  if (static_cast<int>(components_per_class.size()) != ds.class_count)
    throw ParameterError("components_per_class has " + std::to_string(components_per_class.size()) +
                         " entries for " + std::to_string(ds.class_count) + " classes");
  if (!(opt.reg >= 0.0)) throw ParameterError("GMM regularization must be >= 0");
  const auto counts = ds.class_counts();
  std::vector<ClassMixture> out;
  for (ClassId c = 0; c < ds.class_count; ++c) {
    const int k = components_per_class[static_cast<std::size_t>(c)];
    const Index nc = counts[static_cast<std::size_t>(c)];
    if (nc == 0) throw DataError("class " + std::to_string(c) + " has no samples");
    if (k < 1) throw ParameterError("component count must be >= 1");
    if (nc < k)
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(nc) + " samples for " +
                      std::to_string(k) + " components");
    Matrix x(nc, ds.dim());
    Index row = 0;
    for (Index i = 0; i < ds.size(); ++i)
      if (ds.labels[static_cast<std::size_t>(i)] == c) x.row(row++) = ds.samples.row(i);
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(seq);
    out.push_back(detail::fit_class_mixture(x, c, k, opt, rng));
  }
  return out;
}

}  // namespace ffmlp
