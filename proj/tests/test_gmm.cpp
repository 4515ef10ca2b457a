#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ffmlp/dataset.hpp"
#include "ffmlp/gmm.hpp"

using namespace ffmlp;

namespace {

// Dense textbook density: -(d/2)log 2π - ½log det Σ - ½(x-μ)ᵀΣ⁻¹(x-μ).
double dense_logpdf(const GaussianBlob& b, const Vector& x) {
  const double d = static_cast<double>(b.dim());
  const Vector r = x - b.mean;
  return -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(b.covariance.determinant()) -
         0.5 * r.dot(b.covariance.inverse() * r);
}

LabeledDataset three_class_data(Seed seed) {
  return gen_gaussian_blobs({Vector{{0.0, 0.0}}, Vector{{4.0, 0.0}}, Vector{{0.0, 4.0}}, Vector{{4.0, 4.0}},
                             Vector{{-4.0, 4.0}}},
                            {0, 0, 1, 1, 2}, 120, 0.8, seed);
}

}  // namespace

TEST(Logpdf, StandardNormalAtOrigin) {
  GaussianBlob b{Vector::Zero(2), Matrix::Identity(2, 2)};
  EXPECT_NEAR(gaussian_logpdf(b, Vector::Zero(2)), -std::log(2.0 * std::numbers::pi), 1e-14);
}

TEST(Logpdf, MatchesDenseQuadraticForm) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 1 + trial % 4;
    Matrix a(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) a(i, j) = normal(rng);
    GaussianBlob b{Vector::NullaryExpr(d, [&](Index) { return normal(rng); }),
                   a * a.transpose() + 0.5 * Matrix::Identity(d, d)};
    const Vector x = Vector::NullaryExpr(d, [&](Index) { return 2.0 * normal(rng); });
    EXPECT_NEAR(gaussian_logpdf(b, x), dense_logpdf(b, x), 1e-9);
    Matrix rows(3, d);
    for (Index r = 0; r < 3; ++r) rows.row(r) = (x * static_cast<double>(r)).transpose();
    const Vector batch = GaussianDensity(b).logpdf_rows(rows);
    for (Index r = 0; r < 3; ++r) EXPECT_NEAR(batch(r), dense_logpdf(b, rows.row(r).transpose()), 1e-9);
  }
}

TEST(Logpdf, RejectsBadInput) {
  GaussianBlob b{Vector::Zero(2), Matrix::Identity(2, 2)};
  EXPECT_THROW(gaussian_logpdf(b, Vector::Zero(3)), ParameterError);
  b.covariance(1, 1) = -1.0;
  EXPECT_THROW(gaussian_logpdf(b, Vector::Zero(2)), NumericError);
}

TEST(Sampling, MomentsWithinSamplingError) {
  GaussianBlob b{Vector{{1.0, -1.0}}, Matrix{{2.0, 0.6}, {0.6, 1.0}}};
  ClassMixture mix;
  mix.components = {b};
  const Index n = 20000;
  const Matrix x = sample_mixture(mix, n, 5);
  const Vector mean = x.colwise().mean().transpose();
  for (Index j = 0; j < 2; ++j)
    EXPECT_LT(std::abs(mean(j) - b.mean(j)), 5.0 * std::sqrt(b.covariance(j, j) / static_cast<double>(n)));
  const Matrix c = x.rowwise() - mean.transpose();
  const Matrix cov = c.transpose() * c / static_cast<double>(n);
  EXPECT_LT((cov - b.covariance).cwiseAbs().maxCoeff(), 0.1);
  EXPECT_TRUE((sample_mixture(mix, 10, 5).array() == sample_mixture(mix, 10, 5).array()).all());
}

TEST(Em, SingleComponentIsClosedFormMle) {
  const auto ds = three_class_data(1);
  GmmOptions opt;
  const auto mixes = fit_gmm(ds, {1, 1, 1}, opt);
  ASSERT_EQ(mixes.size(), 3u);
  for (ClassId c = 0; c < 3; ++c) {
    Index n = 0;
    Vector mean = Vector::Zero(2);
    for (Index i = 0; i < ds.size(); ++i)
      if (ds.labels[static_cast<std::size_t>(i)] == c) {
        mean += ds.samples.row(i).transpose();
        ++n;
      }
    mean /= static_cast<double>(n);
    Matrix cov = Matrix::Zero(2, 2);
    for (Index i = 0; i < ds.size(); ++i)
      if (ds.labels[static_cast<std::size_t>(i)] == c) {
        const Vector r = ds.samples.row(i).transpose() - mean;
        cov += r * r.transpose();
      }
    cov /= static_cast<double>(n);
    const auto& comp = mixes[static_cast<std::size_t>(c)].components.at(0);
    EXPECT_LT((comp.mean - mean).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((comp.covariance - cov).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_DOUBLE_EQ(comp.weight, 1.0);
    EXPECT_EQ(comp.class_label, c);
  }
}

TEST(Em, FlatDirectionIsRaisedToFloor) {
  // Points on the line y = x: the scatter has eigenvalues (2 s^2, 0) along (1,1) and (1,-1).
  LabeledDataset ds;
  ds.samples = Matrix(5, 2);
  ds.samples << -2, -2, -1, -1, 0, 0, 1, 1, 2, 2;
  ds.labels = {0, 0, 0, 0, 0};
  ds.class_count = 1;
  GmmOptions opt;
  opt.reg = 1e-3;
  const auto mix = fit_gmm(ds, {1}, opt).at(0);
  const Matrix& cov = mix.components.at(0).covariance;
  const double floor = 1e-3 * 4.0 / 2.0;
  const Vector u = Vector{{1.0, 1.0}} / std::sqrt(2.0);
  const Vector v = Vector{{1.0, -1.0}} / std::sqrt(2.0);
  EXPECT_NEAR(u.dot(cov * u), 4.0, 1e-12);
  EXPECT_NEAR(v.dot(cov * v), floor, 1e-12);
  EXPECT_NEAR(u.dot(cov * v), 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(mix.log_likelihood));
}

TEST(Em, LogLikelihoodMonotoneAndWeightsNormalized) {
  const auto ds = three_class_data(2);
  for (Seed seed = 0; seed < 5; ++seed) {
    GmmOptions opt;
    opt.seed = seed;
    for (const auto& mix : fit_gmm(ds, {3, 4, 2}, opt)) {
      const auto& h = mix.log_likelihood_history;
      ASSERT_FALSE(h.empty());
      for (std::size_t t = 1; t < h.size(); ++t) {
        const bool reseed = std::find(mix.reseed_iterations.begin(), mix.reseed_iterations.end(),
                                      static_cast<int>(t)) != mix.reseed_iterations.end();
        if (!reseed) EXPECT_GE(h[t], h[t - 1] - 1e-9 * std::abs(h[t - 1])) << "iteration " << t;
      }
      double wsum = 0.0;
      for (const auto& c : mix.components) {
        EXPECT_GT(c.weight, 0.0);
        wsum += c.weight;
      }
      EXPECT_NEAR(wsum, 1.0, 1e-12);
    }
  }
}

TEST(Em, FinalLikelihoodMatchesEvaluation) {
  const auto ds = three_class_data(3);
  const auto mixes = fit_gmm(ds, {2, 2, 1}, GmmOptions{});
  Matrix x(240, 2);
  Index row = 0;
  for (Index i = 0; i < ds.size(); ++i)
    if (ds.labels[static_cast<std::size_t>(i)] == 0) x.row(row++) = ds.samples.row(i);
  EXPECT_NEAR(mixes[0].log_likelihood, mixture_log_likelihood(mixes[0], x), 1e-9 * std::abs(mixes[0].log_likelihood));
}

TEST(Em, ClassesAreIndependent) {
  // Changing another class's samples leaves a class's mixture untouched.
  const auto a = three_class_data(4);
  auto b = a;
  for (Index i = 0; i < b.size(); ++i)
    if (b.labels[static_cast<std::size_t>(i)] != 1) b.samples.row(i) *= -3.0;
  GmmOptions opt;
  opt.seed = 11;
  const auto ma = fit_gmm(a, {2, 3, 1}, opt);
  const auto mb = fit_gmm(b, {2, 3, 1}, opt);
  ASSERT_EQ(ma[1].components.size(), mb[1].components.size());
  for (std::size_t k = 0; k < ma[1].components.size(); ++k) {
    EXPECT_TRUE((ma[1].components[k].mean.array() == mb[1].components[k].mean.array()).all());
    EXPECT_TRUE((ma[1].components[k].covariance.array() == mb[1].components[k].covariance.array()).all());
    EXPECT_EQ(ma[1].components[k].weight, mb[1].components[k].weight);
  }
}

TEST(Em, DeterministicPerSeed) {
  const auto ds = three_class_data(5);
  GmmOptions opt;
  opt.seed = 3;
  const auto a = fit_gmm(ds, {2, 2, 2}, opt);
  const auto b = fit_gmm(ds, {2, 2, 2}, opt);
  for (std::size_t c = 0; c < a.size(); ++c) EXPECT_EQ(a[c].log_likelihood, b[c].log_likelihood);
}

TEST(Em, Errors) {
  const auto ds = three_class_data(6);
  EXPECT_THROW(fit_gmm(ds, {1, 1}, GmmOptions{}), ParameterError);
  EXPECT_THROW(fit_gmm(ds, {1, 0, 1}, GmmOptions{}), ParameterError);
  EXPECT_THROW(fit_gmm(ds, {1, 1, 500}, GmmOptions{}), DataError);
}
