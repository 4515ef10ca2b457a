#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ffmlp/lda.hpp"

using namespace ffmlp;

namespace {

BlobMoments moments(Vector mean, Matrix cov, double count) { return {std::move(mean), std::move(cov), count}; }

Matrix random_spd(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = normal(rng);
  return a * a.transpose() + 0.2 * Matrix::Identity(d, d);
}

double log_density(const Vector& x, const Vector& mean, const Matrix& cov) {
  const Vector r = x - mean;
  return -0.5 * std::log(cov.determinant()) - 0.5 * r.dot(cov.inverse() * r) -
         0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi);
}

}  // namespace

TEST(Lda, SymmetricUnitExample) {
  const auto h = fit_lda(moments(Vector{{1.0, 0.0}}, Matrix::Identity(2, 2), 10),
                         moments(Vector{{-1.0, 0.0}}, Matrix::Identity(2, 2), 10), 0.0);
  EXPECT_NEAR(h.normal(0), 2.0, 1e-15);
  EXPECT_NEAR(h.normal(1), 0.0, 1e-15);
  EXPECT_NEAR(h.bias, 0.0, 1e-15);
}

TEST(Lda, PriorShiftsBias) {
  const auto h = fit_lda(moments(Vector{{1.0, 0.0}}, Matrix::Identity(2, 2), 30),
                         moments(Vector{{-1.0, 0.0}}, Matrix::Identity(2, 2), 10), 0.0);
  EXPECT_NEAR(h.bias, std::log(3.0), 1e-14);
}

TEST(Lda, AgreesWithBayesDensityRatio) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> count(5.0, 100.0);
  int checked = 0, agreed = 0;
  for (int model = 0; model < 10; ++model) {
    const Index d = 2 + model % 4;
    const Matrix cov = random_spd(d, rng);
    const Vector ma = Vector::NullaryExpr(d, [&](Index) { return normal(rng); });
    const Vector mb = Vector::NullaryExpr(d, [&](Index) { return normal(rng); });
    const double na = count(rng), nb = count(rng);
    const auto h = fit_lda(moments(ma, cov, na), moments(mb, cov, nb), 0.0);
    for (int k = 0; k < 1000; ++k) {
      const Vector x = Vector::NullaryExpr(d, [&](Index) { return 3.0 * normal(rng); });
      const double s = evaluate(h, x);
      if (std::abs(s) < 1e-9) continue;
      const double bayes = std::log(na) + log_density(x, ma, cov) - std::log(nb) - log_density(x, mb, cov);
      ++checked;
      agreed += (s > 0.0) == (bayes > 0.0);
    }
  }
  EXPECT_GT(checked, 9900);
  EXPECT_EQ(agreed, checked);
}

TEST(Lda, SwapNegatesExactly) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 5;
    const auto a = moments(Vector::Random(d), random_spd(d, rng), 3.0 + t);
    const auto b = moments(Vector::Random(d), random_spd(d, rng), 40.0 - t);
    const auto ab = fit_lda(a, b, 1e-6);
    const auto ba = fit_lda(b, a, 1e-6);
    EXPECT_TRUE((ab.normal.array() == (-ba.normal).array()).all());
    EXPECT_EQ(ab.bias, -ba.bias);
  }
}

TEST(Lda, TranslationEquivariance) {
  std::mt19937_64 rng(6);
  const Matrix cov = random_spd(3, rng);
  const Vector ma{{1.0, 2.0, 0.5}}, mb{{-1.0, 0.0, 2.0}}, shift{{4.0, -3.0, 1.5}};
  const auto h = fit_lda(moments(ma, cov, 7), moments(mb, cov, 9), 0.0);
  const auto g = fit_lda(moments(ma + shift, cov, 7), moments(mb + shift, cov, 9), 0.0);
  EXPECT_LT((h.normal - g.normal).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(g.bias, h.bias - h.normal.dot(shift), 1e-10);
}

TEST(Lda, MidpointOnPlaneForEqualCounts) {
  std::mt19937_64 rng(8);
  const Matrix cov = random_spd(4, rng);
  const Vector ma = Vector::Random(4), mb = Vector::Random(4);
  const auto h = fit_lda(moments(ma, cov, 12), moments(mb, cov, 12), 0.0);
  EXPECT_NEAR(evaluate(h, 0.5 * (ma + mb)), 0.0, 1e-12);
  EXPECT_GT(evaluate(h, ma), 0.0);
  EXPECT_LT(evaluate(h, mb), 0.0);
}

TEST(Lda, SampleMomentsUseMle) {
  BlobSamples a{{}, Matrix{{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}, {2.0, 2.0}}};
  const auto m = moments_of(a);
  EXPECT_TRUE(m.mean.isApprox(Vector{{1.0, 1.0}}));
  EXPECT_TRUE(m.covariance.isApprox(Matrix::Identity(2, 2)));
  EXPECT_EQ(m.count, 4.0);
  BlobSamples analytic;
  analytic.blob.mean = Vector{{3.0, 1.0}};
  analytic.blob.covariance = Matrix::Identity(2, 2);
  analytic.blob.support_count = 17.0;
  EXPECT_EQ(moments_of(analytic).count, 17.0);
}

TEST(Lda, Evaluate) {
  Hyperplane h{Vector{{1.0, 1.0}}, -2.0};
  EXPECT_DOUBLE_EQ(evaluate(h, Vector{{3.0, 5.0}}), 6.0);
  EXPECT_DOUBLE_EQ(evaluate(h, Vector{{1.0, 1.0}}), 0.0);
  EXPECT_THROW(evaluate(h, Vector{{1.0, 1.0, 1.0}}), ParameterError);
}

TEST(Lda, Errors) {
  const auto a = moments(Vector{{1.0, 0.0}}, Matrix::Identity(2, 2), 10);
  EXPECT_THROW(fit_lda(a, a, 0.0), DegeneratePairError);
  EXPECT_THROW(fit_lda(a, moments(Vector{{1.0}}, Matrix::Identity(1, 1), 10), 0.0), ParameterError);
  EXPECT_THROW(fit_lda(a, moments(Vector{{0.0, 0.0}}, Matrix::Zero(2, 2), 10), -1.0), ParameterError);
  EXPECT_THROW(fit_lda(moments(Vector{{1.0, 0.0}}, Matrix::Zero(2, 2), 10),
                       moments(Vector{{0.0, 0.0}}, Matrix::Zero(2, 2), 10), 0.0),
               NumericError);
  EXPECT_THROW(moments_of(BlobSamples{{}, Matrix{{1.0, 2.0}}}), DataError);
}
