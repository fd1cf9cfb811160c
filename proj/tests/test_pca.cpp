#include <gtest/gtest.h>

#include <cmath>

#include "acc/pca.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace acc;

namespace {

double dot(const pca::Vec3& a, const pca::Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

TEST(Pca, ObservationMatrixIsCentred) {
  testgen::Gen gen(31);
  const RgbImage img = gen.image(9, 7);
  const auto obs = pca::build_observation_matrix(img);
  ASSERT_EQ(obs.pixel_count(), img.size());
  pca::Vec3 sum{};
  for (const auto& c : obs.centered) {
    for (int k = 0; k < 3; ++k) sum[k] += c[k];
  }
  for (double s : sum) EXPECT_NEAR(s, 0.0, 1e-12);
}

TEST(Pca, CovarianceUsesSampleNormalization) {
  RgbImage img(2, 1);
  img(0, 0) = {0, 0, 0};
  img(1, 0) = {1, 2, 0};
  const auto cov = pca::covariance(pca::build_observation_matrix(img));
  EXPECT_NEAR(cov[0][0], 0.5, 1e-15);
  EXPECT_NEAR(cov[0][1], 1.0, 1e-15);
  EXPECT_NEAR(cov[1][1], 2.0, 1e-15);
  EXPECT_NEAR(cov[2][2], 0.0, 1e-15);
}

TEST(Pca, AxisAlignedVarianceOrder) {
  // Only the green channel varies, so it is the first component.
  RgbImage img(4, 1);
  for (int x = 0; x < 4; ++x) img(x, 0) = {0.3, 0.25 * x, 0.7};
  const auto d = pca::decompose(img);
  EXPECT_NEAR(d.basis[0][1], 1.0, 1e-12);
  EXPECT_GT(d.eigenvalues[0], 0.0);
  EXPECT_NEAR(d.eigenvalues[1], 0.0, 1e-15);
}

TEST(Pca, MatchesJacobiEigensolver) {
  testgen::Gen gen(32);
  for (int trial = 0; trial < 100; ++trial) {
    const RgbImage img = gen.correlated_image(gen.uniform_int(3, 20), gen.uniform_int(3, 20));
    const auto obs = pca::build_observation_matrix(img);
    const auto cov = pca::covariance(obs);
    const auto d = pca::pca_transform(obs, img.width(), img.height());
    const auto ref = oracle::jacobi_eigen(cov);
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(d.eigenvalues[k], ref.values[k], 1e-10);
      // Eigenvectors agree up to sign when the eigenvalue is simple.
      const double gap = std::min(k > 0 ? ref.values[k - 1] - ref.values[k] : 1.0,
                                  k < 2 ? ref.values[k] - ref.values[k + 1] : 1.0);
      if (gap > 1e-6) EXPECT_NEAR(std::abs(dot(d.basis[k], ref.vectors[k])), 1.0, 1e-8);
    }
  }
}

TEST(Pca, BasisIsOrthonormalAndSigned) {
  testgen::Gen gen(33);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = pca::decompose(gen.image(gen.uniform_int(2, 15), gen.uniform_int(2, 15)));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(dot(d.basis[i], d.basis[j]), i == j ? 1.0 : 0.0, 1e-12);
      int arg = 0;
      for (int r = 1; r < 3; ++r) {
        if (std::abs(d.basis[i][r]) > std::abs(d.basis[i][arg])) arg = r;
      }
      EXPECT_GT(d.basis[i][arg], 0.0);
    }
  }
}

TEST(Pca, EigenvaluesOrderedAndVarianceIdentity) {
  testgen::Gen gen(34);
  for (int trial = 0; trial < 50; ++trial) {
    const RgbImage img = gen.image(gen.uniform_int(2, 15), gen.uniform_int(2, 15));
    const auto d = pca::decompose(img);
    EXPECT_GE(d.eigenvalues[0], d.eigenvalues[1]);
    EXPECT_GE(d.eigenvalues[1], d.eigenvalues[2]);
    EXPECT_GE(d.eigenvalues[2], -1e-15);
    const auto cov = pca::covariance(pca::build_observation_matrix(img));
    EXPECT_NEAR(d.eigenvalues[0] + d.eigenvalues[1] + d.eigenvalues[2], cov[0][0] + cov[1][1] + cov[2][2], 1e-12);
    // Each plane's sample variance is its eigenvalue.
    const double n = static_cast<double>(img.size());
    for (int k = 0; k < 3; ++k) {
      double m = 0.0, v = 0.0;
      for (double x : d.planes[k].pixels()) m += x;
      m /= n;
      for (double x : d.planes[k].pixels()) v += (x - m) * (x - m);
      EXPECT_NEAR(m, 0.0, 1e-12);
      EXPECT_NEAR(v / (n - 1.0), d.eigenvalues[k], 1e-12);
    }
  }
}

TEST(Pca, ProjectionReconstructsPixels) {
  testgen::Gen gen(35);
  const RgbImage img = gen.image(8, 6);
  const auto d = pca::decompose(img);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const pca::Vec3 y{d.planes[0][i], d.planes[1][i], d.planes[2][i]};
    const double rgb[3] = {img[i].r, img[i].g, img[i].b};
    for (int c = 0; c < 3; ++c) {
      double x = d.mean[c];
      for (int k = 0; k < 3; ++k) x += d.basis[k][c] * y[k];
      EXPECT_NEAR(x, rgb[c], 1e-12);
    }
  }
}

TEST(Pca, Errors) {
  EXPECT_THROW(pca::decompose(RgbImage(1, 1)), ParameterError);
  const auto obs = pca::build_observation_matrix(RgbImage(2, 2));
  EXPECT_THROW(pca::pca_transform(obs, 3, 2), ParameterError);
}
