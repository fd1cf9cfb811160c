#include "acc/pca.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace acc::pca {

ObservationMatrix build_observation_matrix(const RgbImage& img) {
  ObservationMatrix obs;
  const std::size_t n = img.size();
  obs.centered.resize(n);
  Vec3 sum{};
  for (std::size_t i = 0; i < n; ++i) {
    const Rgb& p = img[i];
    obs.centered[i] = {p.r, p.g, p.b};
    sum[0] += p.r;
    sum[1] += p.g;
    sum[2] += p.b;
  }
  if (n > 0) {
    for (int c = 0; c < 3; ++c) obs.mean[c] = sum[c] / static_cast<double>(n);
  }
  for (Vec3& col : obs.centered) {
    for (int c = 0; c < 3; ++c) col[c] -= obs.mean[c];
  }
  return obs;
}

std::array<Vec3, 3> covariance(const ObservationMatrix& obs) {
  std::array<Vec3, 3> c{};
  const std::size_t n = obs.pixel_count();
  if (n < 2) return c;
  for (const Vec3& x : obs.centered) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) c[i][j] += x[i] * x[j];
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      c[i][j] /= static_cast<double>(n - 1);
      c[j][i] = c[i][j];
    }
  }
  return c;
}

PcDecomposition pca_transform(const ObservationMatrix& obs, int width, int height) {
  if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != obs.pixel_count()) {
    throw ParameterError("pca_transform: dimensions do not match observation count");
  }
  if (obs.pixel_count() < 2) {
    throw ParameterError("pca_transform: need at least two pixels");
  }
  const auto cov = covariance(obs);
  Eigen::Matrix3d c;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) c(i, j) = cov[i][j];
  }

  PcDecomposition out;
  out.mean = obs.mean;
  // C is symmetric PSD, so its left singular vectors are eigenvectors and the
  // singular values are the eigenvalues, already in descending order.
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(c, Eigen::ComputeFullU);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Vector3d s = svd.singularValues();

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s(a) > s(b); });
  for (int k = 0; k < 3; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    Vec3 v{u(0, src), u(1, src), u(2, src)};
    int big = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(v[i]) > std::abs(v[big])) big = i;
    }
    if (v[big] < 0) {
      for (double& e : v) e = -e;
    }
    out.basis[k] = v;
    out.eigenvalues[k] = std::max(0.0, s(src));
  }

  for (int k = 0; k < 3; ++k) {
    GrayPlane plane(width, height);
    const Vec3& v = out.basis[k];
    for (std::size_t i = 0; i < obs.pixel_count(); ++i) {
      const Vec3& x = obs.centered[i];
      plane[i] = v[0] * x[0] + v[1] * x[1] + v[2] * x[2];
    }
    out.planes[k] = std::move(plane);
  }
  return out;
}

PcDecomposition decompose(const RgbImage& img) {
  return pca_transform(build_observation_matrix(img), img.width(), img.height());
}

}  // namespace acc::pca
