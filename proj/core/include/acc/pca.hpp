#pragma once

#include <array>
#include <vector>

#include "acc/raster.hpp"

namespace acc::pca {

using Vec3 = std::array<double, 3>;
/// Column-major: basis[k] is the k-th unit eigenvector.
using Basis3 = std::array<Vec3, 3>;

/// Centered 3 x n observation matrix, one column per pixel in raster order.
struct ObservationMatrix {
  Vec3 mean{};
  std::vector<Vec3> centered;
  std::size_t pixel_count() const { return centered.size(); }
};

struct PcDecomposition {
  Vec3 mean{};
  Basis3 basis{};
  /// Descending, non-negative.
  Vec3 eigenvalues{};
  std::array<GrayPlane, 3> planes;
};

ObservationMatrix build_observation_matrix(const RgbImage& img);

/// Sample covariance (1/(n-1)) of the centered observations.
std::array<Vec3, 3> covariance(const ObservationMatrix& obs);

/// Eigenpairs of the covariance from its SVD, projected planes
/// y_k = u_k^T (x - mean). Each eigenvector is signed so that its
/// largest-magnitude entry (first one on ties) is positive.
PcDecomposition pca_transform(const ObservationMatrix& obs, int width, int height);

PcDecomposition decompose(const RgbImage& img);

}  // namespace acc::pca
