#pragma once

#include <array>
#include <vector>

#include "acc/morphology.hpp"
#include "acc/raster.hpp"

namespace acc::blobs {

struct BoundingBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

/// One connected foreground component.
struct Blob {
  int id = 0;
  BoundingBox bbox;
  /// Tight mask over bbox.
  BinaryMask mask;
  int area = 0;
  double circularity = 0.0;
};

/// Nine rows per pixel: the pixel itself then N, NE, E, SE, S, SW, W, NW
/// (border neighbours replicate the nearest in-image pixel).
struct PixelFeatureMatrix {
  static constexpr int kRows = 9;
  int width = 0;
  int height = 0;
  std::vector<std::array<double, kRows>> columns;
};

/// |plane - open_close_by_reconstruction(plane, disk r)|, Gaussian smoothed
/// and min-max normalized.
GrayPlane suppress_background(const GrayPlane& pc_plane, int r_obrcbr, double sigma_x,
                              double sigma_y, double half_extent = 2.0);

PixelFeatureMatrix build_pixel_features(const GrayPlane& plane);

struct KmeansTrace {
  int iterations = 0;
  /// Sum of squared distances to the assigned centroid, one entry per
  /// assignment step.
  std::vector<double> objective;
  std::array<std::array<double, PixelFeatureMatrix::kRows>, 2> centroids{};
};

/// Two-class Lloyd iterations starting from the all-zeros and all-ones
/// centroids; foreground is the class whose centroid has the larger mean.
BinaryMask kmeans_blob_mask(const PixelFeatureMatrix& features, KmeansTrace* trace = nullptr,
                            int max_iterations = 100);

/// Length of the 8-connected outer boundary chain through pixel centres,
/// diagonal steps counting sqrt(2). The region is the set of true pixels of
/// one 8-connected component.
double boundary_perimeter(const BinaryMask& region);

/// 4 pi area / perimeter^2 clamped to [0,1]; single pixels score 1.
double circularity(int area, double perimeter);
double circularity(const BinaryMask& region);

/// Bounding box of one label, plus a tight mask.
Blob extract_region(const LabelMap& labels, int label, int id);

/// One region per label 1..count (ids equal labels), with area and circularity.
std::vector<Blob> label_regions(const LabelMap& labels, int count);

/// Dilation (disk `dilate_radius`), hole filling, removal of components
/// smaller than 0.5 a_min; remaining components become blobs in raster order.
std::vector<Blob> postprocess_blobs(const BinaryMask& mask, int a_min, int dilate_radius = 1);

/// All blobs rendered into a full-size mask.
BinaryMask blob_union(const std::vector<Blob>& blobs, int width, int height);

}  // namespace acc::blobs
