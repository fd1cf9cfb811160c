#pragma once

#include <vector>

#include "acc/raster.hpp"

namespace acc::morph {

struct StructuringElement {
  enum class Shape { Disk, Square };
  Shape shape = Shape::Disk;
  int radius = 1;

  static StructuringElement disk(int r) { return {Shape::Disk, r}; }
  static StructuringElement square(int r) { return {Shape::Square, r}; }

  /// Offsets covered by the element. A disk of radius r holds exactly the
  /// offsets with dx^2 + dy^2 <= r^2.
  std::vector<Point> offsets() const;
  /// Half-width of the horizontal run at row offset dy (-1 if the row is empty).
  int half_width(int dy) const;
};

// Flat grayscale erosion/dilation; pixels outside the image are ignored.
GrayPlane erode(const GrayPlane& plane, const StructuringElement& se);
GrayPlane dilate(const GrayPlane& plane, const StructuringElement& se);

/// Reconstruction by dilation of `marker` under `mask` (marker <= mask),
/// 8-connectivity.
GrayPlane reconstruct_by_dilation(const GrayPlane& marker, const GrayPlane& mask);
/// Reconstruction by erosion of `marker` above `mask` (marker >= mask),
/// 8-connectivity.
GrayPlane reconstruct_by_erosion(const GrayPlane& marker, const GrayPlane& mask);

/// Opening by reconstruction followed by closing by reconstruction.
GrayPlane open_close_by_reconstruction(const GrayPlane& plane, const StructuringElement& se);

/// Plateaus (8-connected, exact equality) with no strictly lower neighbour.
BinaryMask regional_minima(const GrayPlane& plane);

/// Regional minima of the erosion-reconstruction of plane from plane + h.
BinaryMask extended_minima(const GrayPlane& plane, double h);

/// Exact Euclidean distance from every true pixel to the nearest false pixel;
/// zero on false pixels. Pixels outside the raster do not count as false, so a
/// mask with no false pixel at all yields +infinity everywhere.
DistanceMap distance_transform(const BinaryMask& mask);

/// Flooding from marker components over `topography` restricted to `domain`.
/// Marker components are 8-connected and labelled in raster order of their
/// first pixel. Pixels reached from two different basins become 0 (line).
LabelMap marker_watershed(const GrayPlane& topography, const BinaryMask& markers,
                          const BinaryMask& domain);

/// 8-connected labelling; labels follow raster order of each component's
/// first pixel. `count` (if given) receives the number of labels.
LabelMap connected_components(const BinaryMask& mask, int* count = nullptr);

/// Sets every false region that is not 4-connected to the border.
BinaryMask fill_holes(const BinaryMask& mask);

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);

}  // namespace acc::morph
